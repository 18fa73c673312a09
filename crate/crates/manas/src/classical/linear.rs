//! Linear classifiers trained by full-batch (sub)gradient descent: logistic
//! regression on L2-regularized cross-entropy and a linear SVC on
//! L2-regularized hinge loss.

use super::{dot, sigmoid, ClassicalHyperparams};
use crate::vectorize::{CountVector, FeatureMatrix};

/// Weight vector plus bias; the probability is the logistic of the score.
/// For the SVC the logistic is a calibration approximation layered over the
/// signed margin, not a fitted probability.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, vector: &CountVector) -> f64 {
        dot(vector, &self.weights) + self.bias
    }

    pub fn proba(&self, vector: &CountVector) -> f64 {
        sigmoid(self.score(vector))
    }
}

/// Full-batch gradient descent on
/// J = -(1/N) Σ [y ln p + (1-y) ln(1-p)] + (λ/2)‖w‖², bias unregularized.
/// The gradient through the sigmoid reduces to residuals p - y.
pub fn train_logistic(features: &FeatureMatrix, params: &ClassicalHyperparams) -> LinearModel {
    let n = features.len() as f64;
    let mut weights = vec![0.0; features.dimension()];
    let mut bias = 0.0;

    for _ in 0..params.lr_epochs {
        let mut grad_w = vec![0.0; weights.len()];
        let mut grad_b = 0.0;
        for (row, &label) in features.rows.iter().zip(&features.labels) {
            let residual = sigmoid(dot(row, &weights) + bias) - f64::from(label);
            for (index, count) in row.entries() {
                grad_w[index] += residual * f64::from(count);
            }
            grad_b += residual;
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= params.lr_learning_rate * (g / n + params.lr_l2 * *w);
        }
        bias -= params.lr_learning_rate * (grad_b / n);
    }

    LinearModel { weights, bias }
}

/// Full-batch subgradient descent on
/// J = (1/N) Σ max(0, 1 - s·(w·x + b)) + ‖w‖²/(2CN) with s = 2y - 1.
/// Rows with margin ≥ 1 contribute zero subgradient.
pub fn train_svc(features: &FeatureMatrix, params: &ClassicalHyperparams) -> LinearModel {
    let n = features.len() as f64;
    let reg = 1.0 / (params.svc_c * n);
    let mut weights = vec![0.0; features.dimension()];
    let mut bias = 0.0;

    for _ in 0..params.svc_epochs {
        let mut grad_w = vec![0.0; weights.len()];
        let mut grad_b = 0.0;
        for (row, &label) in features.rows.iter().zip(&features.labels) {
            let sign = 2.0 * f64::from(label) - 1.0;
            let margin = sign * (dot(row, &weights) + bias);
            if margin < 1.0 {
                for (index, count) in row.entries() {
                    grad_w[index] -= sign * f64::from(count);
                }
                grad_b -= sign;
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad_w) {
            *w -= params.svc_learning_rate * (g / n + reg * *w);
        }
        bias -= params.svc_learning_rate * (grad_b / n);
    }

    LinearModel { weights, bias }
}

#[cfg(test)]
mod tests {
    use super::super::tests::synthetic_features;
    use super::super::{predict, predict_proba, train_classifier, Algorithm, ClassicalHyperparams, TrainedClassicalModel};
    use super::*;
    use crate::vectorize::{vectorize, FeatureMatrix, Vocabulary};

    fn linear_parts(model: &TrainedClassicalModel) -> &LinearModel {
        match model {
            TrainedClassicalModel::Lr(m) | TrainedClassicalModel::Svc(m) => m,
            _ => unreachable!(),
        }
    }

    #[test]
    fn zero_model_predicts_half_and_breaks_tie_toward_one() {
        let docs: Vec<Vec<String>> = vec![vec!["ক".into()], vec!["খ".into()]];
        let vocab = Vocabulary::build(&docs, 1).unwrap();
        let model = TrainedClassicalModel::Lr(LinearModel {
            weights: vec![0.0; vocab.len()],
            bias: 0.0,
        });
        let query = vectorize(&docs[0], &vocab);
        assert_eq!(predict_proba(&model, &query).unwrap(), 0.5);
        assert_eq!(predict(&model, &query).unwrap(), 1);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let (train, _) = synthetic_features(30, 0.8, 0.75, 23);
        let n = train.len() as f64;
        let l2 = 1e-4;
        let dim = train.dimension();

        // analytic gradient at a fixed non-zero point
        let base: Vec<f64> = (0..dim).map(|i| ((i % 7) as f64 - 3.0) * 0.05).collect();
        let bias = 0.1;
        let mut grad = vec![0.0; dim];
        for (row, &label) in train.rows.iter().zip(&train.labels) {
            let residual = sigmoid(dot(row, &base) + bias) - f64::from(label);
            for (index, count) in row.entries() {
                grad[index] += residual * f64::from(count) / n;
            }
        }
        for (g, w) in grad.iter_mut().zip(&base) {
            *g += l2 * w;
        }

        // objective for central differences
        let objective = |w: &[f64]| {
            let mut loss = 0.0;
            for (row, &label) in train.rows.iter().zip(&train.labels) {
                let p = sigmoid(dot(row, w) + bias).clamp(1e-12, 1.0 - 1e-12);
                loss -= f64::from(label) * p.ln() + (1.0 - f64::from(label)) * (1.0 - p).ln();
            }
            loss / n + 0.5 * l2 * w.iter().map(|x| x * x).sum::<f64>()
        };

        let eps = 1e-6;
        for index in 0..dim.min(25) {
            let mut plus = base.clone();
            plus[index] += eps;
            let mut minus = base.clone();
            minus[index] -= eps;
            let numeric = (objective(&plus) - objective(&minus)) / (2.0 * eps);
            let denom = grad[index].abs().max(numeric.abs()).max(1e-8);
            assert!(
                (grad[index] - numeric).abs() / denom < 1e-5,
                "index {index}: analytic {} numeric {numeric}",
                grad[index]
            );
        }
    }

    #[test]
    fn logistic_separates_a_linearly_separable_set() {
        let (train, _) = synthetic_features(100, 1.0, 0.75, 29);
        let params = ClassicalHyperparams::new(Algorithm::Lr);
        let model = train_classifier(&train, &params).unwrap();
        for (row, &label) in train.rows.iter().zip(&train.labels) {
            assert_eq!(predict(&model, row).unwrap(), label);
        }
    }

    #[test]
    fn svc_separates_a_linearly_separable_set() {
        let (train, _) = synthetic_features(100, 1.0, 0.75, 31);
        let params = ClassicalHyperparams::new(Algorithm::Svc);
        let model = train_classifier(&train, &params).unwrap();
        for (row, &label) in train.rows.iter().zip(&train.labels) {
            assert_eq!(predict(&model, row).unwrap(), label);
        }
    }

    #[test]
    fn svc_descends_its_objective() {
        let (train, _) = synthetic_features(80, 0.7, 0.75, 37);
        let c = 1.0;
        let n = train.len() as f64;
        let objective = |m: &LinearModel| {
            let hinge: f64 = train
                .rows
                .iter()
                .zip(&train.labels)
                .map(|(row, &label)| {
                    let sign = 2.0 * f64::from(label) - 1.0;
                    (1.0 - sign * m.score(row)).max(0.0)
                })
                .sum();
            hinge / n + m.weights.iter().map(|w| w * w).sum::<f64>() / (2.0 * c * n)
        };

        let zero = LinearModel {
            weights: vec![0.0; train.dimension()],
            bias: 0.0,
        };
        let mut params = ClassicalHyperparams::new(Algorithm::Svc);
        let mut previous = objective(&zero);
        for epochs in [30, 300] {
            params.svc_epochs = epochs;
            let model = train_classifier(&train, &params).unwrap();
            let value = objective(linear_parts(&model));
            assert!(
                value < previous,
                "objective rose from {previous} to {value} at {epochs} epochs"
            );
            previous = value;
        }
    }

    #[test]
    fn svc_regularization_shrinks_weights() {
        let (train, _) = synthetic_features(80, 0.9, 0.75, 41);
        let norm = |c: f64| {
            let mut params = ClassicalHyperparams::new(Algorithm::Svc);
            params.svc_c = c;
            let model = train_classifier(&train, &params).unwrap();
            linear_parts(&model)
                .weights
                .iter()
                .map(|w| w * w)
                .sum::<f64>()
                .sqrt()
        };
        // smaller C means a heavier penalty, hence a smaller weight norm
        assert!(norm(0.01) < norm(100.0));
    }

    #[test]
    fn single_feature_logistic_matches_scalar_reference() {
        // one binary feature, labels equal the feature: a scalar GD loop
        // over (w, b) must reproduce the trained parameters exactly
        let docs: Vec<Vec<String>> = vec![
            vec!["হ্যাঁ".into()],
            vec!["হ্যাঁ".into()],
            vec![],
            vec![],
        ];
        let vocab = Vocabulary::build(&docs, 1).unwrap();
        let rows: Vec<_> = docs.iter().map(|d| vectorize(d, &vocab)).collect();
        let features = FeatureMatrix::new(rows, vec![1, 1, 0, 0]).unwrap();
        let params = ClassicalHyperparams::new(Algorithm::Lr);
        let model = train_classifier(&features, &params).unwrap();

        let (mut w, mut b) = (0.0f64, 0.0f64);
        let x = [1.0, 1.0, 0.0, 0.0];
        let y = [1.0, 1.0, 0.0, 0.0];
        for _ in 0..params.lr_epochs {
            let mut gw = 0.0;
            let mut gb = 0.0;
            for (xi, yi) in x.iter().zip(&y) {
                let r = sigmoid(w * xi + b) - yi;
                gw += r * xi;
                gb += r;
            }
            w -= params.lr_learning_rate * (gw / 4.0 + params.lr_l2 * w);
            b -= params.lr_learning_rate * (gb / 4.0);
        }
        let trained = linear_parts(&model);
        assert_eq!(trained.weights[0].to_bits(), w.to_bits());
        assert_eq!(trained.bias.to_bits(), b.to_bits());
    }
}
