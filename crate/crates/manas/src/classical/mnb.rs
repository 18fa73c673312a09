//! Multinomial Naive Bayes with Laplace smoothing.

use super::ClassicalHyperparams;
use crate::vectorize::{CountVector, FeatureMatrix};

/// Trained Naive Bayes parameters, stored in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct MnbModel {
    /// ln P(class c) from empirical document frequencies.
    pub log_prior: [f64; 2],
    /// Per class: ln P(token | class) with Laplace smoothing, one entry per
    /// vocabulary index.
    pub log_likelihood: [Vec<f64>; 2],
}

impl MnbModel {
    pub fn dimension(&self) -> usize {
        self.log_likelihood[0].len()
    }

    /// Unnormalized log joint ln P(class) + Σ count·ln P(token|class).
    fn log_joint(&self, vector: &CountVector, class: usize) -> f64 {
        let mut score = self.log_prior[class];
        for (index, count) in vector.entries() {
            score += f64::from(count) * self.log_likelihood[class][index];
        }
        score
    }

    /// Posterior P(class 1 | vector), normalized over both classes.
    pub fn proba(&self, vector: &CountVector) -> f64 {
        let j0 = self.log_joint(vector, 0);
        let j1 = self.log_joint(vector, 1);
        // log-sum-exp against the larger joint keeps the exponent bounded
        let m = j0.max(j1);
        let e0 = (j0 - m).exp();
        let e1 = (j1 - m).exp();
        e1 / (e0 + e1)
    }
}

pub fn train(features: &FeatureMatrix, params: &ClassicalHyperparams) -> MnbModel {
    let alpha = params.mnb_alpha;
    let dimension = features.dimension();
    let n = features.len() as f64;

    let mut doc_counts = [0usize; 2];
    let mut token_counts = [vec![0u64; dimension], vec![0u64; dimension]];
    let mut token_totals = [0u64; 2];
    for (row, &label) in features.rows.iter().zip(&features.labels) {
        let class = label as usize;
        doc_counts[class] += 1;
        for (index, count) in row.entries() {
            token_counts[class][index] += u64::from(count);
            token_totals[class] += u64::from(count);
        }
    }

    let log_prior = [
        (doc_counts[0] as f64 / n).ln(),
        (doc_counts[1] as f64 / n).ln(),
    ];
    let log_likelihood = [0, 1].map(|class| {
        let denominator = token_totals[class] as f64 + alpha * dimension as f64;
        token_counts[class]
            .iter()
            .map(|&c| ((c as f64 + alpha) / denominator).ln())
            .collect()
    });

    MnbModel {
        log_prior,
        log_likelihood,
    }
}
