//! Clipped binary cross-entropy, the training objective of both models.

use super::NeuralError;

/// Probabilities are clamped to [BCE_CLIP, 1−BCE_CLIP] before the logarithm.
/// Training uses a looser clip than evaluation-time log loss because the
/// gradient near saturation is what matters here, not the exact tail value.
pub const BCE_CLIP: f64 = 1e-7;

/// −(1/N) Σ [y·ln p + (1−y)·ln(1−p)] over clipped probabilities.
pub fn bce_loss(probs: &[f64], labels: &[u8]) -> Result<f64, NeuralError> {
    if probs.len() != labels.len() {
        return Err(NeuralError::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if probs.is_empty() {
        return Err(NeuralError::EmptyBatch);
    }
    let mut sum = 0.0;
    for (&p, &y) in probs.iter().zip(labels) {
        let p = p.clamp(BCE_CLIP, 1.0 - BCE_CLIP);
        sum += if y == 1 { p.ln() } else { (1.0 - p).ln() };
    }
    Ok(-sum / probs.len() as f64)
}

/// Gradient of the mean clipped BCE with respect to each pre-sigmoid logit:
/// (p − y)/N where the clip is inactive, exactly 0 where it clamps.
pub(super) fn bce_logit_grads(probs: &[f64], labels: &[u8]) -> Vec<f64> {
    let n = probs.len() as f64;
    probs
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            if p <= BCE_CLIP || p >= 1.0 - BCE_CLIP {
                0.0
            } else {
                (p - f64::from(y)) / n
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Lcg64;

    const TOL: f64 = 1e-12;

    #[test]
    fn closed_forms() {
        let loss = bce_loss(&[0.5], &[1]).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < TOL);

        let loss = bce_loss(&[1.0 - 1e-7], &[1]).unwrap();
        assert!((loss - 1e-7).abs() < 1e-10);

        // clipping makes exact 1.0 equivalent to 1 − 1e-7
        let clipped = bce_loss(&[1.0], &[1]).unwrap();
        let near = bce_loss(&[1.0 - 1e-7], &[1]).unwrap();
        assert_eq!(clipped.to_bits(), near.to_bits());
    }

    #[test]
    fn matches_summation_oracle() {
        let mut rng = Lcg64::new(3);
        for _ in 0..200 {
            let n = 1 + rng.below(50);
            let probs: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let labels: Vec<u8> = (0..n).map(|_| rng.below(2) as u8).collect();
            let loss = bce_loss(&probs, &labels).unwrap();
            let mut oracle = 0.0;
            for (&p, &y) in probs.iter().zip(&labels) {
                let p = p.clamp(BCE_CLIP, 1.0 - BCE_CLIP);
                oracle -= f64::from(y) * p.ln() + (1.0 - f64::from(y)) * (1.0 - p).ln();
            }
            oracle /= n as f64;
            assert!((loss - oracle).abs() < TOL);
            assert!(loss >= 0.0);
        }
    }

    #[test]
    fn length_mismatch_and_empty_are_rejected() {
        assert!(matches!(
            bce_loss(&[0.5], &[1, 0]),
            Err(NeuralError::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(bce_loss(&[], &[]), Err(NeuralError::EmptyBatch)));
    }

    #[test]
    fn logit_gradient_matches_finite_differences_through_the_sigmoid() {
        let sigmoid = |z: f64| 1.0 / (1.0 + (-z).exp());
        let mut rng = Lcg64::new(9);
        let z: Vec<f64> = (0..10).map(|_| rng.uniform(-3.0, 3.0)).collect();
        let labels: Vec<u8> = (0..10).map(|_| rng.below(2) as u8).collect();
        let probs: Vec<f64> = z.iter().map(|&v| sigmoid(v)).collect();
        let grads = bce_logit_grads(&probs, &labels);

        let eps = 1e-6;
        for i in 0..z.len() {
            let mut z_plus = z.clone();
            z_plus[i] += eps;
            let mut z_minus = z.clone();
            z_minus[i] -= eps;
            let loss_at = |zs: &[f64]| {
                let ps: Vec<f64> = zs.iter().map(|&v| sigmoid(v)).collect();
                bce_loss(&ps, &labels).unwrap()
            };
            let numeric = (loss_at(&z_plus) - loss_at(&z_minus)) / (2.0 * eps);
            assert!(
                (grads[i] - numeric).abs() < 1e-8,
                "coord {i}: analytic {} numeric {numeric}",
                grads[i]
            );
        }
    }

    #[test]
    fn saturated_probabilities_get_zero_gradient() {
        let grads = bce_logit_grads(&[1e-9, 1.0 - 1e-9, 0.5], &[1, 0, 1]);
        assert_eq!(grads[0], 0.0);
        assert_eq!(grads[1], 0.0);
        assert!(grads[2] != 0.0);
    }
}
