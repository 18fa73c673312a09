//! Central finite-difference verification of the analytic gradients.
//!
//! The whole objective is smooth (tanh, sigmoid, tanh-form GELU, layer norm,
//! softmax), so central differences converge at O(epsilon^2) and a correct
//! backward pass lands orders of magnitude below the 1e-4 review threshold.

use super::rnn::RnnModel;
use super::train::ModelKind;
use super::transformer::TransformerModel;
use super::{bce_loss, NeuralError, PaddedBatch};
use crate::rng::Lcg64;

/// Coordinates sampled per check; the whole parameter vector is used when the
/// model is smaller than this.
pub const GRAD_CHECK_COORDS: usize = 200;

enum CheckedModel {
    Rnn(RnnModel),
    Transformer(TransformerModel),
}

impl CheckedModel {
    fn params_mut(&mut self) -> &mut Vec<f64> {
        match self {
            CheckedModel::Rnn(m) => &mut m.params,
            CheckedModel::Transformer(m) => &mut m.params,
        }
    }

    fn num_params(&self) -> usize {
        match self {
            CheckedModel::Rnn(m) => m.num_params(),
            CheckedModel::Transformer(m) => m.num_params(),
        }
    }

    fn forward(&self, batch: &PaddedBatch) -> Result<Vec<f64>, NeuralError> {
        match self {
            CheckedModel::Rnn(m) => m.forward(batch),
            CheckedModel::Transformer(m) => m.forward(batch),
        }
    }

    fn forward_backward(
        &self,
        batch: &PaddedBatch,
        labels: &[u8],
    ) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
        match self {
            CheckedModel::Rnn(m) => m.forward_backward(batch, labels),
            CheckedModel::Transformer(m) => m.forward_backward(batch, labels),
        }
    }
}

/// Builds a freshly initialized model of the requested kind, draws random
/// labels, and compares the analytic gradient of the mean clipped BCE against
/// central finite differences on a seeded random subset of at least
/// `GRAD_CHECK_COORDS` coordinates (all of them for small models).
///
/// Returns the maximum relative error
/// `|g_a − g_n| / max(|g_a|, |g_n|, 1e-8)` over the sampled coordinates.
pub fn grad_check(
    kind: ModelKind,
    batch: &PaddedBatch,
    epsilon: f64,
    seed: u64,
) -> Result<f64, NeuralError> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(NeuralError::InvalidParameter(
            "epsilon must be positive and finite".into(),
        ));
    }
    if batch.batch_size() == 0 {
        return Err(NeuralError::EmptyBatch);
    }
    let mut rng = Lcg64::new(seed);
    let labels: Vec<u8> = (0..batch.batch_size()).map(|_| rng.below(2) as u8).collect();

    let vocab = 1 + batch
        .token_ids
        .iter()
        .flat_map(|ids| ids.iter().copied())
        .max()
        .unwrap_or(0);
    let mut model = match kind {
        ModelKind::Rnn => CheckedModel::Rnn(RnnModel::with_default_dims(vocab, &mut rng)),
        ModelKind::Transformer => CheckedModel::Transformer(TransformerModel::with_default_dims(
            vocab,
            batch.padded_len().max(2),
            &mut rng,
        )?),
    };

    let (_, analytic) = model.forward_backward(batch, &labels)?;

    let total = model.num_params();
    let coords = if total <= GRAD_CHECK_COORDS {
        (0..total).collect()
    } else {
        rng.sample_indices(total, GRAD_CHECK_COORDS)
    };

    let mut worst = 0.0f64;
    for c in coords {
        let original = model.params_mut()[c];
        model.params_mut()[c] = original + epsilon;
        let plus = bce_loss(&model.forward(batch)?, &labels)?;
        model.params_mut()[c] = original - epsilon;
        let minus = bce_loss(&model.forward(batch)?, &labels)?;
        model.params_mut()[c] = original;

        let numeric = (plus - minus) / (2.0 * epsilon);
        let denom = analytic[c].abs().max(numeric.abs()).max(1e-8);
        let rel = (analytic[c] - numeric).abs() / denom;
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::random_batch;
    use super::*;

    #[test]
    fn recurrent_gradients_match_finite_differences() {
        let mut rng = Lcg64::new(41);
        let (batch, _) = random_batch(&mut rng, 4, 9, 24, false);
        let err = grad_check(ModelKind::Rnn, &batch, 1e-5, 17).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn transformer_gradients_match_finite_differences() {
        let mut rng = Lcg64::new(42);
        let (batch, _) = random_batch(&mut rng, 4, 9, 24, true);
        let err = grad_check(ModelKind::Transformer, &batch, 1e-5, 18).unwrap();
        assert!(err < 1e-4, "max relative error {err}");
    }

    #[test]
    fn zero_epsilon_is_rejected() {
        let mut rng = Lcg64::new(43);
        let (batch, _) = random_batch(&mut rng, 2, 5, 10, false);
        assert!(matches!(
            grad_check(ModelKind::Rnn, &batch, 0.0, 1),
            Err(NeuralError::InvalidParameter(_))
        ));
    }

    #[test]
    fn check_is_deterministic_for_a_fixed_seed() {
        let mut rng = Lcg64::new(44);
        let (batch, _) = random_batch(&mut rng, 3, 6, 16, false);
        let a = grad_check(ModelKind::Rnn, &batch, 1e-5, 5).unwrap();
        let b = grad_check(ModelKind::Rnn, &batch, 1e-5, 5).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
