//! Single-layer Elman RNN: embedding, tanh recurrence, and a logistic
//! readout of the hidden state at the last real token.
//!
//! The recurrence visits real positions only, so the hidden state freezes at
//! each sequence's last token and batch-level padding cannot change any
//! output bit.

use super::loss::bce_logit_grads;
use super::{NeuralError, PaddedBatch};
use crate::classical::sigmoid;
use crate::rng::Lcg64;

/// Flat-parameter Elman RNN.
///
/// Parameter layout (row-major):
/// embedding V×d, input weights h×d, recurrent weights h×h, hidden bias h,
/// output weights h, output bias 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RnnModel {
    pub params: Vec<f64>,
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
}

struct Layout {
    emb: usize,
    w_xh: usize,
    w_hh: usize,
    b_h: usize,
    w_o: usize,
    b_o: usize,
    total: usize,
}

impl RnnModel {
    fn layout(vocab_size: usize, embed_dim: usize, hidden_dim: usize) -> Layout {
        let emb = 0;
        let w_xh = emb + vocab_size * embed_dim;
        let w_hh = w_xh + hidden_dim * embed_dim;
        let b_h = w_hh + hidden_dim * hidden_dim;
        let w_o = b_h + hidden_dim;
        let b_o = w_o + hidden_dim;
        Layout {
            emb,
            w_xh,
            w_hh,
            b_h,
            w_o,
            b_o,
            total: b_o + 1,
        }
    }

    /// Fresh model with all parameters drawn uniform(−0.1, 0.1) from `rng`.
    pub fn new(vocab_size: usize, embed_dim: usize, hidden_dim: usize, rng: &mut Lcg64) -> RnnModel {
        let layout = Self::layout(vocab_size, embed_dim, hidden_dim);
        let params = (0..layout.total).map(|_| rng.uniform(-0.1, 0.1)).collect();
        RnnModel {
            params,
            vocab_size,
            embed_dim,
            hidden_dim,
        }
    }

    /// Study-scale dimensions: d = 64, h = 64.
    pub fn with_default_dims(vocab_size: usize, rng: &mut Lcg64) -> RnnModel {
        RnnModel::new(vocab_size, 64, 64, rng)
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn validate(&self, batch: &PaddedBatch) -> Result<(), NeuralError> {
        if batch.batch_size() == 0 {
            return Err(NeuralError::EmptyBatch);
        }
        for ids in &batch.token_ids {
            for &id in ids {
                if id >= self.vocab_size {
                    return Err(NeuralError::IndexOutOfVocabulary {
                        id,
                        vocab: self.vocab_size,
                    });
                }
            }
        }
        Ok(())
    }

    /// Runs one sequence, returning the per-step hidden states and the
    /// class-1 probability.
    fn run_sequence(&self, ids: &[usize], len: usize) -> (Vec<Vec<f64>>, f64) {
        let (d, h) = (self.embed_dim, self.hidden_dim);
        let layout = Self::layout(self.vocab_size, d, h);
        let p = &self.params;

        let mut states: Vec<Vec<f64>> = Vec::with_capacity(len);
        let mut h_prev = vec![0.0; h];
        for &id in &ids[..len] {
            let x = &p[layout.emb + id * d..layout.emb + (id + 1) * d];
            let mut h_new = vec![0.0; h];
            for j in 0..h {
                let mut pre = p[layout.b_h + j];
                let wx = &p[layout.w_xh + j * d..layout.w_xh + (j + 1) * d];
                for k in 0..d {
                    pre += wx[k] * x[k];
                }
                let wh = &p[layout.w_hh + j * h..layout.w_hh + (j + 1) * h];
                for k in 0..h {
                    pre += wh[k] * h_prev[k];
                }
                h_new[j] = pre.tanh();
            }
            states.push(h_new.clone());
            h_prev = h_new;
        }

        let mut z = p[layout.b_o];
        for j in 0..h {
            z += p[layout.w_o + j] * h_prev[j];
        }
        (states, sigmoid(z))
    }

    /// Class-1 probabilities for every sequence in the batch.
    pub fn forward(&self, batch: &PaddedBatch) -> Result<Vec<f64>, NeuralError> {
        self.validate(batch)?;
        Ok(batch
            .token_ids
            .iter()
            .zip(&batch.lengths)
            .map(|(ids, &len)| self.run_sequence(ids, len).1)
            .collect())
    }

    /// Probabilities plus the gradient of the mean clipped BCE over the
    /// batch, as one flat vector aligned with `params`.
    pub fn forward_backward(
        &self,
        batch: &PaddedBatch,
        labels: &[u8],
    ) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
        self.validate(batch)?;
        if labels.len() != batch.batch_size() {
            return Err(NeuralError::LengthMismatch {
                left: batch.batch_size(),
                right: labels.len(),
            });
        }
        let (d, h) = (self.embed_dim, self.hidden_dim);
        let layout = Self::layout(self.vocab_size, d, h);
        let p = &self.params;

        let runs: Vec<(Vec<Vec<f64>>, f64)> = batch
            .token_ids
            .iter()
            .zip(&batch.lengths)
            .map(|(ids, &len)| self.run_sequence(ids, len))
            .collect();
        let probs: Vec<f64> = runs.iter().map(|(_, prob)| *prob).collect();
        let logit_grads = bce_logit_grads(&probs, labels);

        let mut grads = vec![0.0; layout.total];
        for (seq, ((states, _), &dz)) in runs.iter().zip(&logit_grads).enumerate() {
            if dz == 0.0 {
                continue;
            }
            let ids = &batch.token_ids[seq];
            let len = batch.lengths[seq];
            let h_last = &states[len - 1];

            grads[layout.b_o] += dz;
            let mut dh: Vec<f64> = (0..h)
                .map(|j| {
                    grads[layout.w_o + j] += dz * h_last[j];
                    dz * p[layout.w_o + j]
                })
                .collect();

            for t in (0..len).rev() {
                let h_t = &states[t];
                let x = &p[layout.emb + ids[t] * d..layout.emb + (ids[t] + 1) * d];
                let mut dh_prev = vec![0.0; h];
                for j in 0..h {
                    let dpre = dh[j] * (1.0 - h_t[j] * h_t[j]);
                    if dpre == 0.0 {
                        continue;
                    }
                    grads[layout.b_h + j] += dpre;
                    let wx_row = layout.w_xh + j * d;
                    let emb_row = layout.emb + ids[t] * d;
                    for k in 0..d {
                        grads[wx_row + k] += dpre * x[k];
                        grads[emb_row + k] += dpre * p[wx_row + k];
                    }
                    let wh_row = layout.w_hh + j * h;
                    if t > 0 {
                        let h_prev = &states[t - 1];
                        for k in 0..h {
                            grads[wh_row + k] += dpre * h_prev[k];
                            dh_prev[k] += dpre * p[wh_row + k];
                        }
                    }
                }
                dh = dh_prev;
            }
        }
        Ok((probs, grads))
    }
}
