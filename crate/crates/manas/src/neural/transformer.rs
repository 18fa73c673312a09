//! Tiny BERT-style encoder trained from scratch: token + position + segment
//! embeddings, masked multi-head scaled dot-product attention with residual
//! connections and layer normalization, position-wise feed-forward blocks,
//! and a logistic classifier on the CLS position.
//!
//! Attention scores at masked key positions are excluded before the softmax,
//! so their weights are exactly zero and batch-level padding cannot change
//! any real output. Pad positions still flow through the position-wise
//! blocks, but nothing real ever reads them.

use super::loss::bce_logit_grads;
use super::{NeuralError, PaddedBatch};
use crate::classical::sigmoid;
use crate::rng::Lcg64;

const LN_EPSILON: f64 = 1e-5;
const GELU_C: f64 = 0.797_884_560_802_865_4; // sqrt(2/pi)
const GELU_A: f64 = 0.044715;

/// Smooth tanh-form GELU; differentiable everywhere, which keeps central
/// finite differences honest during gradient checks.
fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + (GELU_C * (x + GELU_A * x * x * x)).tanh())
}

fn gelu_derivative(x: f64) -> f64 {
    let u = GELU_C * (x + GELU_A * x * x * x);
    let t = u.tanh();
    0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * GELU_C * (1.0 + 3.0 * GELU_A * x * x)
}

/// y = w·x for row-major w (rows×cols).
fn matvec(w: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; rows];
    for (r, out) in y.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        let mut acc = 0.0;
        for c in 0..cols {
            acc += row[c] * x[c];
        }
        *out = acc;
    }
    y
}

/// dx += wᵀ·dy for row-major w (rows×cols).
fn matvec_transpose_add(w: &[f64], rows: usize, cols: usize, dy: &[f64], dx: &mut [f64]) {
    for r in 0..rows {
        let row = &w[r * cols..(r + 1) * cols];
        let g = dy[r];
        if g == 0.0 {
            continue;
        }
        for c in 0..cols {
            dx[c] += g * row[c];
        }
    }
}

/// dw += dy ⊗ x for row-major dw (rows×cols).
fn outer_add(dw: &mut [f64], dy: &[f64], x: &[f64]) {
    let cols = x.len();
    for (r, &g) in dy.iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let row = &mut dw[r * cols..(r + 1) * cols];
        for c in 0..cols {
            row[c] += g * x[c];
        }
    }
}

/// Per-position layer norm cache: normalized values and inverse std-dev.
struct LnCache {
    xhat: Vec<Vec<f64>>,
    inv_std: Vec<f64>,
}

fn layer_norm(v: &[f64], scale: &[f64], shift: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let d = v.len() as f64;
    let mean = v.iter().sum::<f64>() / d;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / d;
    let inv_std = 1.0 / (var + LN_EPSILON).sqrt();
    let xhat: Vec<f64> = v.iter().map(|x| (x - mean) * inv_std).collect();
    let out = xhat
        .iter()
        .zip(scale.iter().zip(shift))
        .map(|(&h, (&a, &b))| a * h + b)
        .collect();
    (out, xhat, inv_std)
}

/// Backward through layer norm; accumulates dscale/dshift, returns dv.
fn layer_norm_backward(
    dout: &[f64],
    xhat: &[f64],
    inv_std: f64,
    scale: &[f64],
    dscale: &mut [f64],
    dshift: &mut [f64],
) -> Vec<f64> {
    let d = dout.len() as f64;
    let mut dxhat = vec![0.0; dout.len()];
    let mut mean_dxhat = 0.0;
    let mut mean_dxhat_xhat = 0.0;
    for i in 0..dout.len() {
        dscale[i] += dout[i] * xhat[i];
        dshift[i] += dout[i];
        dxhat[i] = dout[i] * scale[i];
        mean_dxhat += dxhat[i];
        mean_dxhat_xhat += dxhat[i] * xhat[i];
    }
    mean_dxhat /= d;
    mean_dxhat_xhat /= d;
    dxhat
        .iter()
        .zip(xhat)
        .map(|(&dh, &h)| inv_std * (dh - mean_dxhat - h * mean_dxhat_xhat))
        .collect()
}

/// Offsets of one encoder layer inside the flat parameter vector.
#[derive(Clone, Copy)]
struct LayerOffsets {
    w_q: usize,
    w_k: usize,
    w_v: usize,
    w_o: usize,
    ln1_scale: usize,
    ln1_shift: usize,
    w1: usize,
    w2: usize,
    ln2_scale: usize,
    ln2_shift: usize,
}

/// One sequence's attention weights, indexed `[layer][head][query][key]`.
pub type AttentionTensor = Vec<Vec<Vec<Vec<f64>>>>;

/// Flat-parameter transformer encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformerModel {
    pub params: Vec<f64>,
    pub vocab_size: usize,
    pub max_len: usize,
    pub model_dim: usize,
    pub ffn_dim: usize,
    pub heads: usize,
    pub layers: usize,
}

/// Everything the backward pass needs from one sequence's forward run.
struct SequenceCache {
    /// Per layer: input positions L×d.
    inputs: Vec<Vec<Vec<f64>>>,
    q: Vec<Vec<Vec<f64>>>,
    k: Vec<Vec<Vec<f64>>>,
    v: Vec<Vec<Vec<f64>>>,
    /// Per layer, per head: L×L attention weights (exactly 0 on masked keys).
    alpha: AttentionTensor,
    ctx: Vec<Vec<Vec<f64>>>,
    ln1: Vec<LnCache>,
    y: Vec<Vec<Vec<f64>>>,
    ffn_pre: Vec<Vec<Vec<f64>>>,
    ffn_act: Vec<Vec<Vec<f64>>>,
    ln2: Vec<LnCache>,
    /// Final layer output, L×d.
    out: Vec<Vec<f64>>,
    prob: f64,
}

impl TransformerModel {
    /// Fresh model. Weights and embeddings are drawn uniform(−0.1, 0.1) from
    /// `rng` in layout order; layer-norm scales start at 1 and shifts at 0 so
    /// early layers pass signal through.
    pub fn new(
        vocab_size: usize,
        max_len: usize,
        model_dim: usize,
        ffn_dim: usize,
        heads: usize,
        layers: usize,
        rng: &mut Lcg64,
    ) -> Result<TransformerModel, NeuralError> {
        if model_dim == 0 || !model_dim.is_multiple_of(heads) {
            return Err(NeuralError::InvalidParameter(format!(
                "model_dim {model_dim} must be a positive multiple of heads {heads}"
            )));
        }
        if max_len < 2 {
            return Err(NeuralError::InvalidParameter(
                "max_len must fit at least CLS and SEP".into(),
            ));
        }
        let mut model = TransformerModel {
            params: Vec::new(),
            vocab_size,
            max_len,
            model_dim,
            ffn_dim,
            heads,
            layers,
        };
        let total = model.classifier_bias_offset() + 1;
        let mut params = vec![0.0; total];
        let (d, f) = (model_dim, ffn_dim);
        let mut cursor = 0usize;
        let draw = |params: &mut Vec<f64>, cursor: &mut usize, n: usize, rng: &mut Lcg64| {
            for i in 0..n {
                params[*cursor + i] = rng.uniform(-0.1, 0.1);
            }
            *cursor += n;
        };
        // embeddings
        draw(&mut params, &mut cursor, (vocab_size + max_len + 2) * d, rng);
        for _ in 0..layers {
            draw(&mut params, &mut cursor, 4 * d * d, rng); // w_q w_k w_v w_o
            for i in 0..d {
                params[cursor + i] = 1.0; // ln1 scale
            }
            cursor += 2 * d; // ln1 scale + shift (shift stays 0)
            draw(&mut params, &mut cursor, f * d + d * f, rng); // w1 w2
            for i in 0..d {
                params[cursor + i] = 1.0; // ln2 scale
            }
            cursor += 2 * d;
        }
        draw(&mut params, &mut cursor, d + 1, rng); // classifier
        debug_assert_eq!(cursor, total);
        model.params = params;
        Ok(model)
    }

    /// Study-scale dimensions: 2 layers, 2 heads, d = 64, f = 128.
    pub fn with_default_dims(
        vocab_size: usize,
        max_len: usize,
        rng: &mut Lcg64,
    ) -> Result<TransformerModel, NeuralError> {
        TransformerModel::new(vocab_size, max_len, 64, 128, 2, 2, rng)
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    fn token_offset(&self) -> usize {
        0
    }

    fn position_offset(&self) -> usize {
        self.vocab_size * self.model_dim
    }

    fn segment_offset(&self) -> usize {
        self.position_offset() + self.max_len * self.model_dim
    }

    fn layers_offset(&self) -> usize {
        self.segment_offset() + 2 * self.model_dim
    }

    fn layer_stride(&self) -> usize {
        let (d, f) = (self.model_dim, self.ffn_dim);
        4 * d * d + 2 * d + f * d + d * f + 2 * d
    }

    fn layer_offsets(&self, layer: usize) -> LayerOffsets {
        let (d, f) = (self.model_dim, self.ffn_dim);
        let base = self.layers_offset() + layer * self.layer_stride();
        LayerOffsets {
            w_q: base,
            w_k: base + d * d,
            w_v: base + 2 * d * d,
            w_o: base + 3 * d * d,
            ln1_scale: base + 4 * d * d,
            ln1_shift: base + 4 * d * d + d,
            w1: base + 4 * d * d + 2 * d,
            w2: base + 4 * d * d + 2 * d + f * d,
            ln2_scale: base + 4 * d * d + 2 * d + f * d + d * f,
            ln2_shift: base + 4 * d * d + 2 * d + f * d + d * f + d,
        }
    }

    fn classifier_offset(&self) -> usize {
        self.layers_offset() + self.layers * self.layer_stride()
    }

    fn classifier_bias_offset(&self) -> usize {
        self.classifier_offset() + self.model_dim
    }

    fn validate(&self, batch: &PaddedBatch) -> Result<(), NeuralError> {
        if batch.batch_size() == 0 {
            return Err(NeuralError::EmptyBatch);
        }
        if batch.padded_len() > self.max_len {
            return Err(NeuralError::SequenceTooLong {
                len: batch.padded_len(),
                max: self.max_len,
            });
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

    /// Full forward pass over one sequence, caching every intermediate.
    #[allow(clippy::needless_range_loop)]
    fn run_sequence(&self, ids: &[usize], mask: &[u8]) -> SequenceCache {
        let (d, f, heads, layers) = (self.model_dim, self.ffn_dim, self.heads, self.layers);
        let d_head = d / heads;
        let scale_factor = 1.0 / (d_head as f64).sqrt();
        let len = ids.len();
        let p = &self.params;

        // input embeddings: token + position + segment (all segment ids 0)
        let seg_row = &p[self.segment_offset()..self.segment_offset() + d];
        let mut x: Vec<Vec<f64>> = (0..len)
            .map(|i| {
                let tok = &p[self.token_offset() + ids[i] * d..self.token_offset() + (ids[i] + 1) * d];
                let pos = &p[self.position_offset() + i * d..self.position_offset() + (i + 1) * d];
                (0..d).map(|c| tok[c] + pos[c] + seg_row[c]).collect()
            })
            .collect();

        let mut cache = SequenceCache {
            inputs: Vec::with_capacity(layers),
            q: Vec::with_capacity(layers),
            k: Vec::with_capacity(layers),
            v: Vec::with_capacity(layers),
            alpha: Vec::with_capacity(layers),
            ctx: Vec::with_capacity(layers),
            ln1: Vec::with_capacity(layers),
            y: Vec::with_capacity(layers),
            ffn_pre: Vec::with_capacity(layers),
            ffn_act: Vec::with_capacity(layers),
            ln2: Vec::with_capacity(layers),
            out: Vec::new(),
            prob: 0.0,
        };

        for layer in 0..layers {
            let off = self.layer_offsets(layer);
            let q: Vec<Vec<f64>> = x.iter().map(|xi| matvec(&p[off.w_q..], d, d, xi)).collect();
            let k: Vec<Vec<f64>> = x.iter().map(|xi| matvec(&p[off.w_k..], d, d, xi)).collect();
            let v: Vec<Vec<f64>> = x.iter().map(|xi| matvec(&p[off.w_v..], d, d, xi)).collect();

            // masked scaled dot-product attention per head
            let mut alpha: Vec<Vec<Vec<f64>>> =
                vec![vec![vec![0.0; len]; len]; heads];
            let mut ctx: Vec<Vec<f64>> = vec![vec![0.0; d]; len];
            for h in 0..heads {
                let o = h * d_head;
                for i in 0..len {
                    let qi = &q[i][o..o + d_head];
                    let mut max_score = f64::NEG_INFINITY;
                    let mut scores = vec![0.0; len];
                    for j in 0..len {
                        if mask[j] == 0 {
                            continue;
                        }
                        let kj = &k[j][o..o + d_head];
                        let mut s = 0.0;
                        for c in 0..d_head {
                            s += qi[c] * kj[c];
                        }
                        s *= scale_factor;
                        scores[j] = s;
                        if s > max_score {
                            max_score = s;
                        }
                    }
                    let mut denom = 0.0;
                    for j in 0..len {
                        if mask[j] == 1 {
                            let e = (scores[j] - max_score).exp();
                            alpha[h][i][j] = e;
                            denom += e;
                        }
                    }
                    for j in 0..len {
                        if mask[j] == 1 {
                            alpha[h][i][j] /= denom;
                            let w = alpha[h][i][j];
                            let vj = &v[j][o..o + d_head];
                            for c in 0..d_head {
                                ctx[i][o + c] += w * vj[c];
                            }
                        }
                    }
                }
            }

            // projection, residual, first layer norm
            let ln1_scale = &p[off.ln1_scale..off.ln1_scale + d];
            let ln1_shift = &p[off.ln1_shift..off.ln1_shift + d];
            let mut ln1 = LnCache {
                xhat: Vec::with_capacity(len),
                inv_std: Vec::with_capacity(len),
            };
            let mut y: Vec<Vec<f64>> = Vec::with_capacity(len);
            for i in 0..len {
                let attn_out = matvec(&p[off.w_o..], d, d, &ctx[i]);
                let r1: Vec<f64> = (0..d).map(|c| x[i][c] + attn_out[c]).collect();
                let (out, xhat, inv_std) = layer_norm(&r1, ln1_scale, ln1_shift);
                ln1.xhat.push(xhat);
                ln1.inv_std.push(inv_std);
                y.push(out);
            }

            // position-wise FFN, residual, second layer norm
            let ln2_scale = &p[off.ln2_scale..off.ln2_scale + d];
            let ln2_shift = &p[off.ln2_shift..off.ln2_shift + d];
            let mut ln2 = LnCache {
                xhat: Vec::with_capacity(len),
                inv_std: Vec::with_capacity(len),
            };
            let mut ffn_pre: Vec<Vec<f64>> = Vec::with_capacity(len);
            let mut ffn_act: Vec<Vec<f64>> = Vec::with_capacity(len);
            let mut next: Vec<Vec<f64>> = Vec::with_capacity(len);
            for yi in &y {
                let a = matvec(&p[off.w1..], f, d, yi);
                let g: Vec<f64> = a.iter().map(|&u| gelu(u)).collect();
                let ffn_out = matvec(&p[off.w2..], d, f, &g);
                let r2: Vec<f64> = (0..d).map(|c| yi[c] + ffn_out[c]).collect();
                let (out, xhat, inv_std) = layer_norm(&r2, ln2_scale, ln2_shift);
                ffn_pre.push(a);
                ffn_act.push(g);
                ln2.xhat.push(xhat);
                ln2.inv_std.push(inv_std);
                next.push(out);
            }

            cache.inputs.push(std::mem::replace(&mut x, next));
            cache.q.push(q);
            cache.k.push(k);
            cache.v.push(v);
            cache.alpha.push(alpha);
            cache.ctx.push(ctx);
            cache.ln1.push(ln1);
            cache.y.push(y);
            cache.ffn_pre.push(ffn_pre);
            cache.ffn_act.push(ffn_act);
            cache.ln2.push(ln2);
        }

        let w_c = &p[self.classifier_offset()..self.classifier_offset() + d];
        let mut z = p[self.classifier_bias_offset()];
        for c in 0..d {
            z += w_c[c] * x[0][c];
        }
        cache.prob = sigmoid(z);
        cache.out = x;
        cache
    }

    /// Class-1 probabilities for every sequence in the batch.
    pub fn forward(&self, batch: &PaddedBatch) -> Result<Vec<f64>, NeuralError> {
        self.validate(batch)?;
        Ok(batch
            .token_ids
            .iter()
            .zip(&batch.attention_mask)
            .map(|(ids, mask)| self.run_sequence(ids, mask).prob)
            .collect())
    }

    /// Attention weights for inspection: `[sequence][layer][head][query][key]`.
    pub fn attention_weights(
        &self,
        batch: &PaddedBatch,
    ) -> Result<Vec<AttentionTensor>, NeuralError> {
        self.validate(batch)?;
        Ok(batch
            .token_ids
            .iter()
            .zip(&batch.attention_mask)
            .map(|(ids, mask)| self.run_sequence(ids, mask).alpha)
            .collect())
    }

    /// Probabilities plus the flat gradient of the mean clipped BCE.
    #[allow(clippy::needless_range_loop)]
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
        let (d, f, heads, layers) = (self.model_dim, self.ffn_dim, self.heads, self.layers);
        let d_head = d / heads;
        let scale_factor = 1.0 / (d_head as f64).sqrt();
        let p = &self.params;
        let mut grads = vec![0.0; p.len()];

        let caches: Vec<SequenceCache> = batch
            .token_ids
            .iter()
            .zip(&batch.attention_mask)
            .map(|(ids, mask)| self.run_sequence(ids, mask))
            .collect();
        let probs: Vec<f64> = caches.iter().map(|c| c.prob).collect();
        let logit_grads = bce_logit_grads(&probs, labels);

        for (seq, (cache, &dz)) in caches.iter().zip(&logit_grads).enumerate() {
            if dz == 0.0 {
                continue;
            }
            let ids = &batch.token_ids[seq];
            let mask = &batch.attention_mask[seq];
            let len = ids.len();

            // classifier
            let w_c = &p[self.classifier_offset()..self.classifier_offset() + d];
            grads[self.classifier_bias_offset()] += dz;
            let mut dx: Vec<Vec<f64>> = vec![vec![0.0; d]; len];
            for c in 0..d {
                grads[self.classifier_offset() + c] += dz * cache.out[0][c];
                dx[0][c] = dz * w_c[c];
            }

            for layer in (0..layers).rev() {
                let off = self.layer_offsets(layer);
                let ln1_scale = &p[off.ln1_scale..off.ln1_scale + d];
                let ln2_scale = &p[off.ln2_scale..off.ln2_scale + d];

                let mut dy: Vec<Vec<f64>> = Vec::with_capacity(len);
                for i in 0..len {
                    // layer norm 2 (input r2 = y + ffn_out)
                    let dr2 = {
                        let (ds, dsh) = grads.split_at_mut(off.ln2_shift);
                        layer_norm_backward(
                            &dx[i],
                            &cache.ln2[layer].xhat[i],
                            cache.ln2[layer].inv_std[i],
                            ln2_scale,
                            &mut ds[off.ln2_scale..],
                            &mut dsh[..d],
                        )
                    };
                    // FFN: r2 = y + W2·gelu(W1·y)
                    let g = &cache.ffn_act[layer][i];
                    let a = &cache.ffn_pre[layer][i];
                    let y = &cache.y[layer][i];
                    outer_add(&mut grads[off.w2..off.w2 + d * f], &dr2, g);
                    let mut dg = vec![0.0; f];
                    matvec_transpose_add(&p[off.w2..], d, f, &dr2, &mut dg);
                    let da: Vec<f64> = dg
                        .iter()
                        .zip(a)
                        .map(|(&dgi, &ai)| dgi * gelu_derivative(ai))
                        .collect();
                    outer_add(&mut grads[off.w1..off.w1 + f * d], &da, y);
                    let mut dyi = dr2.clone();
                    matvec_transpose_add(&p[off.w1..], f, d, &da, &mut dyi);
                    dy.push(dyi);
                }

                // layer norm 1 (input r1 = x + attn_out)
                let mut dattn: Vec<Vec<f64>> = Vec::with_capacity(len);
                let mut dx_next: Vec<Vec<f64>> = Vec::with_capacity(len);
                for i in 0..len {
                    let dr1 = {
                        let (ds, dsh) = grads.split_at_mut(off.ln1_shift);
                        layer_norm_backward(
                            &dy[i],
                            &cache.ln1[layer].xhat[i],
                            cache.ln1[layer].inv_std[i],
                            ln1_scale,
                            &mut ds[off.ln1_scale..],
                            &mut dsh[..d],
                        )
                    };
                    dx_next.push(dr1.clone());
                    dattn.push(dr1);
                }

                // attention output projection
                let mut dctx: Vec<Vec<f64>> = Vec::with_capacity(len);
                for i in 0..len {
                    outer_add(&mut grads[off.w_o..off.w_o + d * d], &dattn[i], &cache.ctx[layer][i]);
                    let mut dc = vec![0.0; d];
                    matvec_transpose_add(&p[off.w_o..], d, d, &dattn[i], &mut dc);
                    dctx.push(dc);
                }

                // attention core
                let q = &cache.q[layer];
                let k = &cache.k[layer];
                let v = &cache.v[layer];
                let alpha = &cache.alpha[layer];
                let mut dq: Vec<Vec<f64>> = vec![vec![0.0; d]; len];
                let mut dk: Vec<Vec<f64>> = vec![vec![0.0; d]; len];
                let mut dv: Vec<Vec<f64>> = vec![vec![0.0; d]; len];
                for h in 0..heads {
                    let o = h * d_head;
                    for i in 0..len {
                        let a_row = &alpha[h][i];
                        let dctx_h = &dctx[i][o..o + d_head];
                        let mut dalpha = vec![0.0; len];
                        let mut weighted = 0.0;
                        for j in 0..len {
                            if mask[j] == 0 {
                                continue;
                            }
                            let vj = &v[j][o..o + d_head];
                            let mut s = 0.0;
                            for c in 0..d_head {
                                s += dctx_h[c] * vj[c];
                                dv[j][o + c] += a_row[j] * dctx_h[c];
                            }
                            dalpha[j] = s;
                            weighted += a_row[j] * s;
                        }
                        for j in 0..len {
                            if mask[j] == 0 {
                                continue;
                            }
                            let ds = a_row[j] * (dalpha[j] - weighted) * scale_factor;
                            if ds == 0.0 {
                                continue;
                            }
                            let qi = &q[i][o..o + d_head];
                            let kj = &k[j][o..o + d_head];
                            for c in 0..d_head {
                                dq[i][o + c] += ds * kj[c];
                                dk[j][o + c] += ds * qi[c];
                            }
                        }
                    }
                }

                // input projections
                let x = &cache.inputs[layer];
                for i in 0..len {
                    outer_add(&mut grads[off.w_q..off.w_q + d * d], &dq[i], &x[i]);
                    outer_add(&mut grads[off.w_k..off.w_k + d * d], &dk[i], &x[i]);
                    outer_add(&mut grads[off.w_v..off.w_v + d * d], &dv[i], &x[i]);
                    matvec_transpose_add(&p[off.w_q..], d, d, &dq[i], &mut dx_next[i]);
                    matvec_transpose_add(&p[off.w_k..], d, d, &dk[i], &mut dx_next[i]);
                    matvec_transpose_add(&p[off.w_v..], d, d, &dv[i], &mut dx_next[i]);
                }
                dx = dx_next;
            }

            // embeddings: x_i = tok[id_i] + pos[i] + seg[0]
            for i in 0..len {
                let tok_row = self.token_offset() + ids[i] * d;
                let pos_row = self.position_offset() + i * d;
                let seg_row = self.segment_offset();
                for c in 0..d {
                    grads[tok_row + c] += dx[i][c];
                    grads[pos_row + c] += dx[i][c];
                    grads[seg_row + c] += dx[i][c];
                }
            }
        }
        Ok((probs, grads))
    }
}
