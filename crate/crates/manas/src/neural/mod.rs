//! Toy-scale neural models for the same binary task: an Elman RNN and a
//! two-layer transformer encoder, both trained with Adam on clipped binary
//! cross-entropy, entirely in f64 with hand-written backpropagation.
//!
//! Everything is driven by one seeded generator per training run, so a fixed
//! seed reproduces the epoch history bit for bit.

mod adam;
mod gradcheck;
mod loss;
mod rnn;
mod train;
mod transformer;

pub use adam::AdamState;
pub use gradcheck::{grad_check, GRAD_CHECK_COORDS};
pub use loss::{bce_loss, BCE_CLIP};
pub use rnn::RnnModel;
pub use train::{train_neural, EpochHistory, EpochStats, ModelKind, NeuralModel, TrainConfig};
pub use transformer::TransformerModel;

use thiserror::Error;

/// Reserved vocabulary slots prepended before corpus token ids.
pub const PAD_ID: usize = 0;
/// Sequence-start marker read by the transformer classifier.
pub const CLS_ID: usize = 1;
/// Sentence end marker.
pub const SEP_ID: usize = 2;
/// Stand-in for tokens absent from the training vocabulary.
pub const UNK_ID: usize = 3;
/// Number of reserved ids; corpus token `i` becomes id `i + RESERVED_IDS`.
pub const RESERVED_IDS: usize = 4;

/// Errors raised by the neural stack.
#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("batch is empty")]
    EmptyBatch,
    #[error("training set is empty after the validation split")]
    EmptyTrainSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sequence contains structural id {id} (ids below {UNK_ID} mark padding and sentence boundaries)")]
    ReservedIdCollision { id: usize },
    #[error("token id {id} is outside the vocabulary of size {vocab}")]
    IndexOutOfVocabulary { id: usize, vocab: usize },
    #[error("sequence length {len} exceeds the positional table size {max}")]
    SequenceTooLong { len: usize, max: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// A right-padded batch of id sequences with its attention mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedBatch {
    /// B×L token ids, pad positions hold [`PAD_ID`].
    pub token_ids: Vec<Vec<usize>>,
    /// B×L, 1 on real positions and 0 on pads.
    pub attention_mask: Vec<Vec<u8>>,
    /// True (unpadded) length of each sequence.
    pub lengths: Vec<usize>,
}

impl PaddedBatch {
    pub fn batch_size(&self) -> usize {
        self.token_ids.len()
    }

    pub fn padded_len(&self) -> usize {
        self.token_ids.first().map_or(0, Vec::len)
    }
}

/// Wraps a body of corpus ids as `[CLS] body [SEP]`.
///
/// Bodies may contain [`UNK_ID`] (the out-of-vocabulary stand-in) but never
/// the structural ids below it.
pub fn add_special_tokens(ids: &[usize]) -> Result<Vec<usize>, NeuralError> {
    if let Some(&id) = ids.iter().find(|&&id| id < UNK_ID) {
        return Err(NeuralError::ReservedIdCollision { id });
    }
    let mut out = Vec::with_capacity(ids.len() + 2);
    out.push(CLS_ID);
    out.extend_from_slice(ids);
    out.push(SEP_ID);
    Ok(out)
}

/// Right-pads sequences to the batch maximum and builds the mask.
pub fn pad_and_mask(sequences: &[Vec<usize>]) -> Result<PaddedBatch, NeuralError> {
    if sequences.is_empty() {
        return Err(NeuralError::EmptyBatch);
    }
    if let Some(empty) = sequences.iter().position(Vec::is_empty) {
        return Err(NeuralError::InvalidParameter(format!(
            "sequence {empty} is empty; every sequence needs at least one token"
        )));
    }
    let max_len = sequences.iter().map(Vec::len).max().unwrap();
    let mut token_ids = Vec::with_capacity(sequences.len());
    let mut attention_mask = Vec::with_capacity(sequences.len());
    let mut lengths = Vec::with_capacity(sequences.len());
    for sequence in sequences {
        let mut ids = sequence.clone();
        let mut mask = vec![1u8; sequence.len()];
        ids.resize(max_len, PAD_ID);
        mask.resize(max_len, 0);
        token_ids.push(ids);
        attention_mask.push(mask);
        lengths.push(sequence.len());
    }
    Ok(PaddedBatch {
        token_ids,
        attention_mask,
        lengths,
    })
}

/// Whole minibatches per epoch: `max(1, floor(n / batch_size))`. The final
/// partial batch is dropped; the guard keeps one step for tiny corpora.
pub fn steps_per_epoch(n_train: usize, batch_size: usize) -> Result<usize, NeuralError> {
    if n_train == 0 || batch_size == 0 {
        return Err(NeuralError::InvalidParameter(format!(
            "steps_per_epoch needs positive inputs, got n={n_train}, batch={batch_size}"
        )));
    }
    Ok((n_train / batch_size).max(1))
}

/// Converts one document's vocabulary indices to model ids by shifting past
/// the reserved slots.
pub fn corpus_ids(vocab_indices: &[usize]) -> Vec<usize> {
    vocab_indices.iter().map(|&i| i + RESERVED_IDS).collect()
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::rng::Lcg64;

    /// Random well-formed batch of corpus ids over a vocabulary of
    /// `vocab - RESERVED_IDS` corpus slots, CLS/SEP-wrapped when asked.
    pub fn random_batch(
        rng: &mut Lcg64,
        batch: usize,
        max_body: usize,
        vocab: usize,
        wrap: bool,
    ) -> (PaddedBatch, Vec<u8>) {
        let sequences: Vec<Vec<usize>> = (0..batch)
            .map(|_| {
                let len = 1 + rng.below(max_body);
                let body: Vec<usize> =
                    (0..len).map(|_| RESERVED_IDS + rng.below(vocab - RESERVED_IDS)).collect();
                if wrap {
                    add_special_tokens(&body).unwrap()
                } else {
                    body
                }
            })
            .collect();
        let labels: Vec<u8> = (0..batch).map(|_| rng.below(2) as u8).collect();
        (pad_and_mask(&sequences).unwrap(), labels)
    }
}
