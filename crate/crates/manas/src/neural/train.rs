//! Minibatch Adam training loop shared by both sequence models.
//!
//! One seeded generator drives everything in a fixed order: the shuffle that
//! carves off the validation split, the parameter initialization draws, then
//! one reshuffle per epoch. Fixed seed therefore means bit-identical history.

use super::adam::AdamState;
use super::loss::bce_loss;
use super::rnn::RnnModel;
use super::transformer::TransformerModel;
use super::{add_special_tokens, pad_and_mask, steps_per_epoch, NeuralError, UNK_ID};
use crate::rng::Lcg64;

/// Which sequence architecture to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Rnn,
    Transformer,
}

impl ModelKind {
    pub fn key(self) -> &'static str {
        match self {
            ModelKind::Rnn => "rnn",
            ModelKind::Transformer => "transformer",
        }
    }

    pub fn parse(text: &str) -> Option<ModelKind> {
        match text.to_ascii_lowercase().as_str() {
            "rnn" => Some(ModelKind::Rnn),
            "transformer" => Some(ModelKind::Transformer),
            _ => None,
        }
    }
}

/// A trained sequence model of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum NeuralModel {
    Rnn(RnnModel),
    Transformer(TransformerModel),
}

impl NeuralModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            NeuralModel::Rnn(_) => ModelKind::Rnn,
            NeuralModel::Transformer(_) => ModelKind::Transformer,
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            NeuralModel::Rnn(m) => m.num_params(),
            NeuralModel::Transformer(m) => m.num_params(),
        }
    }

    fn params_mut(&mut self) -> &mut Vec<f64> {
        match self {
            NeuralModel::Rnn(m) => &mut m.params,
            NeuralModel::Transformer(m) => &mut m.params,
        }
    }

    /// Forward over sequences already prepared for this architecture.
    fn forward_prepared(&self, prepared: &[Vec<usize>]) -> Result<Vec<f64>, NeuralError> {
        let batch = pad_and_mask(prepared)?;
        match self {
            NeuralModel::Rnn(m) => m.forward(&batch),
            NeuralModel::Transformer(m) => m.forward(&batch),
        }
    }

    fn forward_backward_prepared(
        &self,
        prepared: &[Vec<usize>],
        labels: &[u8],
    ) -> Result<(Vec<f64>, Vec<f64>), NeuralError> {
        let batch = pad_and_mask(prepared)?;
        match self {
            NeuralModel::Rnn(m) => m.forward_backward(&batch, labels),
            NeuralModel::Transformer(m) => m.forward_backward(&batch, labels),
        }
    }

    /// Class-1 probability per document. Takes raw corpus id sequences and
    /// applies the architecture's own framing (UNK for empty documents on the
    /// recurrent side, CLS/SEP wrapping on the transformer side).
    pub fn predict_proba(&self, sequences: &[Vec<usize>]) -> Result<Vec<f64>, NeuralError> {
        let prepared = prepare_sequences(self.kind(), sequences)?;
        self.forward_prepared(&prepared)
    }

    /// Hard labels at the 0.5 threshold, ties to class 1.
    pub fn predict(&self, sequences: &[Vec<usize>]) -> Result<Vec<u8>, NeuralError> {
        Ok(self
            .predict_proba(sequences)?
            .iter()
            .map(|&p| u8::from(p >= 0.5))
            .collect())
    }
}

/// Framing per architecture: the recurrent model consumes corpus ids directly
/// (an empty document becomes a single UNK so the batch stays rectangular);
/// the transformer wraps every document in CLS/SEP.
pub(crate) fn prepare_sequences(
    kind: ModelKind,
    sequences: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>, NeuralError> {
    match kind {
        ModelKind::Rnn => Ok(sequences
            .iter()
            .map(|ids| {
                if ids.is_empty() {
                    vec![UNK_ID]
                } else {
                    ids.clone()
                }
            })
            .collect()),
        ModelKind::Transformer => sequences.iter().map(|ids| add_special_tokens(ids)).collect(),
    }
}

/// Hyperparameters for `train_neural`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub kind: ModelKind,
    /// Embedding table size, reserved ids included; every id must fall below it.
    pub vocab_size: usize,
    pub epochs: usize,
    pub batch_size: usize,
    /// Fraction in [0,1) carved off the end of the seeded shuffle.
    pub validation_split: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub seed: u64,
    /// Transformer position-table size; None sizes it to the longest prepared
    /// sequence. Ignored by the recurrent model.
    pub max_len: Option<usize>,
}

impl TrainConfig {
    /// Recurrent defaults from the comparative study: 15 epochs, batch 52,
    /// Adam(0.0005, 0.9, 0.999), validation split 0.15.
    pub fn rnn(vocab_size: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            kind: ModelKind::Rnn,
            vocab_size,
            epochs: 15,
            batch_size: 52,
            validation_split: 0.15,
            learning_rate: 5e-4,
            beta1: 0.9,
            beta2: 0.999,
            seed,
            max_len: None,
        }
    }

    /// Transformer defaults: 3 epochs; batch and learning rate are tuned for
    /// a from-scratch encoder at desk scale rather than fine-tuning.
    pub fn transformer(vocab_size: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            kind: ModelKind::Transformer,
            vocab_size,
            epochs: 3,
            batch_size: 16,
            validation_split: 0.15,
            learning_rate: 2e-3,
            beta1: 0.9,
            beta2: 0.999,
            seed,
            max_len: None,
        }
    }

    fn validate(&self) -> Result<(), NeuralError> {
        if self.epochs == 0 {
            return Err(NeuralError::InvalidParameter("epochs must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(NeuralError::InvalidParameter(
                "batch_size must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.validation_split) {
            return Err(NeuralError::InvalidParameter(
                "validation_split must lie in [0, 1)".into(),
            ));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(NeuralError::InvalidParameter(
                "learning_rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One epoch's summary; val fields are None when the split is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

/// Per-epoch training curve, the data behind the study's history plots.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochHistory {
    pub epochs: Vec<EpochStats>,
    pub train_size: usize,
    pub validation_size: usize,
}

impl EpochHistory {
    /// CSV with header `epoch,loss,accuracy,val_loss,val_accuracy`; empty
    /// cells when no validation split exists. Floats use shortest round-trip
    /// formatting so the file parses back losslessly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss,accuracy,val_loss,val_accuracy\n");
        for row in &self.epochs {
            let val_loss = row.val_loss.map(|v| v.to_string()).unwrap_or_default();
            let val_acc = row.val_accuracy.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.epoch, row.loss, row.accuracy, val_loss, val_acc
            ));
        }
        out
    }
}

fn accuracy_of(probs: &[f64], labels: &[u8]) -> f64 {
    let hits = probs
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| u8::from(p >= 0.5) == y)
        .count();
    hits as f64 / probs.len() as f64
}

/// Trains a sequence model with minibatch Adam.
///
/// `sequences` are corpus token ids (reserved ids excluded by construction);
/// `labels` are 0/1. The last `floor(N * validation_split)` examples of the
/// seeded shuffle become the validation set; each epoch reshuffles the
/// training subset and runs `steps_per_epoch` minibatches, dropping the final
/// partial batch. History rows are measured on the full subsets after each
/// epoch.
pub fn train_neural(
    sequences: &[Vec<usize>],
    labels: &[u8],
    config: &TrainConfig,
) -> Result<(NeuralModel, EpochHistory), NeuralError> {
    config.validate()?;
    if sequences.len() != labels.len() {
        return Err(NeuralError::LengthMismatch {
            left: sequences.len(),
            right: labels.len(),
        });
    }
    if sequences.is_empty() {
        return Err(NeuralError::EmptyTrainSet);
    }
    if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
        return Err(NeuralError::InvalidParameter(format!(
            "labels must be 0 or 1, found {bad}"
        )));
    }
    for ids in sequences {
        if let Some(&id) = ids.iter().find(|&&id| id >= config.vocab_size) {
            return Err(NeuralError::IndexOutOfVocabulary {
                id,
                vocab: config.vocab_size,
            });
        }
    }

    let prepared = prepare_sequences(config.kind, sequences)?;
    let longest = prepared.iter().map(Vec::len).max().unwrap_or(0);
    let max_len = config.max_len.unwrap_or(longest);
    if longest > max_len {
        return Err(NeuralError::SequenceTooLong {
            len: longest,
            max: max_len,
        });
    }

    let mut rng = Lcg64::new(config.seed);

    // validation split: last floor(N * split) examples of the seeded shuffle
    let n = prepared.len();
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let n_val = (n as f64 * config.validation_split).floor() as usize;
    let n_train = n - n_val;
    if n_train == 0 {
        return Err(NeuralError::EmptyTrainSet);
    }
    let train_idx = &order[..n_train];
    let val_idx = &order[n_train..];

    let mut model = match config.kind {
        ModelKind::Rnn => NeuralModel::Rnn(RnnModel::with_default_dims(config.vocab_size, &mut rng)),
        ModelKind::Transformer => NeuralModel::Transformer(TransformerModel::with_default_dims(
            config.vocab_size,
            max_len,
            &mut rng,
        )?),
    };

    let mut adam = AdamState::new(
        model.num_params(),
        config.learning_rate,
        config.beta1,
        config.beta2,
    );
    let steps = steps_per_epoch(n_train, config.batch_size)?;

    let gather = |idx: &[usize]| -> (Vec<Vec<usize>>, Vec<u8>) {
        let seqs = idx.iter().map(|&i| prepared[i].clone()).collect();
        let ys = idx.iter().map(|&i| labels[i]).collect();
        (seqs, ys)
    };
    let (train_seqs, train_labels) = gather(train_idx);
    let (val_seqs, val_labels) = gather(val_idx);

    let mut history = EpochHistory {
        epochs: Vec::with_capacity(config.epochs),
        train_size: n_train,
        validation_size: n_val,
    };
    let mut epoch_order: Vec<usize> = train_idx.to_vec();
    for epoch in 1..=config.epochs {
        rng.shuffle(&mut epoch_order);
        for step in 0..steps {
            let start = step * config.batch_size;
            let end = (start + config.batch_size).min(n_train);
            let (seqs, ys) = gather(&epoch_order[start..end]);
            let (_, grads) = model.forward_backward_prepared(&seqs, &ys)?;
            adam.step(model.params_mut(), &grads)?;
        }

        let train_probs = model.forward_prepared(&train_seqs)?;
        let loss = bce_loss(&train_probs, &train_labels)?;
        let accuracy = accuracy_of(&train_probs, &train_labels);
        let (val_loss, val_accuracy) = if n_val > 0 {
            let val_probs = model.forward_prepared(&val_seqs)?;
            (
                Some(bce_loss(&val_probs, &val_labels)?),
                Some(accuracy_of(&val_probs, &val_labels)),
            )
        } else {
            (None, None)
        };
        let stats = EpochStats {
            epoch,
            loss,
            accuracy,
            val_loss,
            val_accuracy,
        };
        log::debug!(
            "epoch {}/{}: loss {:.4} acc {:.4}",
            epoch,
            config.epochs,
            stats.loss,
            stats.accuracy
        );
        history.epochs.push(stats);
    }

    Ok((model, history))
}
