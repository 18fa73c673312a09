//! End-to-end experiment orchestration: split, preprocess, vectorize, train,
//! evaluate, sweep over split fractions, and persist every artifact.
//!
//! One master seed fans out to the split and the model through fixed stream
//! offsets, so a single number reproduces an entire experiment bit for bit.

mod persist;
mod report;

pub use persist::{load_model, save_model, AnyModel, PersistError, PipelineModel};
pub use report::{
    build_sections, parse_report, render_report, sections_to_csv, sections_to_markdown,
    word_frequencies_csv, ReportFormat, ReportSection,
};

use crate::classical::{predict_proba_all, train_classifier, Algorithm, ClassicalHyperparams};
use crate::corpus::{train_test_split, Corpus, CorpusError};
use crate::metrics::{class_report, error_report, AggregateReport, ClassReport, ErrorReport};
use crate::neural::{
    bce_loss, train_neural, EpochHistory, ModelKind, NeuralModel, TrainConfig, RESERVED_IDS,
    UNK_ID,
};
use crate::preprocess::{preprocess_document, PreprocessConfig, TokenSequence};
use crate::rng::derive_seed;
use crate::vectorize::{vectorize, CountVector, FeatureMatrix, VectorizeError, Vocabulary};
use std::time::{Duration, Instant};
use thiserror::Error;

/// Seed stream: the train/test shuffle.
pub const SEED_STREAM_SPLIT: u64 = 1;
/// Seed stream: model initialization, epoch shuffles, and bootstrap draws.
pub const SEED_STREAM_MODEL: u64 = 2;

/// Sweep fractions: the five comparison rows plus the headline 0.90 split.
pub const DEFAULT_SWEEP_FRACTIONS: [f64; 6] = [0.50, 0.60, 0.70, 0.75, 0.80, 0.90];

/// Errors from any pipeline stage, labeled with the stage that failed.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("split stage: {0}")]
    Split(#[source] CorpusError),
    #[error("vectorize stage: {0}")]
    Vectorize(#[from] VectorizeError),
    #[error("train stage: {0}")]
    Train(String),
    #[error("evaluate stage: {0}")]
    Evaluate(String),
    #[error("config: {0}")]
    InvalidConfig(String),
    #[error("report parse: {0}")]
    ReportParse(String),
    #[error("sweep cell (train fraction {fraction:.2}, {model}): {source}")]
    SweepCell {
        fraction: f64,
        model: String,
        source: Box<HarnessError>,
    },
    #[error("model file: {0}")]
    Persist(#[from] PersistError),
}

/// One of the eight compared models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Classical(Algorithm),
    Neural(ModelKind),
}

impl ModelChoice {
    /// All eight, classical six first in report row order, then RNN, then
    /// the transformer.
    pub fn all() -> [ModelChoice; 8] {
        let c = Algorithm::all();
        [
            ModelChoice::Classical(c[0]),
            ModelChoice::Classical(c[1]),
            ModelChoice::Classical(c[2]),
            ModelChoice::Classical(c[3]),
            ModelChoice::Classical(c[4]),
            ModelChoice::Classical(c[5]),
            ModelChoice::Neural(ModelKind::Rnn),
            ModelChoice::Neural(ModelKind::Transformer),
        ]
    }

    /// Stable lowercase key used in flags and model file names.
    pub fn key(&self) -> &'static str {
        match self {
            ModelChoice::Classical(a) => a.key(),
            ModelChoice::Neural(ModelKind::Rnn) => "rnn",
            ModelChoice::Neural(ModelKind::Transformer) => "bert",
        }
    }

    /// Row label used in rendered tables.
    pub fn display(&self) -> &'static str {
        match self {
            ModelChoice::Classical(a) => a.display(),
            ModelChoice::Neural(ModelKind::Rnn) => "RNN",
            ModelChoice::Neural(ModelKind::Transformer) => "BERT",
        }
    }

    pub fn parse(text: &str) -> Option<ModelChoice> {
        let lower = text.to_ascii_lowercase();
        match lower.as_str() {
            "rnn" => Some(ModelChoice::Neural(ModelKind::Rnn)),
            "bert" | "transformer" => Some(ModelChoice::Neural(ModelKind::Transformer)),
            _ => Algorithm::parse(&lower).map(ModelChoice::Classical),
        }
    }

    pub fn is_neural(&self) -> bool {
        matches!(self, ModelChoice::Neural(_))
    }
}

/// Training-loop settings for the sequence models.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuralSettings {
    pub epochs: usize,
    pub batch_size: usize,
    pub validation_split: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl NeuralSettings {
    /// Study defaults per architecture (15 epochs, batch 52, lr 0.0005 for
    /// the RNN; 3 epochs with from-scratch-friendly batch and rate for the
    /// transformer).
    pub fn defaults(kind: ModelKind) -> NeuralSettings {
        match kind {
            ModelKind::Rnn => NeuralSettings {
                epochs: 15,
                batch_size: 52,
                validation_split: 0.15,
                learning_rate: 5e-4,
                beta1: 0.9,
                beta2: 0.999,
            },
            ModelKind::Transformer => NeuralSettings {
                epochs: 3,
                batch_size: 16,
                validation_split: 0.15,
                learning_rate: 2e-3,
                beta1: 0.9,
                beta2: 0.999,
            },
        }
    }
}

/// Hyperparameters matching the chosen model family.
#[derive(Debug, Clone, PartialEq)]
pub enum Hyperparams {
    Classical(ClassicalHyperparams),
    Neural(NeuralSettings),
}

/// Everything one experiment run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelChoice,
    pub train_fraction: f64,
    pub seed: u64,
    pub preprocess: PreprocessConfig,
    /// Minimum corpus frequency for a token to enter the vocabulary.
    pub min_count: u32,
    pub hyperparams: Hyperparams,
}

impl ExperimentConfig {
    /// Defaults for a model: split 0.90 classical, 0.75 RNN, 0.80
    /// transformer; default hyperparameters for the family.
    pub fn for_model(model: ModelChoice, seed: u64) -> ExperimentConfig {
        let (train_fraction, hyperparams) = match model {
            ModelChoice::Classical(a) => {
                (0.90, Hyperparams::Classical(ClassicalHyperparams::new(a)))
            }
            ModelChoice::Neural(ModelKind::Rnn) => (
                0.75,
                Hyperparams::Neural(NeuralSettings::defaults(ModelKind::Rnn)),
            ),
            ModelChoice::Neural(ModelKind::Transformer) => (
                0.80,
                Hyperparams::Neural(NeuralSettings::defaults(ModelKind::Transformer)),
            ),
        };
        ExperimentConfig {
            model,
            train_fraction,
            seed,
            preprocess: PreprocessConfig::default(),
            min_count: 1,
            hyperparams,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(HarnessError::InvalidConfig(format!(
                "train_fraction {} must lie strictly between 0 and 1",
                self.train_fraction
            )));
        }
        if self.min_count == 0 {
            return Err(HarnessError::InvalidConfig(
                "min_count must be at least 1".into(),
            ));
        }
        match (&self.model, &self.hyperparams) {
            (ModelChoice::Classical(a), Hyperparams::Classical(hp)) => {
                if hp.algorithm != *a {
                    return Err(HarnessError::InvalidConfig(format!(
                        "hyperparameters are for {} but the model is {}",
                        hp.algorithm.display(),
                        a.display()
                    )));
                }
                Ok(())
            }
            (ModelChoice::Neural(_), Hyperparams::Neural(_)) => Ok(()),
            _ => Err(HarnessError::InvalidConfig(
                "hyperparameter family does not match the chosen model".into(),
            )),
        }
    }
}

/// Everything measured for one (model, split) run.
///
/// `runtime` is observational and excluded from equality; every other field
/// is deterministic given the corpus and config.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub class_report: ClassReport,
    pub aggregate: AggregateReport,
    pub errors: ErrorReport,
    /// Test-split accuracy, equal to `errors.accuracy`.
    pub accuracy: f64,
    /// Final-model accuracy over the full train split.
    pub train_accuracy: f64,
    /// Mean clipped BCE of the final model over the train split (neural only).
    pub train_loss: Option<f64>,
    /// Mean clipped BCE over the test split (neural only).
    pub test_loss: Option<f64>,
    pub history: Option<EpochHistory>,
    pub runtime: Duration,
}

impl PartialEq for ExperimentResult {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.class_report == other.class_report
            && self.aggregate == other.aggregate
            && self.errors == other.errors
            && self.accuracy == other.accuracy
            && self.train_accuracy == other.train_accuracy
            && self.train_loss == other.train_loss
            && self.test_loss == other.test_loss
            && self.history == other.history
    }
}

/// Test accuracies over a (fraction × algorithm) grid, stored as percents.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub fractions: Vec<f64>,
    pub models: Vec<ModelChoice>,
    /// `cells[fraction_index][model_index]`, percent in [0, 100].
    pub cells: Vec<Vec<f64>>,
}

impl SweepTable {
    /// Row label in the comparison-table style: "Train = 0.50 Test = 0.50".
    pub fn row_label(fraction: f64) -> String {
        format!("Train = {:.2} Test = {:.2}", fraction, 1.0 - fraction)
    }
}

/// Corpus token ids for one document: vocabulary index shifted past the
/// reserved ids, unknown tokens mapped to UNK.
fn token_ids(tokens: &TokenSequence, vocab: &Vocabulary) -> Vec<usize> {
    tokens
        .iter()
        .map(|t| match vocab.index_of(t) {
            Some(i) => i + RESERVED_IDS,
            None => UNK_ID,
        })
        .collect()
}

fn threshold(probs: &[f64]) -> Vec<u8> {
    probs.iter().map(|&p| u8::from(p >= 0.5)).collect()
}

fn fraction_correct(preds: &[u8], labels: &[u8]) -> f64 {
    let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
    hits as f64 / preds.len() as f64
}

/// Runs the full pipeline once and returns the result together with the
/// trained model bundled for persistence.
///
/// The vocabulary is built from the train split only, so tokens unique to
/// test documents never enter any model.
pub fn run_experiment_with_model(
    corpus: &Corpus,
    config: &ExperimentConfig,
) -> Result<(ExperimentResult, PipelineModel), HarnessError> {
    let started = Instant::now();
    config.validate()?;

    let split = train_test_split(
        corpus,
        config.train_fraction,
        derive_seed(config.seed, SEED_STREAM_SPLIT),
    )
    .map_err(HarnessError::Split)?;

    let tokens: Vec<TokenSequence> = corpus
        .texts()
        .map(|t| preprocess_document(t, &config.preprocess))
        .collect();
    let labels = corpus.labels();
    let gather_tokens = |idx: &[usize]| -> Vec<TokenSequence> {
        idx.iter().map(|&i| tokens[i].clone()).collect()
    };
    let gather_labels = |idx: &[usize]| -> Vec<u8> { idx.iter().map(|&i| labels[i]).collect() };
    let train_tokens = gather_tokens(&split.train_indices);
    let test_tokens = gather_tokens(&split.test_indices);
    let y_train = gather_labels(&split.train_indices);
    let y_test = gather_labels(&split.test_indices);

    let vocab = Vocabulary::build(&train_tokens, config.min_count)?;
    let model_seed = derive_seed(config.seed, SEED_STREAM_MODEL);

    let trained;
    let train_probs: Vec<f64>;
    let test_probs: Vec<f64>;
    let mut history = None;
    match (&config.model, &config.hyperparams) {
        (ModelChoice::Classical(_), Hyperparams::Classical(hp)) => {
            let mut hp = hp.clone();
            hp.seed = model_seed;
            let train_rows: Vec<CountVector> =
                train_tokens.iter().map(|t| vectorize(t, &vocab)).collect();
            let test_rows: Vec<CountVector> =
                test_tokens.iter().map(|t| vectorize(t, &vocab)).collect();
            let features = FeatureMatrix::new(train_rows, y_train.clone())?;
            let model = train_classifier(&features, &hp)
                .map_err(|e| HarnessError::Train(e.to_string()))?;
            train_probs = predict_proba_all(&model, &features.rows)
                .map_err(|e| HarnessError::Evaluate(e.to_string()))?;
            test_probs = predict_proba_all(&model, &test_rows)
                .map_err(|e| HarnessError::Evaluate(e.to_string()))?;
            trained = AnyModel::Classical(model);
        }
        (ModelChoice::Neural(kind), Hyperparams::Neural(ns)) => {
            let train_seqs: Vec<Vec<usize>> =
                train_tokens.iter().map(|t| token_ids(t, &vocab)).collect();
            let test_seqs: Vec<Vec<usize>> =
                test_tokens.iter().map(|t| token_ids(t, &vocab)).collect();
            // position table sized from the train split only; longer inputs
            // are truncated at prediction time
            let max_len = train_seqs.iter().map(Vec::len).max().unwrap_or(0) + 2;
            let tc = TrainConfig {
                kind: *kind,
                vocab_size: vocab.len() + RESERVED_IDS,
                epochs: ns.epochs,
                batch_size: ns.batch_size,
                validation_split: ns.validation_split,
                learning_rate: ns.learning_rate,
                beta1: ns.beta1,
                beta2: ns.beta2,
                seed: model_seed,
                max_len: Some(max_len.max(2)),
            };
            let (model, h) = train_neural(&train_seqs, &y_train, &tc)
                .map_err(|e| HarnessError::Train(e.to_string()))?;
            let predict = |m: &NeuralModel, seqs: &[Vec<usize>]| -> Result<Vec<f64>, HarnessError> {
                m.predict_proba(&persist::clip_sequences(m, seqs))
                    .map_err(|e| HarnessError::Evaluate(e.to_string()))
            };
            train_probs = predict(&model, &train_seqs)?;
            test_probs = predict(&model, &test_seqs)?;
            history = Some(h);
            trained = AnyModel::Neural(model);
        }
        _ => unreachable!("validate() enforces matching hyperparameter family"),
    }

    let train_preds = threshold(&train_probs);
    let test_preds = threshold(&test_probs);
    let (class_rep, aggregate) =
        class_report(&y_test, &test_preds).map_err(|e| HarnessError::Evaluate(e.to_string()))?;
    let errors = error_report(&y_test, &test_preds, &test_probs)
        .map_err(|e| HarnessError::Evaluate(e.to_string()))?;
    let (train_loss, test_loss) = if config.model.is_neural() {
        (
            Some(bce_loss(&train_probs, &y_train).map_err(|e| HarnessError::Train(e.to_string()))?),
            Some(bce_loss(&test_probs, &y_test).map_err(|e| HarnessError::Train(e.to_string()))?),
        )
    } else {
        (None, None)
    };

    let result = ExperimentResult {
        config: config.clone(),
        class_report: class_rep,
        aggregate,
        errors,
        accuracy: errors.accuracy,
        train_accuracy: fraction_correct(&train_preds, &y_train),
        train_loss,
        test_loss,
        history,
        runtime: started.elapsed(),
    };
    let bundle = PipelineModel {
        preprocess: config.preprocess.clone(),
        vocab,
        model: trained,
    };
    Ok((result, bundle))
}

/// [`run_experiment_with_model`] without keeping the model.
pub fn run_experiment(
    corpus: &Corpus,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, HarnessError> {
    run_experiment_with_model(corpus, config).map(|(result, _)| result)
}

/// One experiment per (fraction, model) cell, identical master seed, so all
/// models at one fraction share the same split. Runs cells on up to `jobs`
/// threads; the table is identical to sequential execution.
pub fn compare_splits_jobs(
    corpus: &Corpus,
    models: &[ModelChoice],
    fractions: &[f64],
    seed: u64,
    jobs: usize,
) -> Result<SweepTable, HarnessError> {
    if models.is_empty() || fractions.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "compare_splits needs at least one model and one fraction".into(),
        ));
    }
    let jobs = jobs.max(1);
    let cell_of = |fi: usize, mi: usize| -> Result<f64, HarnessError> {
        let mut config = ExperimentConfig::for_model(models[mi], seed);
        config.train_fraction = fractions[fi];
        run_experiment(corpus, &config)
            .map(|r| r.accuracy * 100.0)
            .map_err(|e| HarnessError::SweepCell {
                fraction: fractions[fi],
                model: models[mi].display().to_string(),
                source: Box::new(e),
            })
    };

    let all_cells: Vec<(usize, usize)> = (0..fractions.len())
        .flat_map(|fi| (0..models.len()).map(move |mi| (fi, mi)))
        .collect();
    let mut grid: Vec<Vec<Option<Result<f64, HarnessError>>>> = (0..fractions.len())
        .map(|_| (0..models.len()).map(|_| None).collect())
        .collect();

    if jobs == 1 {
        for &(fi, mi) in &all_cells {
            grid[fi][mi] = Some(cell_of(fi, mi));
        }
    } else {
        let outcomes = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs.min(all_cells.len()))
                .map(|worker| {
                    let mine: Vec<(usize, usize)> = all_cells
                        .iter()
                        .copied()
                        .skip(worker)
                        .step_by(jobs)
                        .collect();
                    let cell_of = &cell_of;
                    scope.spawn(move || {
                        mine.into_iter()
                            .map(|(fi, mi)| ((fi, mi), cell_of(fi, mi)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sweep worker panicked"))
                .collect::<Vec<_>>()
        });
        for ((fi, mi), outcome) in outcomes {
            grid[fi][mi] = Some(outcome);
        }
    }

    // scan in grid order so the reported error is scheduling-independent
    let mut cells = Vec::with_capacity(fractions.len());
    for row in grid {
        let mut out = Vec::with_capacity(models.len());
        for cell in row {
            out.push(cell.expect("complete grid")?);
        }
        cells.push(out);
    }
    Ok(SweepTable {
        fractions: fractions.to_vec(),
        models: models.to_vec(),
        cells,
    })
}

/// Sequential [`compare_splits_jobs`].
pub fn compare_splits(
    corpus: &Corpus,
    models: &[ModelChoice],
    fractions: &[f64],
    seed: u64,
) -> Result<SweepTable, HarnessError> {
    compare_splits_jobs(corpus, models, fractions, seed, 1)
}

/// Ranked (token, count) list over the preprocessed corpus: descending
/// count, ties broken lexicographically, truncated to `top_k`.
pub fn word_frequencies(
    corpus: &Corpus,
    config: &PreprocessConfig,
    top_k: usize,
) -> Vec<(String, u64)> {
    let mut counts: std::collections::BTreeMap<String, u64> = std::collections::BTreeMap::new();
    for text in corpus.texts() {
        for token in preprocess_document(text, config) {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(top_k);
    ranked
}
