//! Versioned, checksummed text persistence for trained pipelines.
//!
//! A model file bundles everything prediction needs: the preprocessing
//! configuration, the vocabulary, and the flattened model tensors with
//! explicit shapes. Every float is written with Rust's shortest round-trip
//! formatting, so a load reproduces predictions bit for bit.

use crate::classical::{predict_proba, TrainedClassicalModel};
use crate::classical::{KnnModel, LinearModel, MnbModel};
use crate::harness::{token_ids, HarnessError, ModelChoice};
use crate::neural::{ModelKind, NeuralModel, RnnModel, TransformerModel};
use crate::preprocess::{preprocess_document, PreprocessConfig};
use crate::rng::Lcg64;
use crate::vectorize::{vectorize, CountVector, Vocabulary};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

/// Only format version this build writes and reads.
pub const MODEL_FORMAT_VERSION: u64 = 1;

const MAGIC: &str = "manas-model";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("unsupported model file version {found} (this build reads version {supported})")]
    UnsupportedVersion { found: u64, supported: u64 },
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Classical(TrainedClassicalModel),
    Neural(NeuralModel),
}

/// Everything needed to score raw text: preprocessing, vocabulary, model.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineModel {
    pub preprocess: PreprocessConfig,
    pub vocab: Vocabulary,
    pub model: AnyModel,
}

impl PipelineModel {
    pub fn choice(&self) -> ModelChoice {
        match &self.model {
            AnyModel::Classical(m) => ModelChoice::Classical(m.algorithm()),
            AnyModel::Neural(m) => ModelChoice::Neural(m.kind()),
        }
    }

    /// Class-1 probability for one raw document.
    pub fn predict_proba_text(&self, text: &str) -> Result<f64, HarnessError> {
        let tokens = preprocess_document(text, &self.preprocess);
        match &self.model {
            AnyModel::Classical(m) => {
                let vector = vectorize(&tokens, &self.vocab);
                predict_proba(m, &vector).map_err(|e| HarnessError::Evaluate(e.to_string()))
            }
            AnyModel::Neural(m) => {
                let ids = token_ids(&tokens, &self.vocab);
                let probs = m
                    .predict_proba(&clip_sequences(m, std::slice::from_ref(&ids)))
                    .map_err(|e| HarnessError::Evaluate(e.to_string()))?;
                Ok(probs[0])
            }
        }
    }

    /// (label, class-1 probability) at the 0.5 threshold.
    pub fn predict_text(&self, text: &str) -> Result<(u8, f64), HarnessError> {
        let proba = self.predict_proba_text(text)?;
        Ok((u8::from(proba >= 0.5), proba))
    }
}

/// Truncates corpus id sequences so the transformer's CLS/SEP framing fits
/// its position table; the recurrent model accepts any length.
pub(crate) fn clip_sequences(model: &NeuralModel, sequences: &[Vec<usize>]) -> Vec<Vec<usize>> {
    match model {
        NeuralModel::Rnn(_) => sequences.to_vec(),
        NeuralModel::Transformer(m) => {
            let body = m.max_len.saturating_sub(2);
            sequences
                .iter()
                .map(|ids| ids.iter().copied().take(body).collect())
                .collect()
        }
    }
}

fn join_floats(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v}");
    }
    out
}

fn write_tree(payload: &mut String, tree: &crate::classical::TreeModel) {
    use crate::classical::TreeNode;
    let _ = writeln!(payload, "dimension {}", tree.dimension());
    let _ = writeln!(payload, "nodes {}", tree.nodes.len());
    for node in &tree.nodes {
        match node {
            TreeNode::Leaf { counts } => {
                let _ = writeln!(payload, "leaf {} {}", counts[0], counts[1]);
            }
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                let _ = writeln!(payload, "split {feature} {threshold} {left} {right}");
            }
        }
    }
}

/// Writes the pipeline to `path` as versioned text with a payload checksum.
pub fn save_model(pipeline: &PipelineModel, path: &Path) -> Result<(), PersistError> {
    let mut payload = String::new();
    let _ = writeln!(payload, "algo {}", pipeline.choice().key());

    let pp = &pipeline.preprocess;
    let _ = writeln!(payload, "casefold {}", u8::from(pp.casefold_ascii));
    let punct: Vec<String> = pp
        .punctuation
        .iter()
        .map(|c| format!("{:x}", u32::from(*c)))
        .collect();
    let _ = writeln!(payload, "punct {}", punct.join(" "));
    let _ = writeln!(payload, "stopwords {}", pp.stopwords.len());
    for word in &pp.stopwords {
        let _ = writeln!(payload, "{word}");
    }

    let _ = writeln!(payload, "vocab {}", pipeline.vocab.len());
    payload.push_str(&pipeline.vocab.to_text());

    match &pipeline.model {
        AnyModel::Classical(TrainedClassicalModel::Mnb(m)) => {
            let _ = writeln!(payload, "log_prior {}", join_floats(&m.log_prior));
            let _ = writeln!(payload, "log_likelihood {}", m.dimension());
            let _ = writeln!(payload, "{}", join_floats(&m.log_likelihood[0]));
            let _ = writeln!(payload, "{}", join_floats(&m.log_likelihood[1]));
        }
        AnyModel::Classical(TrainedClassicalModel::Lr(m))
        | AnyModel::Classical(TrainedClassicalModel::Svc(m)) => {
            let _ = writeln!(payload, "weights {}", m.weights.len());
            let _ = writeln!(payload, "{}", join_floats(&m.weights));
            let _ = writeln!(payload, "bias {}", m.bias);
        }
        AnyModel::Classical(TrainedClassicalModel::Knn(m)) => {
            let _ = writeln!(payload, "k {}", m.k);
            let _ = writeln!(payload, "dimension {}", m.dimension());
            let _ = writeln!(payload, "rows {}", m.rows.len());
            for (row, label) in m.rows.iter().zip(&m.labels) {
                let _ = write!(payload, "{label}");
                for (index, count) in row.entries() {
                    let _ = write!(payload, " {index}:{count}");
                }
                payload.push('\n');
            }
        }
        AnyModel::Classical(TrainedClassicalModel::Dtc(m)) => {
            write_tree(&mut payload, m);
        }
        AnyModel::Classical(TrainedClassicalModel::Rfc(m)) => {
            let _ = writeln!(payload, "trees {}", m.trees.len());
            let seeds: Vec<String> = m.tree_seeds.iter().map(u64::to_string).collect();
            let _ = writeln!(payload, "seeds {}", seeds.join(" "));
            for tree in &m.trees {
                write_tree(&mut payload, tree);
            }
        }
        AnyModel::Neural(NeuralModel::Rnn(m)) => {
            let _ = writeln!(payload, "dims {} {} {}", m.vocab_size, m.embed_dim, m.hidden_dim);
            let _ = writeln!(payload, "params {}", m.params.len());
            let _ = writeln!(payload, "{}", join_floats(&m.params));
        }
        AnyModel::Neural(NeuralModel::Transformer(m)) => {
            let _ = writeln!(
                payload,
                "dims {} {} {} {} {} {}",
                m.vocab_size, m.max_len, m.model_dim, m.ffn_dim, m.heads, m.layers
            );
            let _ = writeln!(payload, "params {}", m.params.len());
            let _ = writeln!(payload, "{}", join_floats(&m.params));
        }
    }

    let digest = Sha256::digest(payload.as_bytes());
    let mut text = format!("{MAGIC} {MODEL_FORMAT_VERSION}\n");
    for byte in digest {
        let _ = write!(text, "{byte:02x}");
    }
    text.push('\n');
    text.push_str(&payload);
    std::fs::write(path, text)?;
    Ok(())
}

fn corrupt(message: impl Into<String>) -> PersistError {
    PersistError::CorruptModelFile(message.into())
}

struct Cursor<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor {
            lines: text.lines(),
            line_no: 0,
        }
    }

    fn next_line(&mut self) -> Result<&'a str, PersistError> {
        self.line_no += 1;
        self.lines
            .next()
            .ok_or_else(|| corrupt(format!("unexpected end of file at line {}", self.line_no)))
    }

    /// A line of the form `tag rest`; `rest` may be empty.
    fn tagged(&mut self, tag: &str) -> Result<&'a str, PersistError> {
        let line = self.next_line()?;
        if line == tag {
            return Ok("");
        }
        line.strip_prefix(tag)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| corrupt(format!("expected `{tag}` at line {}", self.line_no)))
    }

    fn parse<T: std::str::FromStr>(&self, token: &str, what: &str) -> Result<T, PersistError> {
        token
            .parse()
            .map_err(|_| corrupt(format!("bad {what} `{token}` near line {}", self.line_no)))
    }

    fn floats(&mut self, expected: usize, what: &str) -> Result<Vec<f64>, PersistError> {
        let line = self.next_line()?;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| self.parse(t, what))
            .collect::<Result<_, _>>()?;
        if values.len() != expected {
            return Err(corrupt(format!(
                "{what}: expected {expected} values, found {} at line {}",
                values.len(),
                self.line_no
            )));
        }
        Ok(values)
    }
}

fn read_tree(cursor: &mut Cursor<'_>) -> Result<crate::classical::TreeModel, PersistError> {
    use crate::classical::{TreeModel, TreeNode};
    let dimension: usize = {
        let rest = cursor.tagged("dimension")?;
        cursor.parse(rest, "tree dimension")?
    };
    let count: usize = {
        let rest = cursor.tagged("nodes")?;
        cursor.parse(rest, "node count")?
    };
    if count == 0 {
        return Err(corrupt("tree with no nodes"));
    }
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let line = cursor.next_line()?;
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("leaf") => {
                let c0 = cursor.parse(parts.next().unwrap_or(""), "leaf count")?;
                let c1 = cursor.parse(parts.next().unwrap_or(""), "leaf count")?;
                nodes.push(TreeNode::Leaf { counts: [c0, c1] });
            }
            Some("split") => {
                let feature = cursor.parse(parts.next().unwrap_or(""), "split feature")?;
                let threshold = cursor.parse(parts.next().unwrap_or(""), "split threshold")?;
                let left: usize = cursor.parse(parts.next().unwrap_or(""), "split child")?;
                let right: usize = cursor.parse(parts.next().unwrap_or(""), "split child")?;
                if left >= count || right >= count {
                    return Err(corrupt(format!(
                        "split child {}/{left}/{right} outside arena of {count}",
                        cursor.line_no
                    )));
                }
                nodes.push(TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                });
            }
            _ => return Err(corrupt(format!("bad tree node at line {}", cursor.line_no))),
        }
    }
    Ok(TreeModel::with_dimension(nodes, dimension))
}

/// Reads a pipeline written by [`save_model`], verifying version and checksum.
pub fn load_model(path: &Path) -> Result<PipelineModel, PersistError> {
    let text = std::fs::read_to_string(path)?;
    let mut cursor = Cursor::new(&text);

    let header = cursor.next_line()?;
    let version_token = header
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| corrupt("missing format header"))?;
    let version: u64 = cursor.parse(version_token, "format version")?;
    if version != MODEL_FORMAT_VERSION {
        return Err(PersistError::UnsupportedVersion {
            found: version,
            supported: MODEL_FORMAT_VERSION,
        });
    }

    let stored_checksum = cursor.next_line()?.to_string();
    let payload_start = text
        .find('\n')
        .and_then(|first| text[first + 1..].find('\n').map(|second| first + second + 2))
        .ok_or_else(|| corrupt("missing payload"))?;
    let payload = &text[payload_start..];
    let digest = Sha256::digest(payload.as_bytes());
    let mut actual = String::new();
    for byte in digest {
        let _ = write!(actual, "{byte:02x}");
    }
    if actual != stored_checksum {
        return Err(corrupt("checksum mismatch"));
    }

    let algo_key = cursor.tagged("algo")?;
    let choice = ModelChoice::parse(algo_key)
        .ok_or_else(|| corrupt(format!("unknown algorithm `{algo_key}`")))?;

    let casefold = cursor.tagged("casefold")? == "1";
    let punct_rest = cursor.tagged("punct")?;
    let mut punctuation = BTreeSet::new();
    for token in punct_rest.split_whitespace() {
        let code: u32 = u32::from_str_radix(token, 16)
            .map_err(|_| corrupt(format!("bad punctuation codepoint `{token}`")))?;
        let c = char::from_u32(code)
            .ok_or_else(|| corrupt(format!("invalid punctuation codepoint {code:#x}")))?;
        punctuation.insert(c);
    }
    let stopword_count: usize = {
        let rest = cursor.tagged("stopwords")?;
        cursor.parse(rest, "stopword count")?
    };
    let mut stopwords = BTreeSet::new();
    for _ in 0..stopword_count {
        stopwords.insert(cursor.next_line()?.to_string());
    }
    let preprocess = PreprocessConfig {
        punctuation,
        stopwords,
        casefold_ascii: casefold,
    };

    let vocab_len: usize = {
        let rest = cursor.tagged("vocab")?;
        cursor.parse(rest, "vocabulary size")?
    };
    let mut vocab_text = String::new();
    for _ in 0..vocab_len {
        vocab_text.push_str(cursor.next_line()?);
        vocab_text.push('\n');
    }
    let vocab = Vocabulary::from_text(&vocab_text)
        .map_err(|e| corrupt(format!("vocabulary section: {e}")))?;
    if vocab.len() != vocab_len {
        return Err(corrupt("vocabulary size disagrees with its token list"));
    }

    let model = match choice {
        ModelChoice::Classical(algorithm) => {
            use crate::classical::Algorithm;
            let trained = match algorithm {
                Algorithm::Mnb => {
                    let priors = {
                        let rest = cursor.tagged("log_prior")?;
                        let values: Vec<f64> = rest
                            .split_whitespace()
                            .map(|t| cursor.parse(t, "log prior"))
                            .collect::<Result<_, _>>()?;
                        if values.len() != 2 {
                            return Err(corrupt("log_prior needs exactly two values"));
                        }
                        [values[0], values[1]]
                    };
                    let dimension: usize = {
                        let rest = cursor.tagged("log_likelihood")?;
                        cursor.parse(rest, "likelihood dimension")?
                    };
                    let row0 = cursor.floats(dimension, "log likelihood")?;
                    let row1 = cursor.floats(dimension, "log likelihood")?;
                    TrainedClassicalModel::Mnb(MnbModel {
                        log_prior: priors,
                        log_likelihood: [row0, row1],
                    })
                }
                Algorithm::Lr | Algorithm::Svc => {
                    let dimension: usize = {
                        let rest = cursor.tagged("weights")?;
                        cursor.parse(rest, "weight dimension")?
                    };
                    let weights = cursor.floats(dimension, "weight")?;
                    let bias: f64 = {
                        let rest = cursor.tagged("bias")?;
                        cursor.parse(rest, "bias")?
                    };
                    let linear = LinearModel { weights, bias };
                    if algorithm == Algorithm::Lr {
                        TrainedClassicalModel::Lr(linear)
                    } else {
                        TrainedClassicalModel::Svc(linear)
                    }
                }
                Algorithm::Knn => {
                    let k: usize = {
                        let rest = cursor.tagged("k")?;
                        cursor.parse(rest, "neighbor count")?
                    };
                    let dimension: usize = {
                        let rest = cursor.tagged("dimension")?;
                        cursor.parse(rest, "row dimension")?
                    };
                    let row_count: usize = {
                        let rest = cursor.tagged("rows")?;
                        cursor.parse(rest, "row count")?
                    };
                    let mut rows = Vec::with_capacity(row_count);
                    let mut labels = Vec::with_capacity(row_count);
                    for _ in 0..row_count {
                        let line = cursor.next_line()?;
                        let mut parts = line.split_whitespace();
                        let label: u8 =
                            cursor.parse(parts.next().unwrap_or(""), "row label")?;
                        let mut entries = Vec::new();
                        for pair in parts {
                            let (i, c) = pair
                                .split_once(':')
                                .ok_or_else(|| corrupt(format!("bad row entry `{pair}`")))?;
                            entries.push((
                                cursor.parse::<usize>(i, "entry index")?,
                                cursor.parse::<u32>(c, "entry count")?,
                            ));
                        }
                        let row = CountVector::from_entries(dimension, entries)
                            .map_err(|e| corrupt(format!("row entries: {e}")))?;
                        rows.push(row);
                        labels.push(label);
                    }
                    TrainedClassicalModel::Knn(KnnModel { rows, labels, k })
                }
                Algorithm::Dtc => TrainedClassicalModel::Dtc(read_tree(&mut cursor)?),
                Algorithm::Rfc => {
                    let tree_count: usize = {
                        let rest = cursor.tagged("trees")?;
                        cursor.parse(rest, "tree count")?
                    };
                    let seeds: Vec<u64> = {
                        let rest = cursor.tagged("seeds")?;
                        rest.split_whitespace()
                            .map(|t| cursor.parse(t, "tree seed"))
                            .collect::<Result<_, _>>()?
                    };
                    if seeds.len() != tree_count {
                        return Err(corrupt("seed list disagrees with tree count"));
                    }
                    let mut trees = Vec::with_capacity(tree_count);
                    for _ in 0..tree_count {
                        trees.push(read_tree(&mut cursor)?);
                    }
                    TrainedClassicalModel::Rfc(crate::classical::ForestModel {
                        trees,
                        tree_seeds: seeds,
                    })
                }
            };
            AnyModel::Classical(trained)
        }
        ModelChoice::Neural(kind) => {
            let dims_rest = cursor.tagged("dims")?;
            let dims: Vec<usize> = dims_rest
                .split_whitespace()
                .map(|t| cursor.parse(t, "model dimension"))
                .collect::<Result<_, _>>()?;
            let param_count: usize = {
                let rest = cursor.tagged("params")?;
                cursor.parse(rest, "parameter count")?
            };
            let params = cursor.floats(param_count, "parameter")?;
            let neural = match kind {
                ModelKind::Rnn => {
                    let [vocab_size, embed_dim, hidden_dim] = dims[..] else {
                        return Err(corrupt("recurrent model needs three dimensions"));
                    };
                    let mut model =
                        RnnModel::new(vocab_size, embed_dim, hidden_dim, &mut Lcg64::new(0));
                    if model.params.len() != params.len() {
                        return Err(corrupt("parameter count disagrees with dimensions"));
                    }
                    model.params = params;
                    NeuralModel::Rnn(model)
                }
                ModelKind::Transformer => {
                    let [vocab_size, max_len, model_dim, ffn_dim, heads, layers] = dims[..]
                    else {
                        return Err(corrupt("transformer needs six dimensions"));
                    };
                    let mut model = TransformerModel::new(
                        vocab_size,
                        max_len,
                        model_dim,
                        ffn_dim,
                        heads,
                        layers,
                        &mut Lcg64::new(0),
                    )
                    .map_err(|e| corrupt(format!("transformer dimensions: {e}")))?;
                    if model.params.len() != params.len() {
                        return Err(corrupt("parameter count disagrees with dimensions"));
                    }
                    model.params = params;
                    NeuralModel::Transformer(model)
                }
            };
            AnyModel::Neural(neural)
        }
    };

    Ok(PipelineModel {
        preprocess,
        vocab,
        model,
    })
}
