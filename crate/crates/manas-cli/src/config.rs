//! Optional TOML configuration and flag resolution.
//!
//! Precedence for every setting: command-line flag, then config file, then
//! (seed only) the MANAS_SEED environment variable, then the built-in default.

use crate::CliError;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub ingest: IngestConfig,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub evaluate: EvaluateConfig,
    #[serde(rename = "compare-splits", default)]
    pub compare_splits: CompareSplitsConfig,
    #[serde(default)]
    pub predict: PredictConfig,
    #[serde(default)]
    pub wordfreq: WordfreqConfig,
    #[serde(default)]
    pub report: ReportConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n: Option<usize>,
    pub balance: Option<f64>,
    pub signal: Option<f64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub data: Option<PathBuf>,
    pub algo: Option<String>,
    pub train_fraction: Option<f64>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub validation_split: Option<f64>,
    pub min_count: Option<u32>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateConfig {
    pub data: Option<PathBuf>,
    pub algo: Option<Vec<String>>,
    pub train_fraction: Option<f64>,
    pub min_count: Option<u32>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSplitsConfig {
    pub data: Option<PathBuf>,
    pub algo: Option<Vec<String>>,
    pub fractions: Option<Vec<f64>>,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictConfig {
    pub model: Option<PathBuf>,
    pub text: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordfreqConfig {
    pub data: Option<PathBuf>,
    pub top: Option<usize>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Data(format!("config file {}: {e}", path.display()))
        })?;
        toml::from_str(&text).map_err(|e| {
            CliError::Data(format!("config file {}: {e}", path.display()))
        })
    }
}

/// Seed resolution: flag, config file, MANAS_SEED, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag.or(file) {
        return Ok(seed);
    }
    match std::env::var("MANAS_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Data(format!("MANAS_SEED is not an unsigned integer: {text:?}"))
        }),
        Err(_) => Ok(0),
    }
}

/// A setting that is mandatory once the flag and config layers are merged.
pub fn require<T>(
    flag: Option<T>,
    file: Option<T>,
    name: &str,
    usage: &str,
) -> Result<T, CliError> {
    flag.or(file).ok_or_else(|| CliError::Usage {
        message: format!("missing required setting `{name}`"),
        usage: usage.to_string(),
    })
}
