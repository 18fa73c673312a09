//! Command-line front end: every pipeline stage behind one binary.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 internal error. Identical argv and input files produce byte-identical
//! output files.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use manas::harness::ModelChoice;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "manas",
    version,
    about = "Depression screening over short Bangla survey texts"
)]
pub struct Cli {
    /// Master seed; precedence: this flag, config file, MANAS_SEED, then 0
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML config file; command-line flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Print per-epoch training progress on stderr
    #[arg(long, global = true, conflicts_with = "quiet")]
    pub verbose: bool,
    /// Suppress the resolved-config echo
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Worker cap for the split sweep
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a survey CSV and report its shape
    Ingest(IngestArgs),
    /// Generate a synthetic survey corpus
    Synth(SynthArgs),
    /// Train one model and save it
    Train(TrainArgs),
    /// Train and evaluate models, writing report files
    Evaluate(EvaluateArgs),
    /// Accuracy sweep over train/test fractions
    CompareSplits(CompareSplitsArgs),
    /// Score one text with a saved model
    Predict(PredictArgs),
    /// Ranked token frequencies over a corpus
    Wordfreq(WordfreqArgs),
    /// Re-render a saved report CSV
    Report(ReportArgs),
}

fn parse_model(text: &str) -> Result<ModelChoice, String> {
    ModelChoice::parse(text).ok_or_else(|| {
        "choose one of mnb, lr, knn, dtc, rfc, svc, rnn, bert".to_string()
    })
}

/// `--algo` value on the multi-model subcommands: a model key or `all`.
#[derive(Clone, Copy)]
pub enum AlgoSelect {
    All,
    One(ModelChoice),
}

fn parse_model_or_all(text: &str) -> Result<AlgoSelect, String> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(AlgoSelect::All);
    }
    parse_model(text).map(AlgoSelect::One).map_err(|e| {
        format!("{e}, or `all`")
    })
}

#[derive(Args)]
pub struct IngestArgs {
    /// Survey CSV with TypeOfOpinion and Status columns
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Write a normalized copy of the corpus here
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Number of records
    #[arg(long)]
    pub n: Option<usize>,
    /// Fraction of depressed records
    #[arg(long)]
    pub balance: Option<f64>,
    /// Probability that a record's tokens match its class
    #[arg(long)]
    pub signal: Option<f64>,
    /// Output CSV path; stdout when absent
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrainArgs {
    /// Survey CSV to train on
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Model to train
    #[arg(long, value_parser = parse_model)]
    pub algo: Option<ModelChoice>,
    /// Train fraction; defaults per model (0.90 classical, 0.75 rnn, 0.80 bert)
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Epochs (rnn/bert only)
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Minibatch size (rnn/bert only)
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Adam learning rate (rnn/bert only)
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Validation fraction carved off the training split (rnn/bert only)
    #[arg(long)]
    pub validation_split: Option<f64>,
    /// Minimum corpus frequency for a vocabulary token
    #[arg(long)]
    pub min_count: Option<u32>,
    /// Directory for the model file and history.csv
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// Survey CSV to evaluate on
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Models to evaluate (repeatable); `all` for all eight; default: the six classical
    #[arg(long, value_parser = parse_model_or_all)]
    pub algo: Vec<AlgoSelect>,
    /// Train fraction shared by all models; defaults per model when absent
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Minimum corpus frequency for a vocabulary token
    #[arg(long)]
    pub min_count: Option<u32>,
    /// Directory for report.md and report.csv
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareSplitsArgs {
    /// Survey CSV to sweep over
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Models to compare (repeatable); default: the six classical
    #[arg(long, value_parser = parse_model_or_all)]
    pub algo: Vec<AlgoSelect>,
    /// Comma-separated train fractions; default 0.50,0.60,0.70,0.75,0.80,0.90
    #[arg(long, value_delimiter = ',')]
    pub fractions: Vec<f64>,
    /// Directory for report.md and report.csv
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,
    /// Text to score
    #[arg(long)]
    pub text: Option<String>,
}

#[derive(Args)]
pub struct WordfreqArgs {
    /// Survey CSV to count over
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
    /// Number of top tokens to keep
    #[arg(long)]
    pub top: Option<usize>,
    /// Output CSV path; stdout when absent
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// report.csv written by evaluate or compare-splits
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Output format
    #[arg(long, value_parser = ["markdown", "csv"])]
    pub format: Option<String>,
    /// Output path; stdout when absent
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// Anticipated failures, split by exit code.
pub enum CliError {
    /// Exit 1: the invocation itself is wrong (missing or conflicting flags).
    Usage { message: String, usage: String },
    /// Exit 2: inputs or configuration failed validation.
    Data(String),
}

struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Debug
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!("{}", record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(error) => {
            use clap::error::ErrorKind;
            let code = match error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = error.print();
            return code;
        }
    };
    if cli.verbose {
        let _ = log::set_logger(&LOGGER);
        log::set_max_level(log::LevelFilter::Debug);
    }
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Usage { message, usage }) => {
            eprintln!("error: {message}");
            eprintln!("{usage}");
            1
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn main() {
    let code = match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("error: internal failure, see the panic message above");
            3
        }
    };
    std::process::exit(code);
}
