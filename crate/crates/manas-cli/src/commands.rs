//! Subcommand implementations.
//!
//! Every handler resolves its settings (flags over config file), echoes the
//! resolved configuration on stdout unless `--quiet`, then runs the library
//! call and writes its outputs. Report and model files never contain the
//! echo or any timing, so reruns with the same inputs are byte-identical.

use crate::config::{self, FileConfig};
use crate::{
    AlgoSelect, Cli, CliError, Command, CompareSplitsArgs, EvaluateArgs, IngestArgs, PredictArgs,
    ReportArgs, SynthArgs, TrainArgs, WordfreqArgs,
};
use manas::corpus::{self, Corpus};
use manas::harness::{
    self, build_sections, load_model, parse_report, run_experiment, run_experiment_with_model,
    save_model, sections_to_csv, sections_to_markdown, word_frequencies, word_frequencies_csv,
    ExperimentConfig, HarnessError, Hyperparams, ModelChoice, DEFAULT_SWEEP_FRACTIONS,
};
use manas::preprocess::PreprocessConfig;
use std::path::{Path, PathBuf};

const USAGE_INGEST: &str = "usage: manas ingest --input <FILE> [--output <FILE>]";
const USAGE_SYNTH: &str =
    "usage: manas synth --n <N> [--balance <F>] [--signal <F>] [--output <FILE>]";
const USAGE_TRAIN: &str = "usage: manas train --data <FILE> --algo <ALGO> [--train-fraction <F>] \
     [--epochs <N>] [--batch-size <N>] [--learning-rate <F>] [--validation-split <F>] \
     [--min-count <N>] [--out-dir <DIR>]";
const USAGE_EVALUATE: &str = "usage: manas evaluate --data <FILE> [--algo <ALGO>]... \
     [--train-fraction <F>] [--min-count <N>] [--out-dir <DIR>]";
const USAGE_COMPARE: &str = "usage: manas compare-splits --data <FILE> [--algo <ALGO>]... \
     [--fractions <F,F,...>] [--out-dir <DIR>]";
const USAGE_PREDICT: &str = "usage: manas predict --model <FILE> --text <TEXT>";
const USAGE_WORDFREQ: &str = "usage: manas wordfreq --data <FILE> [--top <N>] [--output <FILE>]";
const USAGE_REPORT: &str =
    "usage: manas report --input <FILE> [--format markdown|csv] [--output <FILE>]";

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let seed = config::resolve_seed(cli.seed, file.seed)?;
    let jobs = cli.jobs.or(file.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Usage {
            message: "--jobs must be at least 1".into(),
            usage: USAGE_COMPARE.into(),
        });
    }
    let quiet = cli.quiet;
    match cli.command {
        Command::Ingest(args) => ingest(args, file.ingest, quiet),
        Command::Synth(args) => synth(args, file.synth, seed, quiet),
        Command::Train(args) => train(args, file.train, seed, quiet),
        Command::Evaluate(args) => evaluate(args, file.evaluate, seed, quiet),
        Command::CompareSplits(args) => {
            compare_splits(args, file.compare_splits, seed, jobs, quiet)
        }
        Command::Predict(args) => predict(args, file.predict, quiet),
        Command::Wordfreq(args) => wordfreq(args, file.wordfreq, quiet),
        Command::Report(args) => report(args, file.report, quiet),
    }
}

fn map_harness(error: HarnessError) -> CliError {
    CliError::Data(error.to_string())
}

fn map_corpus(error: corpus::CorpusError) -> CliError {
    CliError::Data(error.to_string())
}

fn echo(quiet: bool, line: String) {
    if !quiet {
        println!("{line}");
    }
}

fn path_or_dash(path: Option<&Path>) -> String {
    path.map_or_else(|| "-".into(), |p| p.display().to_string())
}

fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("writing {}: {e}", path.display())))
}

/// Writes to the path when given, otherwise prints to stdout.
fn emit(output: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            write_text(path, contents)?;
            println!("wrote {}", path.display());
        }
        None => print!("{contents}"),
    }
    Ok(())
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Data(format!("creating {}: {e}", dir.display())))
}

fn load_corpus(path: &Path) -> Result<Corpus, CliError> {
    corpus::load_csv(path).map_err(map_corpus)
}

fn classical_six() -> Vec<ModelChoice> {
    ModelChoice::all()
        .into_iter()
        .filter(|m| !m.is_neural())
        .collect()
}

fn push_unique(out: &mut Vec<ModelChoice>, model: ModelChoice) {
    if !out.contains(&model) {
        out.push(model);
    }
}

/// Model list for the multi-model commands: flags beat the config file, and
/// with neither the six classical models run in their fixed table order.
fn resolve_models(
    flags: &[AlgoSelect],
    file: Option<&[String]>,
) -> Result<Vec<ModelChoice>, CliError> {
    let mut out = Vec::new();
    if !flags.is_empty() {
        for select in flags {
            match select {
                AlgoSelect::All => {
                    for model in ModelChoice::all() {
                        push_unique(&mut out, model);
                    }
                }
                AlgoSelect::One(model) => push_unique(&mut out, *model),
            }
        }
        return Ok(out);
    }
    if let Some(names) = file {
        for name in names {
            if name.eq_ignore_ascii_case("all") {
                for model in ModelChoice::all() {
                    push_unique(&mut out, model);
                }
            } else {
                let model = ModelChoice::parse(name).ok_or_else(|| {
                    CliError::Data(format!("config file: unknown model key {name:?}"))
                })?;
                push_unique(&mut out, model);
            }
        }
        if !out.is_empty() {
            return Ok(out);
        }
    }
    Ok(classical_six())
}

fn keys_of(models: &[ModelChoice]) -> String {
    models
        .iter()
        .map(|m| m.key())
        .collect::<Vec<_>>()
        .join(",")
}

fn join_fractions(fractions: &[f64]) -> String {
    fractions
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn ingest(args: IngestArgs, file: config::IngestConfig, quiet: bool) -> Result<(), CliError> {
    let input = config::require(args.input, file.input, "--input", USAGE_INGEST)?;
    let output = args.output.or(file.output);
    echo(
        quiet,
        format!(
            "resolved config: command=ingest input={} output={}",
            input.display(),
            path_or_dash(output.as_deref())
        ),
    );
    let corpus = load_corpus(&input)?;
    let yes = corpus.labels().iter().filter(|&&y| y == 1).count();
    println!(
        "records {}: {} yes, {} no",
        corpus.len(),
        yes,
        corpus.len() - yes
    );
    if let Some(path) = output {
        corpus::write_csv(&corpus, &path).map_err(map_corpus)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn synth(
    args: SynthArgs,
    file: config::SynthConfig,
    seed: u64,
    quiet: bool,
) -> Result<(), CliError> {
    let n = config::require(args.n, file.n, "--n", USAGE_SYNTH)?;
    let balance = args.balance.or(file.balance).unwrap_or(0.5);
    let signal = args.signal.or(file.signal).unwrap_or(0.9);
    let output = args.output.or(file.output);
    echo(
        quiet,
        format!(
            "resolved config: command=synth n={n} balance={balance} signal={signal} seed={seed} output={}",
            path_or_dash(output.as_deref())
        ),
    );
    let corpus = corpus::synthesize_corpus(n, balance, signal, seed).map_err(map_corpus)?;
    match output {
        Some(path) => {
            corpus::write_csv(&corpus, &path).map_err(map_corpus)?;
            println!("wrote {} records to {}", corpus.len(), path.display());
        }
        None => print!("{}", corpus::to_csv_string(&corpus)),
    }
    Ok(())
}

fn train(
    args: TrainArgs,
    file: config::TrainConfig,
    seed: u64,
    quiet: bool,
) -> Result<(), CliError> {
    let data = config::require(args.data, file.data, "--data", USAGE_TRAIN)?;
    let file_algo = file
        .algo
        .map(|name| {
            ModelChoice::parse(&name).ok_or_else(|| {
                CliError::Data(format!("config file: unknown model key {name:?}"))
            })
        })
        .transpose()?;
    let algo = config::require(args.algo, file_algo, "--algo", USAGE_TRAIN)?;
    let out_dir = args.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("."));

    let mut experiment = ExperimentConfig::for_model(algo, seed);
    if let Some(fraction) = args.train_fraction.or(file.train_fraction) {
        experiment.train_fraction = fraction;
    }
    if let Some(min_count) = args.min_count.or(file.min_count) {
        experiment.min_count = min_count;
    }
    let epochs = args.epochs.or(file.epochs);
    let batch_size = args.batch_size.or(file.batch_size);
    let learning_rate = args.learning_rate.or(file.learning_rate);
    let validation_split = args.validation_split.or(file.validation_split);
    match &mut experiment.hyperparams {
        Hyperparams::Neural(settings) => {
            if let Some(value) = epochs {
                settings.epochs = value;
            }
            if let Some(value) = batch_size {
                settings.batch_size = value;
            }
            if let Some(value) = learning_rate {
                settings.learning_rate = value;
            }
            if let Some(value) = validation_split {
                settings.validation_split = value;
            }
        }
        Hyperparams::Classical(_) => {
            if epochs.is_some()
                || batch_size.is_some()
                || learning_rate.is_some()
                || validation_split.is_some()
            {
                return Err(CliError::Usage {
                    message: format!(
                        "--epochs, --batch-size, --learning-rate, and --validation-split \
                         apply only to rnn and bert, not {}",
                        algo.key()
                    ),
                    usage: USAGE_TRAIN.into(),
                });
            }
        }
    }

    let mut line = format!(
        "resolved config: command=train data={} algo={} train_fraction={} min_count={} seed={} out_dir={}",
        data.display(),
        algo.key(),
        experiment.train_fraction,
        experiment.min_count,
        seed,
        out_dir.display()
    );
    if let Hyperparams::Neural(settings) = &experiment.hyperparams {
        line.push_str(&format!(
            " epochs={} batch_size={} learning_rate={} validation_split={}",
            settings.epochs, settings.batch_size, settings.learning_rate,
            settings.validation_split
        ));
    }
    echo(quiet, line);

    let corpus = load_corpus(&data)?;
    let (result, bundle) =
        run_experiment_with_model(&corpus, &experiment).map_err(map_harness)?;
    prepare_out_dir(&out_dir)?;
    let model_path = out_dir.join(format!("model.{}.mdl", algo.key()));
    save_model(&bundle, &model_path)
        .map_err(HarnessError::Persist)
        .map_err(map_harness)?;
    println!(
        "trained {}: train accuracy {:.4}, test accuracy {:.4}",
        algo.display(),
        result.train_accuracy,
        result.accuracy
    );
    println!("wrote {}", model_path.display());
    if let Some(history) = &result.history {
        let history_path = out_dir.join("history.csv");
        write_text(&history_path, &history.to_csv())?;
        println!("wrote {}", history_path.display());
    }
    Ok(())
}

fn evaluate(
    args: EvaluateArgs,
    file: config::EvaluateConfig,
    seed: u64,
    quiet: bool,
) -> Result<(), CliError> {
    let data = config::require(args.data, file.data, "--data", USAGE_EVALUATE)?;
    let models = resolve_models(&args.algo, file.algo.as_deref())?;
    let train_fraction = args.train_fraction.or(file.train_fraction);
    let min_count = args.min_count.or(file.min_count);
    let out_dir = args.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("."));
    echo(
        quiet,
        format!(
            "resolved config: command=evaluate data={} algos={} train_fraction={} min_count={} seed={} out_dir={}",
            data.display(),
            keys_of(&models),
            train_fraction.map_or_else(|| "per-model".into(), |f| f.to_string()),
            min_count.map_or_else(|| "default".into(), |m| m.to_string()),
            seed,
            out_dir.display()
        ),
    );
    let corpus = load_corpus(&data)?;
    let mut results = Vec::with_capacity(models.len());
    for model in &models {
        let mut experiment = ExperimentConfig::for_model(*model, seed);
        if let Some(fraction) = train_fraction {
            experiment.train_fraction = fraction;
        }
        if let Some(value) = min_count {
            experiment.min_count = value;
        }
        let result = run_experiment(&corpus, &experiment).map_err(map_harness)?;
        println!(
            "{}: test accuracy {:.4}",
            model.display(),
            result.accuracy
        );
        results.push(result);
    }
    let sections = build_sections(&results, None);
    prepare_out_dir(&out_dir)?;
    let csv_path = out_dir.join("report.csv");
    let md_path = out_dir.join("report.md");
    write_text(&csv_path, &sections_to_csv(&sections))?;
    println!("wrote {}", csv_path.display());
    write_text(&md_path, &sections_to_markdown(&sections))?;
    println!("wrote {}", md_path.display());
    Ok(())
}

fn compare_splits(
    args: CompareSplitsArgs,
    file: config::CompareSplitsConfig,
    seed: u64,
    jobs: usize,
    quiet: bool,
) -> Result<(), CliError> {
    let data = config::require(args.data, file.data, "--data", USAGE_COMPARE)?;
    let models = resolve_models(&args.algo, file.algo.as_deref())?;
    let fractions = if args.fractions.is_empty() {
        file.fractions
            .unwrap_or_else(|| DEFAULT_SWEEP_FRACTIONS.to_vec())
    } else {
        args.fractions
    };
    let out_dir = args.out_dir.or(file.out_dir).unwrap_or_else(|| PathBuf::from("."));
    echo(
        quiet,
        format!(
            "resolved config: command=compare-splits data={} algos={} fractions={} seed={} jobs={} out_dir={}",
            data.display(),
            keys_of(&models),
            join_fractions(&fractions),
            seed,
            jobs,
            out_dir.display()
        ),
    );
    let corpus = load_corpus(&data)?;
    let table = harness::compare_splits_jobs(&corpus, &models, &fractions, seed, jobs)
        .map_err(map_harness)?;
    let sections = build_sections(&[], Some(&table));
    prepare_out_dir(&out_dir)?;
    let csv_path = out_dir.join("report.csv");
    let md_path = out_dir.join("report.md");
    write_text(&csv_path, &sections_to_csv(&sections))?;
    println!("wrote {}", csv_path.display());
    write_text(&md_path, &sections_to_markdown(&sections))?;
    println!("wrote {}", md_path.display());
    Ok(())
}

fn predict(args: PredictArgs, file: config::PredictConfig, quiet: bool) -> Result<(), CliError> {
    let model_path = config::require(args.model, file.model, "--model", USAGE_PREDICT)?;
    let text = config::require(args.text, file.text, "--text", USAGE_PREDICT)?;
    echo(
        quiet,
        format!(
            "resolved config: command=predict model={}",
            model_path.display()
        ),
    );
    let pipeline = load_model(&model_path)
        .map_err(HarnessError::Persist)
        .map_err(map_harness)?;
    let (label, probability) = pipeline.predict_text(&text).map_err(map_harness)?;
    println!("label {label} probability {probability}");
    Ok(())
}

fn wordfreq(
    args: WordfreqArgs,
    file: config::WordfreqConfig,
    quiet: bool,
) -> Result<(), CliError> {
    let data = config::require(args.data, file.data, "--data", USAGE_WORDFREQ)?;
    let top = args.top.or(file.top).unwrap_or(20);
    let output = args.output.or(file.output);
    echo(
        quiet,
        format!(
            "resolved config: command=wordfreq data={} top={top} output={}",
            data.display(),
            path_or_dash(output.as_deref())
        ),
    );
    let corpus = load_corpus(&data)?;
    let ranked = word_frequencies(&corpus, &PreprocessConfig::default(), top);
    emit(output.as_deref(), &word_frequencies_csv(&ranked))
}

fn report(args: ReportArgs, file: config::ReportConfig, quiet: bool) -> Result<(), CliError> {
    let input = config::require(args.input, file.input, "--input", USAGE_REPORT)?;
    let format = args
        .format
        .or(file.format)
        .unwrap_or_else(|| "markdown".into());
    if format != "markdown" && format != "csv" {
        return Err(CliError::Data(format!(
            "config file: format must be markdown or csv, got {format:?}"
        )));
    }
    let output = args.output.or(file.output);
    echo(
        quiet,
        format!(
            "resolved config: command=report input={} format={format} output={}",
            input.display(),
            path_or_dash(output.as_deref())
        ),
    );
    let text = std::fs::read_to_string(&input)
        .map_err(|e| CliError::Data(format!("reading {}: {e}", input.display())))?;
    let sections = parse_report(&text).map_err(map_harness)?;
    let rendered = match format.as_str() {
        "csv" => sections_to_csv(&sections),
        _ => sections_to_markdown(&sections),
    };
    emit(output.as_deref(), &rendered)
}
