//! Labeled survey corpora: CSV ingestion, label encoding, splitting, and
//! synthetic corpus generation.
//!
//! The on-disk form is a UTF-8, comma-delimited CSV with a header row
//! containing the columns `TypeOfOpinion` (free text) and `Status`
//! (`Yes`/`No`). Extra columns are ignored with a warning.

use crate::rng::Lcg64;
use std::path::Path;
use thiserror::Error;

/// Column holding the opinion text.
pub const TEXT_COLUMN: &str = "TypeOfOpinion";
/// Column holding the yes/no depression status.
pub const STATUS_COLUMN: &str = "Status";

/// Errors raised while loading, validating, or splitting a corpus.
#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input file not found: {0}")]
    MissingFile(String),
    #[error("required column {0:?} missing from header")]
    MissingColumn(String),
    #[error("row {row}: invalid status label {value:?} (expected yes or no)")]
    InvalidLabel { row: usize, value: String },
    #[error("row {row}: opinion text is empty")]
    EmptyText { row: usize },
    #[error("file contains a header but no data rows")]
    EmptyCorpus,
    #[error("split with fraction {fraction} over {n} records leaves an empty partition")]
    DegenerateSplit { n: usize, fraction: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One survey response: free-form opinion text and a binary depression label
/// (1 = depressed, 0 = not depressed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyRecord {
    pub opinion_text: String,
    pub status: u8,
}

/// An ordered collection of survey records.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    records: Vec<SurveyRecord>,
}

impl Corpus {
    /// Builds a corpus, validating every record.
    pub fn new(records: Vec<SurveyRecord>) -> Result<Self, CorpusError> {
        if records.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        for (i, r) in records.iter().enumerate() {
            if r.opinion_text.trim().is_empty() {
                return Err(CorpusError::EmptyText { row: i + 1 });
            }
            if r.status > 1 {
                return Err(CorpusError::InvalidLabel {
                    row: i + 1,
                    value: r.status.to_string(),
                });
            }
        }
        Ok(Corpus { records })
    }

    pub fn records(&self) -> &[SurveyRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of records per label: `[count of 0, count of 1]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.records.iter().filter(|r| r.status == 1).count();
        [self.records.len() - ones, ones]
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.status).collect()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.opinion_text.as_str())
    }
}

/// A disjoint train/test partition of corpus indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub train_fraction: f64,
    pub seed: u64,
}

/// Maps a raw status string to a binary label: `yes` -> 1, `no` -> 0,
/// case-insensitively after trimming.
pub fn encode_status(raw: &str) -> Result<u8, CorpusError> {
    let trimmed = raw.trim();
    if trimmed.eq_ignore_ascii_case("yes") {
        Ok(1)
    } else if trimmed.eq_ignore_ascii_case("no") {
        Ok(0)
    } else {
        Err(CorpusError::InvalidLabel {
            row: 0,
            value: raw.to_string(),
        })
    }
}

/// Loads a corpus from a CSV file.
///
/// The header must contain both [`TEXT_COLUMN`] and [`STATUS_COLUMN`]
/// (exact match after trimming); other columns are ignored with a warning.
/// Rows with blank text or a status outside yes/no are hard errors rather
/// than silently dropped.
pub fn load_csv(path: &Path) -> Result<Corpus, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;

    let headers = reader.headers()?.clone();
    let mut text_idx = None;
    let mut status_idx = None;
    let mut extra = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        // spreadsheet exports often prefix the first header cell with a BOM
        let name = name.trim().trim_start_matches('\u{feff}');
        match name {
            TEXT_COLUMN if text_idx.is_none() => text_idx = Some(i),
            STATUS_COLUMN if status_idx.is_none() => status_idx = Some(i),
            other => extra.push(other.to_string()),
        }
    }
    let text_idx = text_idx.ok_or_else(|| CorpusError::MissingColumn(TEXT_COLUMN.into()))?;
    let status_idx = status_idx.ok_or_else(|| CorpusError::MissingColumn(STATUS_COLUMN.into()))?;
    if !extra.is_empty() {
        log::warn!("ignoring extra columns: {}", extra.join(", "));
    }

    let mut records = Vec::new();
    for (row_num, result) in reader.records().enumerate() {
        let row = row_num + 1; // 1-based data row
        let record = result?;
        let text = record.get(text_idx).unwrap_or("").to_string();
        let raw_status = record.get(status_idx).unwrap_or("");
        if text.trim().is_empty() {
            return Err(CorpusError::EmptyText { row });
        }
        let status = encode_status(raw_status).map_err(|_| CorpusError::InvalidLabel {
            row,
            value: raw_status.to_string(),
        })?;
        records.push(SurveyRecord {
            opinion_text: text,
            status,
        });
    }
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(Corpus { records })
}

/// Renders a corpus as CSV text in the same dialect [`load_csv`] reads,
/// with statuses rendered as `Yes`/`No`.
pub fn to_csv_string(corpus: &Corpus) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([TEXT_COLUMN, STATUS_COLUMN])
        .expect("in-memory csv");
    for record in corpus.records() {
        let status = if record.status == 1 { "Yes" } else { "No" };
        writer
            .write_record([record.opinion_text.as_str(), status])
            .expect("in-memory csv");
    }
    let bytes = writer.into_inner().expect("in-memory csv");
    String::from_utf8(bytes).expect("csv writer emits utf-8")
}

/// Writes [`to_csv_string`] to a file. `load_csv(write_csv(c)) == c`.
pub fn write_csv(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([TEXT_COLUMN, STATUS_COLUMN])?;
    for record in corpus.records() {
        let status = if record.status == 1 { "Yes" } else { "No" };
        writer.write_record([record.opinion_text.as_str(), status])?;
    }
    writer.flush()?;
    Ok(())
}

/// Splits corpus indices into train and test partitions.
///
/// Indices `0..N-1` are shuffled by a seeded Fisher-Yates pass (see
/// [`crate::rng`] for the exact generator); the first
/// `floor(N * train_fraction)` shuffled indices become the training set and
/// the remainder the test set. No stratification is applied.
pub fn train_test_split(
    corpus: &Corpus,
    train_fraction: f64,
    seed: u64,
) -> Result<DatasetSplit, CorpusError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(CorpusError::InvalidParameter(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let n = corpus.len();
    if n == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    let n_train = (n as f64 * train_fraction).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(CorpusError::DegenerateSplit {
            n,
            fraction: train_fraction,
        });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = Lcg64::new(seed);
    rng.shuffle(&mut indices);
    let test_indices = indices.split_off(n_train);
    Ok(DatasetSplit {
        train_indices: indices,
        test_indices,
        train_fraction,
        seed,
    })
}

/// Tokens typical of responses labeled depressed.
const DEPRESSED_TOKENS: &[&str] = &[
    "অবসাদ",
    "দুশ্চিন্তা",
    "হতাশা",
    "কষ্ট",
    "ভয়",
    "একাকীত্ব",
    "মানসিক",
    "চাপ",
    "উদ্বেগ",
    "অনিদ্রা",
    "ক্লান্তি",
    "আতঙ্ক",
    "বিষণ্ণতা",
    "অসহায়",
    "মনমরা",
    "যন্ত্রণা",
];

/// Tokens typical of responses labeled not depressed.
const UPBEAT_TOKENS: &[&str] = &[
    "সচেতন",
    "আনন্দ",
    "সুস্থ",
    "শক্তি",
    "আশা",
    "শান্তি",
    "উৎসাহ",
    "বিশ্রাম",
    "ব্যায়াম",
    "রান্না",
    "বাগান",
    "হাসি",
    "প্রশান্তি",
    "সাফল্য",
    "উদ্যম",
    "স্বস্তি",
];

/// Class-neutral vocabulary shared by both labels.
const SHARED_TOKENS: &[&str] = &[
    "করোনা",
    "লকডাউন",
    "পরিস্থিতি",
    "জীবন",
    "বাড়ি",
    "খবর",
    "মানুষ",
    "দেশ",
    "পরিবার",
    "বন্ধু",
    "ইন্টারনেট",
    "পড়াশোনা",
    "স্বাস্থ্য",
    "সংবাদ",
    "বিশ্ব",
    "শহর",
    "অনলাইন",
    "ক্লাস",
    "অফিস",
    "বাজার",
    "হাসপাতাল",
    "টিকা",
    "মাস্ক",
    "দূরত্ব",
];

/// Document lengths drawn uniformly from this inclusive range.
const SYNTH_MIN_TOKENS: usize = 8;
const SYNTH_MAX_TOKENS: usize = 16;

#[doc(hidden)]
pub fn synth_token_inventory() -> Vec<&'static str> {
    let mut all = Vec::new();
    all.extend_from_slice(DEPRESSED_TOKENS);
    all.extend_from_slice(UPBEAT_TOKENS);
    all.extend_from_slice(SHARED_TOKENS);
    all
}

/// Generates a labeled corpus from a fixed Bangla token inventory.
///
/// Exactly `floor(n * class_balance)` records get label 1. Each document
/// draws between 8 and 16 tokens; with probability `signal_strength` a token
/// comes from the label's indicative subset, otherwise from the shared pool.
/// Record order is a seeded shuffle, and the whole construction is a pure
/// function of the arguments.
pub fn synthesize_corpus(
    n: usize,
    class_balance: f64,
    signal_strength: f64,
    seed: u64,
) -> Result<Corpus, CorpusError> {
    if n < 2 {
        return Err(CorpusError::InvalidParameter(format!(
            "need at least 2 records, got {n}"
        )));
    }
    if !(class_balance > 0.0 && class_balance < 1.0) {
        return Err(CorpusError::InvalidParameter(format!(
            "class_balance must be in (0,1), got {class_balance}"
        )));
    }
    if !(0.0..=1.0).contains(&signal_strength) {
        return Err(CorpusError::InvalidParameter(format!(
            "signal_strength must be in [0,1], got {signal_strength}"
        )));
    }

    let n_positive = (n as f64 * class_balance).floor() as usize;
    let mut rng = Lcg64::new(seed);

    let mut labels: Vec<u8> = Vec::with_capacity(n);
    labels.extend(std::iter::repeat_n(1u8, n_positive));
    labels.extend(std::iter::repeat_n(0u8, n - n_positive));
    rng.shuffle(&mut labels);

    let records = labels
        .into_iter()
        .map(|status| {
            let indicative = if status == 1 {
                DEPRESSED_TOKENS
            } else {
                UPBEAT_TOKENS
            };
            let len = SYNTH_MIN_TOKENS + rng.below(SYNTH_MAX_TOKENS - SYNTH_MIN_TOKENS + 1);
            let mut tokens = Vec::with_capacity(len);
            for _ in 0..len {
                let pool = if rng.next_f64() < signal_strength {
                    indicative
                } else {
                    SHARED_TOKENS
                };
                tokens.push(pool[rng.below(pool.len())]);
            }
            SurveyRecord {
                opinion_text: tokens.join(" "),
                status,
            }
        })
        .collect();

    Ok(Corpus { records })
}
