//! Bag-of-Words features: vocabulary construction over a training corpus and
//! sparse term-count vectors.
//!
//! Vocabulary indices follow lexicographic code-point order rather than
//! first-seen order, so downstream models are bit-reproducible regardless of
//! how the training documents were shuffled.

use crate::preprocess::TokenSequence;
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors raised while building features.
#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("no tokens survive preprocessing; vocabulary would be empty")]
    EmptyVocabulary,
    #[error("label {value} at position {index} is not binary")]
    NonBinaryLabel { index: usize, value: u8 },
    #[error("feature index {index} is outside dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
}

/// A frozen token→index bijection with contiguous indices `0..V-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    token_to_index: BTreeMap<String, usize>,
    index_to_token: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary from training token sequences.
    ///
    /// Tokens occurring fewer than `min_count` times across all sequences
    /// are excluded. Index assignment is lexicographic by code point, so the
    /// result does not depend on sequence order.
    pub fn build(
        sequences: &[TokenSequence],
        min_count: u32,
    ) -> Result<Vocabulary, VectorizeError> {
        let min_count = min_count.max(1);
        let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
        for sequence in sequences {
            for token in sequence {
                *counts.entry(token.as_str()).or_insert(0) += 1;
            }
        }
        let index_to_token: Vec<String> = counts
            .iter()
            .filter(|(_, &c)| c >= min_count)
            .map(|(&t, _)| t.to_string())
            .collect();
        if index_to_token.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        let token_to_index = index_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            token_to_index,
            index_to_token,
        })
    }

    pub fn len(&self) -> usize {
        self.index_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_token.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.token_to_index.get(token).copied()
    }

    pub fn token_at(&self, index: usize) -> Option<&str> {
        self.index_to_token.get(index).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.index_to_token
    }

    /// Serializes as one token per line; the line number is the index.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for token in &self.index_to_token {
            out.push_str(token);
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Vocabulary::to_text`].
    pub fn from_text(text: &str) -> Result<Vocabulary, VectorizeError> {
        let index_to_token: Vec<String> = text.lines().map(str::to_string).collect();
        if index_to_token.is_empty() {
            return Err(VectorizeError::EmptyVocabulary);
        }
        let token_to_index = index_to_token
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            token_to_index,
            index_to_token,
        })
    }
}

/// Sparse term-count vector over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountVector {
    entries: BTreeMap<usize, u32>,
    dimension: usize,
}

impl CountVector {
    /// Rebuilds a vector from explicit (index, count) pairs, the layout model
    /// files use. Zero counts are dropped; later duplicates overwrite earlier.
    pub fn from_entries(
        dimension: usize,
        entries: impl IntoIterator<Item = (usize, u32)>,
    ) -> Result<CountVector, VectorizeError> {
        let mut map = BTreeMap::new();
        for (index, count) in entries {
            if index >= dimension {
                return Err(VectorizeError::IndexOutOfRange { index, dimension });
            }
            if count > 0 {
                map.insert(index, count);
            }
        }
        Ok(CountVector {
            entries: map,
            dimension,
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.entries.iter().map(|(&i, &c)| (i, c))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn count(&self, index: usize) -> u32 {
        self.entries.get(&index).copied().unwrap_or(0)
    }

    /// Total number of in-vocabulary tokens in the source document.
    pub fn total(&self) -> u64 {
        self.entries.values().map(|&c| u64::from(c)).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dimension];
        for (&i, &c) in &self.entries {
            dense[i] = f64::from(c);
        }
        dense
    }
}

/// Count vectors sharing one vocabulary, aligned with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<CountVector>,
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<CountVector>, labels: Vec<u8>) -> Result<Self, VectorizeError> {
        let labels = encode_labels(&labels)?;
        assert_eq!(rows.len(), labels.len(), "rows and labels must align");
        if let Some(first) = rows.first() {
            assert!(
                rows.iter().all(|r| r.dimension() == first.dimension()),
                "rows must share one vocabulary dimension"
            );
        }
        Ok(FeatureMatrix { rows, labels })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.rows.first().map_or(0, CountVector::dimension)
    }
}

/// Maps a token sequence to term counts over `vocab`.
///
/// Out-of-vocabulary tokens are silently dropped; that is the test-time
/// behavior for words never seen in training.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary) -> CountVector {
    let mut entries: BTreeMap<usize, u32> = BTreeMap::new();
    for token in tokens {
        if let Some(index) = vocab.index_of(token) {
            *entries.entry(index).or_insert(0) += 1;
        }
    }
    CountVector {
        entries,
        dimension: vocab.len(),
    }
}

/// Validates that labels are binary and passes them through unchanged.
///
/// Exists as an explicit pipeline stage: label encoding happens between the
/// split and model training.
pub fn encode_labels(statuses: &[u8]) -> Result<Vec<u8>, VectorizeError> {
    for (index, &value) in statuses.iter().enumerate() {
        if value > 1 {
            return Err(VectorizeError::NonBinaryLabel { index, value });
        }
    }
    Ok(statuses.to_vec())
}

/// Sums count vectors into a corpus-level term-frequency table.
pub fn term_frequency_table(rows: &[CountVector]) -> BTreeMap<usize, u64> {
    let mut table = BTreeMap::new();
    for row in rows {
        for (index, count) in row.entries() {
            *table.entry(index).or_insert(0u64) += u64::from(count);
        }
    }
    table
}
