//! Text normalization: punctuation stripping, whitespace tokenization, and
//! stopword removal, in that fixed order.
//!
//! All operations work on Unicode scalar values, never raw bytes, so Bangla
//! combining marks pass through intact. No stemming or lemmatization is
//! applied; survey fragments like "পড়" are kept exactly as written.

use std::collections::BTreeSet;
use std::path::Path;

/// Ordered list of non-empty tokens produced by the pipeline.
pub type TokenSequence = Vec<String>;

/// Default stopword inventory compiled into the library.
const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_bn.txt");

/// Punctuation stripped by default: the survey pipeline's listed characters
/// extended with sentence terminators and the Bangla danda.
const DEFAULT_PUNCTUATION: &[char] = &[
    '[', '(', ')', ',', '\\', '$', '%', '^', '&', '*', '+', '=', '}', '{', ']', ':', '\'', '"',
    '/', '>', '.', '!', '?', ';', '<', '-', '_', '#', '।',
];

/// Configuration for the normalization pipeline.
///
/// `casefold_ascii` affects stopword matching only: when set, ASCII letters
/// are lowercased before comparison against the stopword list, but emitted
/// tokens keep their original form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub punctuation: BTreeSet<char>,
    pub stopwords: BTreeSet<String>,
    pub casefold_ascii: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            punctuation: DEFAULT_PUNCTUATION.iter().copied().collect(),
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            casefold_ascii: false,
        }
    }
}

impl PreprocessConfig {
    /// A config that strips the default punctuation but removes no tokens.
    pub fn without_stopwords() -> Self {
        PreprocessConfig {
            stopwords: BTreeSet::new(),
            ..PreprocessConfig::default()
        }
    }
}

/// Parses a stopword file body: one token per line, `#` comment lines and
/// blank lines ignored, surrounding whitespace trimmed.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(str::to_string)
        .collect()
}

/// Reads a stopword file from disk in the format of [`parse_stopwords`].
pub fn load_stopwords(path: &Path) -> std::io::Result<BTreeSet<String>> {
    Ok(parse_stopwords(&std::fs::read_to_string(path)?))
}

/// Replaces every punctuation code point with a single space.
///
/// Replacement rather than deletion, so `"word,word"` still splits into two
/// tokens. All other code points are preserved.
pub fn strip_punctuation(text: &str, config: &PreprocessConfig) -> String {
    text.chars()
        .map(|c| if config.punctuation.contains(&c) { ' ' } else { c })
        .collect()
}

/// Splits on maximal runs of Unicode whitespace. Never yields empty tokens.
pub fn tokenize(text: &str) -> TokenSequence {
    text.split_whitespace().map(str::to_string).collect()
}

/// Drops tokens present in the stopword list, keeping relative order.
pub fn remove_stopwords(tokens: TokenSequence, config: &PreprocessConfig) -> TokenSequence {
    tokens
        .into_iter()
        .filter(|token| {
            if config.casefold_ascii {
                !config.stopwords.contains(&token.to_ascii_lowercase())
            } else {
                !config.stopwords.contains(token)
            }
        })
        .collect()
}

/// Runs the full pipeline: punctuation strip, tokenize, stopword removal.
pub fn preprocess_document(text: &str, config: &PreprocessConfig) -> TokenSequence {
    remove_stopwords(tokenize(&strip_punctuation(text, config)), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synth_token_inventory;
    use crate::rng::Lcg64;

    #[test]
    fn strip_replaces_each_punctuation_with_one_space() {
        let config = PreprocessConfig::default();
        assert_eq!(strip_punctuation("a$%^b", &config), "a   b");
        assert_eq!(
            strip_punctuation("স্বাস্থ সচেতন হয়েছি,", &config),
            "স্বাস্থ সচেতন হয়েছি "
        );
        assert_eq!(strip_punctuation("", &config), "");
    }

    #[test]
    fn strip_preserves_non_punctuation() {
        let config = PreprocessConfig::default();
        assert_eq!(strip_punctuation("অনেক সময়", &config), "অনেক সময়");
    }

    #[test]
    fn tokenize_splits_on_whitespace_runs() {
        assert_eq!(
            tokenize("স্বাস্থ সচেতন হয়েছি"),
            vec!["স্বাস্থ", "সচেতন", "হয়েছি"]
        );
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("সময়  সময়"), vec!["সময়", "সময়"]);
        assert_eq!(tokenize(" \t\nx \u{00a0}y "), vec!["x", "y"]);
    }

    /// Character-walk splitter used as an oracle for `tokenize`.
    fn tokenize_oracle(text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut current = String::new();
        for c in text.chars() {
            if c.is_whitespace() {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            } else {
                current.push(c);
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
        out
    }

    #[test]
    fn tokenize_matches_character_walk_oracle() {
        let inventory = synth_token_inventory();
        let mut rng = Lcg64::new(11);
        for _ in 0..100 {
            let mut text = String::new();
            for _ in 0..rng.below(30) {
                match rng.below(4) {
                    0 => text.push(' '),
                    1 => text.push('\t'),
                    2 => text.push_str(inventory[rng.below(inventory.len())]),
                    _ => text.push_str("mixed১২৩"),
                }
            }
            assert_eq!(tokenize(&text), tokenize_oracle(&text), "input {text:?}");
        }
    }

    #[test]
    fn remove_stopwords_keeps_order_and_non_stopwords() {
        let mut config = PreprocessConfig::without_stopwords();
        config.stopwords.insert("অনেক".to_string());
        let tokens = vec!["অনেক".to_string(), "সময়".to_string()];
        assert_eq!(remove_stopwords(tokens, &config), vec!["সময়"]);

        let config = PreprocessConfig::without_stopwords();
        let tokens = vec!["অনেক".to_string(), "সময়".to_string()];
        assert_eq!(remove_stopwords(tokens.clone(), &config), tokens);
    }

    #[test]
    fn remove_stopwords_can_empty_the_sequence() {
        let config = PreprocessConfig::default();
        let tokens = vec!["অতএব".to_string(), "অথচ".to_string(), "অথবা".to_string()];
        assert_eq!(remove_stopwords(tokens, &config), Vec::<String>::new());
    }

    #[test]
    fn casefold_affects_matching_not_output() {
        let mut config = PreprocessConfig::without_stopwords();
        config.stopwords.insert("the".to_string());
        config.casefold_ascii = true;
        let tokens = vec!["The".to_string(), "Cat".to_string()];
        assert_eq!(remove_stopwords(tokens, &config), vec!["Cat"]);
    }

    #[test]
    fn pipeline_composition_example() {
        let config = PreprocessConfig::without_stopwords();
        assert_eq!(
            preprocess_document("স্বাস্থ সচেতন হয়েছি,", &config),
            vec!["স্বাস্থ", "সচেতন", "হয়েছি"]
        );
        assert_eq!(
            preprocess_document("[(),\\$%^&*+=}{]:'\"/>.!?;<-_#।", &config),
            Vec::<String>::new()
        );
    }

    #[test]
    fn pipeline_equals_manual_stage_composition() {
        let config = PreprocessConfig::default();
        let inventory = synth_token_inventory();
        let mut rng = Lcg64::new(23);
        let puncts: Vec<char> = config.punctuation.iter().copied().collect();
        for _ in 0..100 {
            let mut text = String::new();
            for _ in 0..rng.below(20) {
                match rng.below(5) {
                    0 => text.push(puncts[rng.below(puncts.len())]),
                    1 => text.push(' '),
                    2 => text.push_str("অতএব"),
                    _ => text.push_str(inventory[rng.below(inventory.len())]),
                }
            }
            let staged = remove_stopwords(tokenize(&strip_punctuation(&text, &config)), &config);
            assert_eq!(preprocess_document(&text, &config), staged, "input {text:?}");
        }
    }

    #[test]
    fn default_config_contains_survey_stopword_examples() {
        let config = PreprocessConfig::default();
        for word in [
            "অতএব", "অথচ", "অথবা", "অনুযায়ী", "অনেক", "অনেকে", "অনেকেই", "অন্তত", "অন্য",
        ] {
            assert!(config.stopwords.contains(word), "missing {word}");
        }
        assert!(!config.punctuation.is_empty());
        assert!(config.punctuation.contains(&'।'));
        assert!(!config.casefold_ascii);
    }

    #[test]
    fn default_stopwords_disjoint_from_synth_inventory() {
        let config = PreprocessConfig::default();
        for token in synth_token_inventory() {
            assert!(
                !config.stopwords.contains(token),
                "synthetic token {token} would be removed as a stopword"
            );
        }
    }

    #[test]
    fn stopword_parsing_skips_comments_and_blanks() {
        let parsed = parse_stopwords("# header\n\nঅতএব\n  অথচ  \n# tail\n");
        assert_eq!(parsed.len(), 2);
        assert!(parsed.contains("অতএব"));
        assert!(parsed.contains("অথচ"));
    }

    proptest::proptest! {
        #[test]
        fn pipeline_is_idempotent(text in "\\PC{0,60}") {
            let config = PreprocessConfig::default();
            let once = preprocess_document(&text, &config);
            let again = preprocess_document(&once.join(" "), &config);
            proptest::prop_assert_eq!(once, again);
        }

        #[test]
        fn output_avoids_punctuation_and_stopwords(text in "\\PC{0,60}") {
            let config = PreprocessConfig::default();
            for token in preprocess_document(&text, &config) {
                proptest::prop_assert!(!token.is_empty());
                proptest::prop_assert!(!config.stopwords.contains(&token));
                proptest::prop_assert!(
                    !token.chars().any(|c| config.punctuation.contains(&c) || c.is_whitespace())
                );
            }
        }

        #[test]
        fn output_is_subsequence_of_split_input(text in "\\PC{0,60}") {
            let config = PreprocessConfig::default();
            let stripped = strip_punctuation(&text, &config);
            let split: Vec<String> = tokenize(&stripped);
            let output = preprocess_document(&text, &config);
            let mut cursor = 0usize;
            for token in &output {
                let pos = split[cursor..].iter().position(|t| t == token);
                proptest::prop_assert!(pos.is_some(), "token {} not found in order", token);
                cursor += pos.unwrap() + 1;
            }
        }
    }
}
