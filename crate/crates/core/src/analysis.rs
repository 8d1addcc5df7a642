//! Text normalization chain shared by indexing and querying:
//! tokenize, case-fold, drop stopwords, stem.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::LazyLock;

use rust_stemmers::{Algorithm, Stemmer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

static STEMMER: LazyLock<Stemmer> = LazyLock::new(|| Stemmer::create(Algorithm::English));

/// Default English stopword list shipped with the crate, one term per line.
const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// Analyzer settings. The same config must be applied at index time and at
/// query time within one engine instance; [`AnalyzerConfig::fingerprint`] is
/// persisted with each index so mismatches are detectable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzerConfig {
    language: String,
    stopwords: BTreeSet<String>,
    stemming_enabled: bool,
    stop_enabled: bool,
}

impl AnalyzerConfig {
    /// English analyzer with the default stopword list, stemming and
    /// stopword removal enabled.
    pub fn english() -> Self {
        Self {
            language: "en".into(),
            stopwords: default_stopwords(),
            stemming_enabled: true,
            stop_enabled: true,
        }
    }

    /// Only `"en"` is supported. Stopwords are lowercased on entry.
    pub fn new(
        language: &str,
        stopwords: BTreeSet<String>,
        stemming_enabled: bool,
        stop_enabled: bool,
    ) -> Result<Self> {
        if language != "en" {
            return Err(Error::Config(format!(
                "unsupported analyzer language `{language}` (only `en`)"
            )));
        }
        Ok(Self {
            language: language.into(),
            stopwords: stopwords.into_iter().map(|w| w.to_lowercase()).collect(),
            stemming_enabled,
            stop_enabled,
        })
    }

    pub fn with_stemming(mut self, enabled: bool) -> Self {
        self.stemming_enabled = enabled;
        self
    }

    pub fn with_stopword_removal(mut self, enabled: bool) -> Self {
        self.stop_enabled = enabled;
        self
    }

    pub fn with_stopwords(mut self, stopwords: BTreeSet<String>) -> Self {
        self.stopwords = stopwords.into_iter().map(|w| w.to_lowercase()).collect();
        self
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn stemming_enabled(&self) -> bool {
        self.stemming_enabled
    }

    pub fn stop_enabled(&self) -> bool {
        self.stop_enabled
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    pub fn is_stopword(&self, term: &str) -> bool {
        self.stop_enabled && self.stopwords.contains(term)
    }

    /// Stable hash of the full configuration, stored in index metadata.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.language.as_bytes());
        hasher.update([self.stemming_enabled as u8, self.stop_enabled as u8]);
        if self.stop_enabled {
            for word in &self.stopwords {
                hasher.update(word.as_bytes());
                hasher.update([0u8]);
            }
        }
        let digest = hasher.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        Self::english()
    }
}

/// Splits on any non-alphanumeric boundary, lowercases, drops empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// English (Porter-family) stem of a lowercase term.
pub fn stem(term: &str) -> String {
    STEMMER.stem(term).into_owned()
}

/// Full chain: tokenize, drop stopwords (if enabled), stem (if enabled).
/// Relative order of surviving terms is preserved.
pub fn analyze(text: &str, cfg: &AnalyzerConfig) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !cfg.is_stopword(t))
        .map(|t| if cfg.stemming_enabled { stem(&t) } else { t })
        .collect()
}

/// The stopword list bundled with the crate.
pub fn default_stopwords() -> BTreeSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Loads a stopword file: UTF-8, one term per line, `#` starts a comment.
pub fn load_stopwords(path: &Path) -> Result<BTreeSet<String>> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_stopwords(&text))
}

fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}
