//! Routing of documents to calibration buckets by identified language.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Languages with their own thresholds unless configured otherwise.
pub const DEFAULT_KNOWN_LANGUAGES: [&str; 8] = ["ar", "bg", "zh", "en", "de", "id", "ru", "ur"];

/// Language identification must be strictly more confident than this.
pub const MIN_LANGUAGE_CONFIDENCE: f64 = 0.5;

pub const UNKNOWN: &str = "UNKNOWN";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Bucket {
    Language(String),
    Unknown,
}

impl Bucket {
    pub fn as_str(&self) -> &str {
        match self {
            Bucket::Language(code) => code,
            Bucket::Unknown => UNKNOWN,
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Bucket::Unknown)
    }
}

impl From<String> for Bucket {
    fn from(s: String) -> Self {
        if s == UNKNOWN {
            Bucket::Unknown
        } else {
            Bucket::Language(s)
        }
    }
}

impl From<Bucket> for String {
    fn from(b: Bucket) -> String {
        match b {
            Bucket::Language(code) => code,
            Bucket::Unknown => UNKNOWN.to_string(),
        }
    }
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn default_known_languages() -> BTreeSet<String> {
    DEFAULT_KNOWN_LANGUAGES
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Picks the calibration bucket for a document.
///
/// A known language is used only when identification confidence is strictly
/// above 0.5. A language without a confidence is trusted as given.
pub fn resolve_bucket(
    lang: Option<&str>,
    conf: Option<f64>,
    known: &BTreeSet<String>,
) -> Result<Bucket> {
    if let Some(c) = conf {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::ConfidenceOutOfRange(c));
        }
    }
    let Some(lang) = lang else {
        return Ok(Bucket::Unknown);
    };
    let confident = conf.is_none_or(|c| c > MIN_LANGUAGE_CONFIDENCE);
    if confident && known.contains(lang) {
        Ok(Bucket::Language(lang.to_string()))
    } else {
        Ok(Bucket::Unknown)
    }
}
