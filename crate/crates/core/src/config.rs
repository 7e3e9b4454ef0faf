//! Pipeline configuration: which channels feed which vote.
//!
//! ```json
//! {"mode": "two_step", "stat_channels": ["entropy", "rank", "binoculars"],
//!  "clf_channels": ["falcon", "mistral"], "known_languages": ["ar", "bg", ...]}
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calibration::{CalibrationOptions, DEFAULT_MIN_SAMPLES};
use crate::error::{Error, Result};
use crate::langgate::{default_known_languages, UNKNOWN};
use crate::metrics::{MetricRegistry, BINOCULARS, ENTROPY, LIKELIHOOD, LOG_RANK, RANK};
use crate::records::ChannelSpec;

/// Classifier probabilities at or above `1 - epsilon_one` count as certain.
pub const DEFAULT_EPSILON_ONE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Majority over the statistical channels, then majority of that vote
    /// with the classifier channels.
    #[serde(rename = "two_step")]
    TwoStep,
    /// Classifiers vote machine only when certain; statistical channels use
    /// calibrated thresholds; one flat majority.
    #[serde(rename = "fixed_one")]
    FixedOne,
    /// Flat majority over the statistical channels.
    #[serde(rename = "stat_only")]
    StatOnly,
    /// Flat majority over five statistical channels.
    #[serde(rename = "stat5")]
    Stat5,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::TwoStep => "two_step",
            Mode::FixedOne => "fixed_one",
            Mode::StatOnly => "stat_only",
            Mode::Stat5 => "stat5",
        }
    }
}

fn default_min_samples() -> usize {
    DEFAULT_MIN_SAMPLES
}

fn default_epsilon_one() -> f64 {
    DEFAULT_EPSILON_ONE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub stat_channels: Vec<String>,
    #[serde(default)]
    pub clf_channels: Vec<String>,
    #[serde(default = "default_known_languages")]
    pub known_languages: BTreeSet<String>,
    #[serde(default = "default_min_samples")]
    pub min_samples: usize,
    #[serde(default = "default_epsilon_one")]
    pub epsilon_one: f64,
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl PipelineConfig {
    pub fn new(mode: Mode, stat_channels: &[&str], clf_channels: &[&str]) -> Self {
        Self {
            mode,
            stat_channels: names(stat_channels),
            clf_channels: names(clf_channels),
            known_languages: default_known_languages(),
            min_samples: DEFAULT_MIN_SAMPLES,
            epsilon_one: DEFAULT_EPSILON_ONE,
        }
    }

    /// Entropy, rank and Binoculars plus two classifiers, two-step vote.
    pub fn llm2s3(clf_a: &str, clf_b: &str) -> Self {
        Self::new(Mode::TwoStep, &[ENTROPY, RANK, BINOCULARS], &[clf_a, clf_b])
    }

    /// The statistical trio alone.
    pub fn s3() -> Self {
        Self::new(Mode::StatOnly, &[ENTROPY, RANK, BINOCULARS], &[])
    }

    /// Five statistical channels, flat vote.
    pub fn s5() -> Self {
        Self::new(
            Mode::Stat5,
            &[LIKELIHOOD, ENTROPY, RANK, LOG_RANK, BINOCULARS],
            &[],
        )
    }

    /// Classifiers at a fixed threshold of 1, combined with calibrated Binoculars.
    pub fn llm2b1(clf_a: &str, clf_b: &str) -> Self {
        Self::new(Mode::FixedOne, &[BINOCULARS], &[clf_a, clf_b])
    }

    pub fn with_known_languages<I, S>(mut self, langs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.known_languages = langs.into_iter().map(Into::into).collect();
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| Error::Open {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&s)
    }

    pub fn validate(&self, registry: &MetricRegistry) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        let mut seen = BTreeSet::new();
        for name in self.stat_channels.iter().chain(&self.clf_channels) {
            if !seen.insert(name) {
                return cfg(format!("channel {name:?} listed twice"));
            }
        }
        for name in &self.stat_channels {
            if !registry.is_known(name) {
                return Err(Error::UnknownChannel(name.clone()));
            }
            registry.spec(name)?;
        }
        for lang in &self.known_languages {
            if lang.is_empty() || lang == UNKNOWN {
                return cfg(format!("invalid known language {lang:?}"));
            }
        }
        if !(0.0..1.0).contains(&self.epsilon_one) {
            return cfg(format!(
                "epsilon_one must be in [0, 1), got {}",
                self.epsilon_one
            ));
        }
        let (n_stat, n_clf) = (self.stat_channels.len(), self.clf_channels.len());
        let mode = self.mode.as_str();
        match self.mode {
            Mode::TwoStep => {
                if n_stat % 2 == 0 {
                    return cfg(format!(
                        "{mode} needs an odd number of statistical channels"
                    ));
                }
                if n_clf % 2 == 1 {
                    return cfg(format!(
                        "{mode} needs an even number of classifier channels"
                    ));
                }
            }
            Mode::FixedOne => {
                if (n_stat + n_clf) % 2 == 0 {
                    return cfg(format!("{mode} needs an odd total number of channels"));
                }
            }
            Mode::StatOnly | Mode::Stat5 => {
                if n_clf != 0 {
                    return cfg(format!("{mode} takes no classifier channels"));
                }
                if n_stat % 2 == 0 {
                    return cfg(format!(
                        "{mode} needs an odd number of statistical channels"
                    ));
                }
                if self.mode == Mode::Stat5 && n_stat != 5 {
                    return cfg(format!("{mode} needs exactly five statistical channels"));
                }
            }
        }
        Ok(())
    }

    pub fn stat_specs(&self, registry: &MetricRegistry) -> Result<Vec<ChannelSpec>> {
        self.stat_channels
            .iter()
            .map(|n| registry.spec(n))
            .collect()
    }

    pub fn clf_specs(&self) -> Vec<ChannelSpec> {
        self.clf_channels
            .iter()
            .map(ChannelSpec::classifier)
            .collect()
    }

    /// Channels whose thresholds come from calibration. In fixed-one mode the
    /// classifier thresholds are fixed, so only statistical channels qualify.
    pub fn calibrated_specs(&self, registry: &MetricRegistry) -> Result<Vec<ChannelSpec>> {
        let mut specs = self.stat_specs(registry)?;
        if self.mode != Mode::FixedOne {
            specs.extend(self.clf_specs());
        }
        Ok(specs)
    }

    /// Every channel, statistical first.
    pub fn all_specs(&self, registry: &MetricRegistry) -> Result<Vec<ChannelSpec>> {
        let mut specs = self.stat_specs(registry)?;
        specs.extend(self.clf_specs());
        Ok(specs)
    }

    pub fn calibration_options(&self) -> CalibrationOptions {
        CalibrationOptions {
            min_samples: self.min_samples,
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
