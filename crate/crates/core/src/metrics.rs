//! Document-level statistical channels computed from token records.
//!
//! Every built-in channel is a plain mean over token positions, except
//! Binoculars, which is the ratio of two means: observer log-perplexity over
//! observer/performer cross-log-perplexity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::records::{ChannelKind, ChannelSpec, DocumentRecord, Orientation, TokenRecord};

pub const LIKELIHOOD: &str = "likelihood";
pub const ENTROPY: &str = "entropy";
pub const RANK: &str = "rank";
pub const LOG_RANK: &str = "log_rank";
pub const BINOCULARS: &str = "binoculars";
/// Reserved plug-in slot; no formula ships with the crate.
pub const LLM_DEVIATION: &str = "llm_deviation";

/// Smallest Binoculars denominator accepted as non-degenerate.
pub const BINOCULARS_MIN_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvalidReason {
    EmptyTokens,
    DegenerateDenominator,
    MissingProbability,
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidReason::EmptyTokens => "empty tokens",
            InvalidReason::DegenerateDenominator => "degenerate denominator",
            InvalidReason::MissingProbability => "missing classifier probability",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelScore {
    pub channel: String,
    pub value: f64,
    pub valid: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<InvalidReason>,
}

impl ChannelScore {
    pub fn valid(channel: impl Into<String>, value: f64) -> Self {
        Self {
            channel: channel.into(),
            value,
            valid: true,
            reason: None,
        }
    }

    pub fn invalid(channel: impl Into<String>, reason: InvalidReason) -> Self {
        Self {
            channel: channel.into(),
            value: 0.0,
            valid: false,
            reason: Some(reason),
        }
    }

    /// The score value when valid.
    pub fn get(&self) -> Option<f64> {
        self.valid.then_some(self.value)
    }

    fn from_result(channel: &str, r: std::result::Result<f64, InvalidReason>) -> Self {
        match r {
            Ok(v) => Self::valid(channel, v),
            Err(reason) => Self::invalid(channel, reason),
        }
    }
}

/// A statistical channel computed from a document's token records.
pub trait StatisticalMetric: Send + Sync {
    fn orientation(&self) -> Orientation;
    fn score(&self, tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason>;
}

fn mean_of(
    tokens: &[TokenRecord],
    f: impl Fn(&TokenRecord) -> f64,
) -> std::result::Result<f64, InvalidReason> {
    if tokens.is_empty() {
        return Err(InvalidReason::EmptyTokens);
    }
    Ok(tokens.iter().map(f).sum::<f64>() / tokens.len() as f64)
}

fn likelihood_value(tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
    mean_of(tokens, |t| t.logprob_observer)
}

fn entropy_value(tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
    mean_of(tokens, |t| t.entropy_observer)
}

fn rank_value(tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
    mean_of(tokens, |t| f64::from(t.rank_observer))
}

fn log_rank_value(tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
    mean_of(tokens, |t| f64::from(t.rank_observer).ln())
}

fn binoculars_value(tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
    let log_ppl = -mean_of(tokens, |t| t.logprob_observer)?;
    let x_ppl = mean_of(tokens, |t| t.xent_observer_performer)?;
    if x_ppl < BINOCULARS_MIN_DENOMINATOR {
        return Err(InvalidReason::DegenerateDenominator);
    }
    Ok(log_ppl / x_ppl)
}

/// Mean observed-token log-probability. Higher is machine.
pub fn likelihood(doc: &DocumentRecord) -> ChannelScore {
    ChannelScore::from_result(LIKELIHOOD, likelihood_value(&doc.tokens))
}

/// Mean predictive entropy. Lower is machine.
pub fn entropy_score(doc: &DocumentRecord) -> ChannelScore {
    ChannelScore::from_result(ENTROPY, entropy_value(&doc.tokens))
}

/// Mean observed-token rank. Lower is machine.
pub fn rank_score(doc: &DocumentRecord) -> ChannelScore {
    ChannelScore::from_result(RANK, rank_value(&doc.tokens))
}

/// Mean natural log of the observed-token rank. Lower is machine.
pub fn log_rank_score(doc: &DocumentRecord) -> ChannelScore {
    ChannelScore::from_result(LOG_RANK, log_rank_value(&doc.tokens))
}

/// Observer log-perplexity divided by observer/performer cross-log-perplexity.
/// Lower is machine.
pub fn binoculars_score(doc: &DocumentRecord) -> ChannelScore {
    ChannelScore::from_result(BINOCULARS, binoculars_value(&doc.tokens))
}

struct Builtin {
    orientation: Orientation,
    f: ScoreFn,
}

impl StatisticalMetric for Builtin {
    fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn score(&self, tokens: &[TokenRecord]) -> std::result::Result<f64, InvalidReason> {
        (self.f)(tokens)
    }
}

enum Slot {
    Builtin(Arc<dyn StatisticalMetric>),
    Plugin(Arc<dyn StatisticalMetric>),
    Reserved,
}

/// Name → implementation table for statistical channels.
///
/// Starts with the five built-ins and the reserved `llm_deviation` slot.
pub struct MetricRegistry {
    slots: HashMap<String, Slot>,
}

impl Default for MetricRegistry {
    fn default() -> Self {
        Self::new()
    }
}

type ScoreFn = fn(&[TokenRecord]) -> std::result::Result<f64, InvalidReason>;

static DEFAULT_REGISTRY: LazyLock<MetricRegistry> = LazyLock::new(MetricRegistry::new);

impl MetricRegistry {
    pub fn new() -> Self {
        use Orientation::*;
        let builtins: [(&str, Orientation, ScoreFn); 5] = [
            (LIKELIHOOD, HigherIsMachine, likelihood_value),
            (ENTROPY, LowerIsMachine, entropy_value),
            (RANK, LowerIsMachine, rank_value),
            (LOG_RANK, LowerIsMachine, log_rank_value),
            (BINOCULARS, LowerIsMachine, binoculars_value),
        ];
        let mut slots: HashMap<String, Slot> = builtins
            .into_iter()
            .map(|(name, orientation, f)| {
                let m: Arc<dyn StatisticalMetric> = Arc::new(Builtin { orientation, f });
                (name.to_string(), Slot::Builtin(m))
            })
            .collect();
        slots.insert(LLM_DEVIATION.to_string(), Slot::Reserved);
        Self { slots }
    }

    /// Shared registry holding only the built-in channels.
    pub fn builtin() -> &'static MetricRegistry {
        &DEFAULT_REGISTRY
    }

    /// Registers a plug-in channel. Built-in names cannot be replaced.
    pub fn register(
        &mut self,
        name: impl Into<String>,
        metric: impl StatisticalMetric + 'static,
    ) -> Result<()> {
        let name = name.into();
        if let Some(Slot::Builtin(_)) = self.slots.get(&name) {
            return Err(Error::Config(format!(
                "cannot replace built-in channel {name:?}"
            )));
        }
        self.slots.insert(name, Slot::Plugin(Arc::new(metric)));
        Ok(())
    }

    fn metric(&self, name: &str) -> Result<&Arc<dyn StatisticalMetric>> {
        match self.slots.get(name) {
            Some(Slot::Builtin(m)) | Some(Slot::Plugin(m)) => Ok(m),
            Some(Slot::Reserved) => Err(Error::PluginNotRegistered(name.to_string())),
            None => Err(Error::UnknownChannel(name.to_string())),
        }
    }

    pub fn is_known(&self, name: &str) -> bool {
        self.slots.contains_key(name)
    }

    /// Channel spec for a registered statistical channel.
    pub fn spec(&self, name: &str) -> Result<ChannelSpec> {
        let m = self.metric(name)?;
        Ok(ChannelSpec::statistical(name, m.orientation()))
    }

    pub fn score(&self, doc: &DocumentRecord, channel: &ChannelSpec) -> Result<ChannelScore> {
        match channel.kind {
            ChannelKind::Statistical => {
                let m = self.metric(&channel.name)?;
                Ok(ChannelScore::from_result(
                    &channel.name,
                    m.score(&doc.tokens),
                ))
            }
            ChannelKind::Classifier => Ok(match doc.classifier_probs.get(&channel.name) {
                Some(&p) => ChannelScore::valid(&channel.name, p),
                None => ChannelScore::invalid(&channel.name, InvalidReason::MissingProbability),
            }),
        }
    }

    pub fn score_all(
        &self,
        doc: &DocumentRecord,
        channels: &[ChannelSpec],
    ) -> Result<BTreeMap<String, ChannelScore>> {
        channels
            .iter()
            .map(|c| Ok((c.name.clone(), self.score(doc, c)?)))
            .collect()
    }
}

/// Scores `doc` on every channel using the built-in registry.
pub fn score_all(
    doc: &DocumentRecord,
    channels: &[ChannelSpec],
) -> Result<BTreeMap<String, ChannelScore>> {
    MetricRegistry::builtin().score_all(doc, channels)
}
