//! Threshold application and majority voting.
//!
//! The default pipeline votes in two steps: the statistical channels first
//! agree on one decision by majority, and that decision then votes with the
//! classifier channels. A channel whose score cannot be computed votes human.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::calibration::{ThresholdEntry, ThresholdTable};
use crate::config::{Mode, PipelineConfig};
use crate::error::{Error, Result};
use crate::langgate::{resolve_bucket, Bucket};
use crate::metrics::{ChannelScore, MetricRegistry};
use crate::records::{ChannelSpec, DocumentRecord, Label};

/// Decides a valid score against a calibrated threshold; `None` for an invalid score.
///
/// A score exactly at the threshold is machine.
pub fn apply_threshold(score: &ChannelScore, entry: &ThresholdEntry) -> Option<Label> {
    debug_assert_eq!(score.channel, entry.channel);
    let value = score.get()?;
    let o = entry.orientation;
    Some(Label::from_bool(
        o.normalize(value) >= o.normalize(entry.threshold),
    ))
}

/// Fixed-one rule: machine only when the probability is 1 up to `epsilon`.
pub fn fixed_one_decision(prob: Option<f64>, epsilon: f64) -> Option<Label> {
    prob.map(|p| Label::from_bool(p >= 1.0 - epsilon))
}

/// Strict majority of the votes; ties go to human.
pub fn majority(votes: &[Label]) -> Label {
    let machine = votes.iter().filter(|v| v.is_machine()).count();
    Label::from_bool(2 * machine > votes.len())
}

pub fn stat_majority(d1: Label, d2: Label, d3: Label) -> Label {
    majority(&[d1, d2, d3])
}

pub fn final_vote(stat: Label, clf1: Label, clf2: Label) -> Label {
    majority(&[stat, clf1, clf2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc_id: String,
    pub bucket: Bucket,
    /// Per-channel decision; `None` when the channel had no valid score.
    pub channel_decisions: BTreeMap<String, Option<Label>>,
    /// Statistical majority; present only in two-step mode.
    pub stat_vote: Option<Label>,
    pub final_label: Label,
    pub mode: Mode,
}

/// One line of prediction output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionLine {
    pub id: String,
    pub bucket: Bucket,
    pub decisions: BTreeMap<String, Option<Label>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stat_vote: Option<Label>,
    #[serde(rename = "final")]
    pub final_label: Label,
}

impl From<&Prediction> for PredictionLine {
    fn from(p: &Prediction) -> Self {
        PredictionLine {
            id: p.doc_id.clone(),
            bucket: p.bucket.clone(),
            decisions: p.channel_decisions.clone(),
            stat_vote: p.stat_vote,
            final_label: p.final_label,
        }
    }
}

/// Anything carrying a final decision for a document id.
pub trait Decided {
    fn id(&self) -> &str;
    fn final_label(&self) -> Label;
    fn decisions(&self) -> &BTreeMap<String, Option<Label>>;
}

impl Decided for Prediction {
    fn id(&self) -> &str {
        &self.doc_id
    }
    fn final_label(&self) -> Label {
        self.final_label
    }
    fn decisions(&self) -> &BTreeMap<String, Option<Label>> {
        &self.channel_decisions
    }
}

impl Decided for PredictionLine {
    fn id(&self) -> &str {
        &self.id
    }
    fn final_label(&self) -> Label {
        self.final_label
    }
    fn decisions(&self) -> &BTreeMap<String, Option<Label>> {
        &self.decisions
    }
}

/// Predicts one document. Routing uses the table's known-language set.
pub fn predict(
    doc: &DocumentRecord,
    table: &ThresholdTable,
    config: &PipelineConfig,
    registry: &MetricRegistry,
) -> Result<Prediction> {
    let stat = config.stat_specs(registry)?;
    let clf = config.clf_specs();
    predict_with(doc, table, config, registry, &stat, &clf)
}

fn predict_with(
    doc: &DocumentRecord,
    table: &ThresholdTable,
    config: &PipelineConfig,
    registry: &MetricRegistry,
    stat: &[ChannelSpec],
    clf: &[ChannelSpec],
) -> Result<Prediction> {
    let bucket = resolve_bucket(
        doc.language.as_deref(),
        doc.language_confidence,
        &table.known_languages,
    )?;

    let calibrated = |spec: &ChannelSpec| -> Result<Option<Label>> {
        let entry = table.entry_for(&spec.name, &bucket)?;
        let score = registry.score(doc, spec)?;
        Ok(apply_threshold(&score, entry))
    };

    let mut decisions = BTreeMap::new();
    let mut stat_votes = Vec::with_capacity(stat.len());
    for spec in stat {
        let d = calibrated(spec)?;
        decisions.insert(spec.name.clone(), d);
        stat_votes.push(d.unwrap_or(Label::Human));
    }
    let mut clf_votes = Vec::with_capacity(clf.len());
    for spec in clf {
        let d = match config.mode {
            Mode::FixedOne => fixed_one_decision(
                doc.classifier_probs.get(&spec.name).copied(),
                config.epsilon_one,
            ),
            _ => calibrated(spec)?,
        };
        decisions.insert(spec.name.clone(), d);
        clf_votes.push(d.unwrap_or(Label::Human));
    }

    let (stat_vote, final_label) = match config.mode {
        Mode::TwoStep => {
            let s = majority(&stat_votes);
            let mut votes = vec![s];
            votes.extend(clf_votes);
            (Some(s), majority(&votes))
        }
        Mode::FixedOne => {
            let mut votes = stat_votes;
            votes.extend(clf_votes);
            (None, majority(&votes))
        }
        Mode::StatOnly | Mode::Stat5 => (None, majority(&stat_votes)),
    };

    Ok(Prediction {
        doc_id: doc.id.clone(),
        bucket,
        channel_decisions: decisions,
        stat_vote,
        final_label,
        mode: config.mode,
    })
}

/// A validated configuration paired with its threshold table.
pub struct Detector<'r> {
    config: PipelineConfig,
    table: ThresholdTable,
    registry: &'r MetricRegistry,
    stat: Vec<ChannelSpec>,
    clf: Vec<ChannelSpec>,
}

impl<'r> Detector<'r> {
    /// Fails when the table lacks an UNKNOWN entry for a calibrated channel,
    /// disagrees on orientation, or was built for other known languages.
    pub fn new(
        config: PipelineConfig,
        table: ThresholdTable,
        registry: &'r MetricRegistry,
    ) -> Result<Self> {
        config.validate(registry)?;
        table.check_channels(&config.calibrated_specs(registry)?)?;
        if config.known_languages != table.known_languages {
            let show = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
            return Err(Error::TableMismatch(format!(
                "known languages differ: config [{}], table [{}]",
                show(&config.known_languages),
                show(&table.known_languages)
            )));
        }
        let stat = config.stat_specs(registry)?;
        let clf = config.clf_specs();
        Ok(Self {
            config,
            table,
            registry,
            stat,
            clf,
        })
    }

    pub fn predict(&self, doc: &DocumentRecord) -> Result<Prediction> {
        predict_with(
            doc,
            &self.table,
            &self.config,
            self.registry,
            &self.stat,
            &self.clf,
        )
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn table(&self) -> &ThresholdTable {
        &self.table
    }
}
