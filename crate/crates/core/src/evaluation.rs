//! Accuracy, per-channel AUC, confusion counts and per-language breakdown.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::calibration::{auc, build_roc};
use crate::ensemble::Decided;
use crate::error::{Error, Result};
use crate::langgate::UNKNOWN;
use crate::metrics::MetricRegistry;
use crate::records::{ChannelSpec, DocumentRecord, Label, Orientation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    fn add(&mut self, predicted: Label, gold: Label) {
        match (predicted, gold) {
            (Label::Machine, Label::Machine) => self.tp += 1,
            (Label::Machine, Label::Human) => self.fp += 1,
            (Label::Human, Label::Human) => self.tn += 1,
            (Label::Human, Label::Machine) => self.fn_ += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanguageStats {
    pub accuracy: f64,
    pub n_human: usize,
    pub n_machine: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    /// AUC ROC per raw-score channel. The voted output has no score and
    /// therefore never appears here.
    #[serde(rename = "auc")]
    pub per_channel_auc: BTreeMap<String, f64>,
    pub confusion: Confusion,
    pub per_language: BTreeMap<String, LanguageStats>,
    /// Accuracy of each channel's own decision (absent decisions count as human).
    #[serde(skip)]
    pub channel_accuracy: BTreeMap<String, f64>,
}

/// Valid raw scores of one channel, keyed by document id.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelScores {
    pub orientation: Orientation,
    pub by_id: HashMap<String, f64>,
}

pub fn collect_scores(
    docs: &[DocumentRecord],
    channels: &[ChannelSpec],
    registry: &MetricRegistry,
) -> Result<BTreeMap<String, ChannelScores>> {
    let mut out = BTreeMap::new();
    for c in channels {
        let mut by_id = HashMap::with_capacity(docs.len());
        for d in docs {
            if let Some(v) = registry.score(d, c)?.get() {
                by_id.insert(d.id.clone(), v);
            }
        }
        out.insert(
            c.name.clone(),
            ChannelScores {
                orientation: c.orientation,
                by_id,
            },
        );
    }
    Ok(out)
}

/// Scores predictions against gold labels.
///
/// Predictions and gold documents must cover the same ids. Per-language rows
/// key on the identified language carried by the gold record, not on the
/// calibration bucket.
pub fn evaluate<P: Decided>(
    predictions: &[P],
    gold: &[DocumentRecord],
    scores: Option<&BTreeMap<String, ChannelScores>>,
) -> Result<EvalReport> {
    if predictions.is_empty() {
        return Err(Error::InvalidInput(
            "no predictions to evaluate".to_string(),
        ));
    }
    let gold_by_id: HashMap<&str, &DocumentRecord> =
        gold.iter().map(|d| (d.id.as_str(), d)).collect();
    if predictions.len() != gold.len() {
        return Err(Error::IdMismatch(format!(
            "{} predictions for {} gold documents",
            predictions.len(),
            gold.len()
        )));
    }

    let mut seen = HashSet::with_capacity(predictions.len());
    let mut confusion = Confusion::default();
    let mut per_lang: BTreeMap<String, (Confusion, usize, usize)> = BTreeMap::new();
    let mut channel_hits: BTreeMap<String, usize> = BTreeMap::new();
    for p in predictions {
        let id = p.id();
        if !seen.insert(id) {
            return Err(Error::IdMismatch(format!(
                "duplicate prediction for {id:?}"
            )));
        }
        let doc = gold_by_id
            .get(id)
            .ok_or_else(|| Error::IdMismatch(format!("no gold document for {id:?}")))?;
        let label = doc
            .label
            .ok_or_else(|| Error::IdMismatch(format!("gold document {id:?} has no label")))?;
        confusion.add(p.final_label(), label);

        let lang = doc.language.clone().unwrap_or_else(|| UNKNOWN.to_string());
        let row = per_lang.entry(lang).or_default();
        row.0.add(p.final_label(), label);
        match label {
            Label::Human => row.1 += 1,
            Label::Machine => row.2 += 1,
        }

        for (channel, d) in p.decisions() {
            let hit = d.unwrap_or(Label::Human) == label;
            *channel_hits.entry(channel.clone()).or_default() += usize::from(hit);
        }
    }

    let n = predictions.len() as f64;
    let channel_accuracy = channel_hits
        .into_iter()
        .map(|(c, hits)| (c, hits as f64 / n))
        .collect();

    let mut per_channel_auc = BTreeMap::new();
    if let Some(scores) = scores {
        for (channel, column) in scores {
            let mut values = Vec::new();
            let mut labels = Vec::new();
            for d in gold {
                if let (Some(&v), Some(l)) = (column.by_id.get(&d.id), d.label) {
                    values.push(v);
                    labels.push(l);
                }
            }
            match build_roc(&values, &labels, column.orientation) {
                Ok(curve) => {
                    per_channel_auc.insert(channel.clone(), auc(&curve));
                }
                Err(e) => log::warn!("no AUC for channel {channel:?}: {e}"),
            }
        }
    }

    Ok(EvalReport {
        accuracy: confusion.accuracy(),
        per_channel_auc,
        confusion,
        per_language: per_lang
            .into_iter()
            .map(|(lang, (c, n_human, n_machine))| {
                (
                    lang,
                    LanguageStats {
                        accuracy: c.accuracy(),
                        n_human,
                        n_machine,
                    },
                )
            })
            .collect(),
        channel_accuracy,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "N/A".to_string(), |x| format!("{x:.4}"))
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Aligned plain-text report: one row per channel plus the voted system,
    /// whose AUC is N/A, then confusion counts and the per-language table.
    pub fn render_text(&self, system: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24} {:>10} {:>10}", "System", "Accuracy", "AUC ROC");
        let mut channels: Vec<&String> = self
            .per_channel_auc
            .keys()
            .chain(self.channel_accuracy.keys())
            .collect();
        channels.sort();
        channels.dedup();
        for c in channels {
            let _ = writeln!(
                out,
                "{:<24} {:>10} {:>10}",
                c,
                cell(self.channel_accuracy.get(c).copied()),
                cell(self.per_channel_auc.get(c).copied())
            );
        }
        let _ = writeln!(
            out,
            "{:<24} {:>10} {:>10}",
            system,
            cell(Some(self.accuracy)),
            "N/A"
        );
        let c = &self.confusion;
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "confusion: tp={} fp={} tn={} fn={}",
            c.tp, c.fp, c.tn, c.fn_
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<10} {:>10} {:>8} {:>10}",
            "Language", "Accuracy", "Human", "Machine"
        );
        for (lang, s) in &self.per_language {
            let _ = writeln!(
                out,
                "{:<10} {:>10.4} {:>8} {:>10}",
                lang, s.accuracy, s.n_human, s.n_machine
            );
        }
        out
    }
}
