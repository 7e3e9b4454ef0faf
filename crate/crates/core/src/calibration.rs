//! ROC construction, AUC, and per-language Youden threshold calibration.
//!
//! Scores are first mapped into "machine-positive" space with the channel's
//! [`Orientation`], so every curve and every threshold rule reads the same
//! way: a document is machine-generated iff its normalized score is at least
//! the normalized threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::langgate::{resolve_bucket, Bucket};
use crate::metrics::MetricRegistry;
use crate::records::{ChannelSpec, DocumentRecord, Label, Orientation};

/// Minimum documents per class before a language gets its own threshold.
pub const DEFAULT_MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Raw-score threshold: documents at or beyond it (in the machine
    /// direction) are predicted machine. Infinite for the origin point.
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub positives: usize,
    pub negatives: usize,
    pub orientation: Orientation,
}

/// Builds the ROC curve with one point per distinct score.
///
/// Positives are `Label::Machine`. Tied scores enter the curve together.
pub fn build_roc(scores: &[f64], labels: &[Label], orientation: Orientation) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite score {bad}")));
    }
    let positives = labels.iter().filter(|l| l.is_machine()).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateClasses(format!(
            "{positives} machine and {negatives} human samples"
        )));
    }

    let mut pairs: Vec<(f64, Label)> = scores
        .iter()
        .map(|&s| orientation.normalize(s))
        .zip(labels.iter().copied())
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let (p, n) = (positives as f64, negatives as f64);
    let mut points = Vec::with_capacity(pairs.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: orientation.denormalize(f64::INFINITY),
        tp: 0,
        fp: 0,
    });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < pairs.len() {
        let value = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == value {
            match pairs[i].1 {
                Label::Machine => tp += 1,
                Label::Human => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n,
            tpr: tp as f64 / p,
            threshold: orientation.denormalize(value),
            tp,
            fp,
        });
    }
    Ok(RocCurve {
        points,
        positives,
        negatives,
        orientation,
    })
}

/// Trapezoidal area under the curve.
pub fn auc(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
        .sum()
}

/// Youden's J (TPR - FPR) at a curve point.
pub fn j_stat(point: &RocPoint) -> f64 {
    point.tpr - point.fpr
}

fn margin(u: f64) -> f64 {
    u.abs().max(1.0)
}

/// Threshold maximizing TPR - FPR over the curve.
///
/// Ties prefer the higher TPR, then the more conservative cut. When no cut
/// beats J = 0 the channel is uninformative and the returned threshold lies
/// above every score, so everything is predicted human. Cuts between two
/// scores are placed at their midpoint.
pub fn youden_threshold(curve: &RocCurve) -> (f64, f64) {
    let pts = &curve.points;
    let mut best = 0;
    let mut best_j = j_stat(&pts[0]);
    for (i, pt) in pts.iter().enumerate().skip(1) {
        let j = j_stat(pt);
        if j > best_j || (j == best_j && j > 0.0 && pt.tpr > pts[best].tpr) {
            best = i;
            best_j = j;
        }
    }

    let o = curve.orientation;
    let normalized = if best == 0 {
        let top = o.normalize(pts[1].threshold);
        top + margin(top)
    } else if best == pts.len() - 1 {
        let bottom = o.normalize(pts[best].threshold);
        bottom - margin(bottom)
    } else {
        let hi = o.normalize(pts[best].threshold);
        let lo = o.normalize(pts[best + 1].threshold);
        let mid = hi / 2.0 + lo / 2.0;
        if mid > lo && mid <= hi {
            mid
        } else {
            hi
        }
    };
    (o.denormalize(normalized), best_j)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub channel: String,
    pub bucket: Bucket,
    pub threshold: f64,
    pub orientation: Orientation,
    #[serde(rename = "j")]
    pub j_stat: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TableMeta {
    pub tool: String,
    pub n_docs: usize,
    /// SHA-256 over the calibration document ids, newline-joined.
    pub dataset_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub min_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TableWire", try_from = "TableWire")]
pub struct ThresholdTable {
    pub entries: BTreeMap<(String, Bucket), ThresholdEntry>,
    pub known_languages: BTreeSet<String>,
    pub meta: TableMeta,
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    known_languages: Vec<String>,
    entries: Vec<ThresholdEntry>,
    meta: TableMeta,
}

impl From<ThresholdTable> for TableWire {
    fn from(t: ThresholdTable) -> Self {
        TableWire {
            known_languages: t.known_languages.into_iter().collect(),
            entries: t.entries.into_values().collect(),
            meta: t.meta,
        }
    }
}

impl TryFrom<TableWire> for ThresholdTable {
    type Error = String;

    fn try_from(w: TableWire) -> std::result::Result<Self, String> {
        let mut entries = BTreeMap::new();
        for e in w.entries {
            if !(-1.0..=1.0).contains(&e.j_stat) {
                return Err(format!("j out of range for {}/{}", e.channel, e.bucket));
            }
            if e.n_pos + e.n_neg == 0 {
                return Err(format!("empty entry {}/{}", e.channel, e.bucket));
            }
            if let Bucket::Language(code) = &e.bucket {
                if !w.known_languages.contains(code) {
                    return Err(format!("entry bucket {code:?} is not a known language"));
                }
            }
            let key = (e.channel.clone(), e.bucket.clone());
            if entries.insert(key, e).is_some() {
                return Err("duplicate (channel, bucket) entry".to_string());
            }
        }
        Ok(ThresholdTable {
            entries,
            known_languages: w.known_languages.into_iter().collect(),
            meta: w.meta,
        })
    }
}

impl ThresholdTable {
    /// Per-language entry when present, otherwise the channel's UNKNOWN entry.
    pub fn entry_for(&self, channel: &str, bucket: &Bucket) -> Result<&ThresholdEntry> {
        if !bucket.is_unknown() {
            if let Some(e) = self.entries.get(&(channel.to_string(), bucket.clone())) {
                return Ok(e);
            }
        }
        self.entries
            .get(&(channel.to_string(), Bucket::Unknown))
            .ok_or_else(|| Error::MissingUnknownEntry(channel.to_string()))
    }

    /// Checks that every channel has an UNKNOWN entry with a matching orientation.
    pub fn check_channels(&self, channels: &[ChannelSpec]) -> Result<()> {
        for c in channels {
            let e = self.entry_for(&c.name, &Bucket::Unknown)?;
            for entry in self.entries.values().filter(|e| e.channel == c.name) {
                if entry.orientation != c.orientation {
                    return Err(Error::TableMismatch(format!(
                        "channel {:?} calibrated as {} but configured as {}",
                        c.name, e.orientation, c.orientation
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Aligned plain-text listing of all entries.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let langs: Vec<&str> = self.known_languages.iter().map(String::as_str).collect();
        let _ = writeln!(out, "known languages: {}", langs.join(", "));
        let _ = writeln!(
            out,
            "{:<16} {:<8} {:>14} {:<18} {:>8} {:>7} {:>7}",
            "channel", "bucket", "threshold", "orientation", "j", "n_pos", "n_neg"
        );
        for e in self.entries.values() {
            let _ = writeln!(
                out,
                "{:<16} {:<8} {:>14.6} {:<18} {:>8.4} {:>7} {:>7}",
                e.channel,
                e.bucket.as_str(),
                e.threshold,
                e.orientation.as_str(),
                e.j_stat,
                e.n_pos,
                e.n_neg
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CalibrationOptions {
    pub min_samples: usize,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            min_samples: DEFAULT_MIN_SAMPLES,
        }
    }
}

fn fit_entry(
    channel: &ChannelSpec,
    bucket: Bucket,
    samples: &[(f64, Label)],
) -> Result<ThresholdEntry> {
    let scores: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let labels: Vec<Label> = samples.iter().map(|s| s.1).collect();
    let curve = build_roc(&scores, &labels, channel.orientation)?;
    let (threshold, j) = youden_threshold(&curve);
    Ok(ThresholdEntry {
        channel: channel.name.clone(),
        bucket,
        threshold,
        orientation: channel.orientation,
        j_stat: j,
        n_pos: curve.positives,
        n_neg: curve.negatives,
    })
}

pub fn dataset_digest(docs: &[DocumentRecord]) -> String {
    let mut h = Sha256::new();
    for d in docs {
        h.update(d.id.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// Fits one threshold per (channel, language bucket) from labeled documents.
///
/// The UNKNOWN entry of every channel is fit on all documents pooled. A known
/// language gets its own entry only when it has at least `min_samples`
/// valid scores in each class. Invalid scores are left out of every fit.
pub fn calibrate(
    docs: &[DocumentRecord],
    channels: &[ChannelSpec],
    known_languages: &BTreeSet<String>,
    options: &CalibrationOptions,
    registry: &MetricRegistry,
) -> Result<ThresholdTable> {
    if channels.is_empty() {
        return Err(Error::Config("no channels to calibrate".to_string()));
    }
    let mut buckets = Vec::with_capacity(docs.len());
    for d in docs {
        if d.label.is_none() {
            return Err(Error::LabelsRequired(d.id.clone()));
        }
        buckets.push(resolve_bucket(
            d.language.as_deref(),
            d.language_confidence,
            known_languages,
        )?);
    }

    let mut entries = BTreeMap::new();
    for channel in channels {
        let mut pooled: Vec<(f64, Label)> = Vec::with_capacity(docs.len());
        let mut per_lang: BTreeMap<&Bucket, Vec<(f64, Label)>> = BTreeMap::new();
        for (doc, bucket) in docs.iter().zip(&buckets) {
            let Some(value) = registry.score(doc, channel)?.get() else {
                continue;
            };
            let label = doc.label.expect("checked above");
            pooled.push((value, label));
            if !bucket.is_unknown() {
                per_lang.entry(bucket).or_default().push((value, label));
            }
        }

        let unknown = fit_entry(channel, Bucket::Unknown, &pooled).map_err(|e| match e {
            Error::DegenerateClasses(m) => {
                Error::DegenerateClasses(format!("channel {:?}: {m}", channel.name))
            }
            other => other,
        })?;
        entries.insert((channel.name.clone(), Bucket::Unknown), unknown);

        for (bucket, samples) in per_lang {
            let n_pos = samples.iter().filter(|s| s.1.is_machine()).count();
            let n_neg = samples.len() - n_pos;
            if n_pos < options.min_samples || n_neg < options.min_samples {
                log::debug!(
                    "{}/{}: {n_pos} machine, {n_neg} human; using UNKNOWN threshold",
                    channel.name,
                    bucket
                );
                continue;
            }
            let e = fit_entry(channel, bucket.clone(), &samples)?;
            entries.insert((channel.name.clone(), bucket.clone()), e);
        }
    }

    Ok(ThresholdTable {
        entries,
        known_languages: known_languages.clone(),
        meta: TableMeta {
            tool: concat!("mgtdetect ", env!("CARGO_PKG_VERSION")).to_string(),
            n_docs: docs.len(),
            dataset_digest: dataset_digest(docs),
            config_hash: None,
            min_samples: options.min_samples,
        },
    })
}
