//! Neutral data model for per-document token statistics, and JSON-lines I/O.
//!
//! A scorer (any language-model runtime) emits one [`DocumentRecord`] per
//! line. Everything downstream of this module works from these records only,
//! so the detector core never touches a model or a tokenizer.
//!
//! Wire format, one object per line:
//!
//! ```text
//! {"id": str, "text": str?, "lang": str?, "lang_conf": float?, "label": int?,
//!  "tokens": [{"lp": float, "ent": float, "rank": int, "xent": float}],
//!  "clf": {str: float}}
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed above zero for observed-token log-probabilities.
pub const LOGPROB_TOLERANCE: f64 = 1e-9;

/// Gold or predicted class. Serialized as `0` (human) / `1` (machine).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Label {
    Human,
    Machine,
}

impl Label {
    pub fn from_bool(machine: bool) -> Self {
        if machine {
            Label::Machine
        } else {
            Label::Human
        }
    }

    pub fn is_machine(self) -> bool {
        self == Label::Machine
    }

    pub fn flip(self) -> Self {
        Self::from_bool(!self.is_machine())
    }
}

impl TryFrom<u8> for Label {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        match v {
            0 => Ok(Label::Human),
            1 => Ok(Label::Machine),
            other => Err(format!("label must be 0 or 1, got {other}")),
        }
    }
}

impl From<Label> for u8 {
    fn from(l: Label) -> u8 {
        match l {
            Label::Human => 0,
            Label::Machine => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Statistics for one predicted position. Log-probabilities and entropies are in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenRecord {
    /// Observer log-probability of the observed token.
    #[serde(rename = "lp")]
    pub logprob_observer: f64,
    /// Entropy of the observer's predictive distribution.
    #[serde(rename = "ent")]
    pub entropy_observer: f64,
    /// 1-based rank of the observed token under the observer.
    #[serde(rename = "rank")]
    pub rank_observer: u32,
    /// Cross-entropy of the observer distribution under the performer.
    #[serde(rename = "xent")]
    pub xent_observer_performer: f64,
}

impl TokenRecord {
    pub fn new(logprob: f64, entropy: f64, rank: u32, xent: f64) -> Self {
        Self {
            logprob_observer: logprob,
            entropy_observer: entropy,
            rank_observer: rank,
            xent_observer_performer: xent,
        }
    }

    // written negated so NaN fails every check
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn check(&self) -> std::result::Result<(), String> {
        if !(self.logprob_observer <= LOGPROB_TOLERANCE) {
            return Err(format!("lp must be <= 0, got {}", self.logprob_observer));
        }
        if !(self.entropy_observer >= 0.0) {
            return Err(format!("ent must be >= 0, got {}", self.entropy_observer));
        }
        if self.rank_observer < 1 {
            return Err("rank must be >= 1".to_string());
        }
        if !(self.xent_observer_performer >= 0.0) {
            return Err(format!(
                "xent must be >= 0, got {}",
                self.xent_observer_performer
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(rename = "lang", default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(rename = "lang_conf", default, skip_serializing_if = "Option::is_none")]
    pub language_confidence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default)]
    pub tokens: Vec<TokenRecord>,
    /// Machine-class probability per classifier channel.
    #[serde(rename = "clf", default)]
    pub classifier_probs: BTreeMap<String, f64>,
}

impl DocumentRecord {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: None,
            language: None,
            language_confidence: None,
            label: None,
            tokens: Vec::new(),
            classifier_probs: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_language(mut self, lang: impl Into<String>, conf: Option<f64>) -> Self {
        self.language = Some(lang.into());
        self.language_confidence = conf;
        self
    }

    pub fn with_tokens(mut self, tokens: Vec<TokenRecord>) -> Self {
        self.tokens = tokens;
        self
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn with_prob(mut self, channel: impl Into<String>, p: f64) -> Self {
        self.classifier_probs.insert(channel.into(), p);
        self
    }

    /// Checks record-local invariants. `line` is used for error reporting only.
    pub fn validate(&self, line: usize) -> Result<()> {
        for (name, &p) in &self.classifier_probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::ProbabilityOutOfRange {
                    line,
                    field: format!("clf.{name}"),
                    value: p,
                });
            }
        }
        if let Some(c) = self.language_confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::ProbabilityOutOfRange {
                    line,
                    field: "lang_conf".to_string(),
                    value: c,
                });
            }
            if self.language.is_none() {
                return Err(Error::MalformedLine {
                    line,
                    message: "lang_conf present without lang".to_string(),
                });
            }
        }
        for (i, t) in self.tokens.iter().enumerate() {
            t.check().map_err(|m| Error::MalformedLine {
                line,
                message: format!("token {i}: {m}"),
            })?;
        }
        Ok(())
    }
}

/// Whether a channel is computed from token statistics or read from `clf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Statistical,
    Classifier,
}

/// Direction of a score in which machine-generated text lies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherIsMachine,
    LowerIsMachine,
}

impl Orientation {
    /// Maps a raw score into the space where larger means "more machine".
    pub fn normalize(self, score: f64) -> f64 {
        match self {
            Orientation::HigherIsMachine => score,
            Orientation::LowerIsMachine => -score,
        }
    }

    /// Inverse of [`Orientation::normalize`].
    pub fn denormalize(self, score: f64) -> f64 {
        self.normalize(score)
    }

    pub fn flip(self) -> Self {
        match self {
            Orientation::HigherIsMachine => Orientation::LowerIsMachine,
            Orientation::LowerIsMachine => Orientation::HigherIsMachine,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::HigherIsMachine => "higher_is_machine",
            Orientation::LowerIsMachine => "lower_is_machine",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub name: String,
    pub kind: ChannelKind,
    pub orientation: Orientation,
}

impl ChannelSpec {
    pub fn statistical(name: impl Into<String>, orientation: Orientation) -> Self {
        Self {
            name: name.into(),
            kind: ChannelKind::Statistical,
            orientation,
        }
    }

    /// Classifier channels carry a machine-class probability, so higher is machine.
    pub fn classifier(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: ChannelKind::Classifier,
            orientation: Orientation::HigherIsMachine,
        }
    }
}

/// Streaming reader over a JSON-lines dataset.
///
/// Yields records in input order; blank lines are skipped. Ids are checked
/// for uniqueness across everything read so far.
pub struct DatasetReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    seen: HashSet<String>,
}

impl<R: BufRead> DatasetReader<R> {
    pub fn new(source: R) -> Self {
        Self {
            lines: source.lines(),
            line_no: 0,
            seen: HashSet::new(),
        }
    }

    fn parse(&mut self, line: &str) -> Result<DocumentRecord> {
        let line_no = self.line_no;
        let doc: DocumentRecord = serde_json::from_str(line).map_err(|e| Error::MalformedLine {
            line: line_no,
            message: e.to_string(),
        })?;
        doc.validate(line_no)?;
        if !self.seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId {
                line: line_no,
                id: doc.id,
            });
        }
        Ok(doc)
    }
}

impl<R: BufRead> Iterator for DatasetReader<R> {
    type Item = Result<DocumentRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            return Some(self.parse(&line));
        }
    }
}

/// Reads a whole dataset, aborting on the first bad line.
pub fn read_dataset<R: BufRead>(source: R) -> Result<Vec<DocumentRecord>> {
    DatasetReader::new(source).collect()
}

pub fn write_record<W: Write>(doc: &DocumentRecord, sink: &mut W) -> Result<()> {
    serde_json::to_writer(&mut *sink, doc)?;
    sink.write_all(b"\n")?;
    Ok(())
}

pub fn write_dataset<W: Write>(docs: &[DocumentRecord], mut sink: W) -> Result<()> {
    for doc in docs {
        write_record(doc, &mut sink)?;
    }
    sink.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read_str(s: &str) -> Result<Vec<DocumentRecord>> {
        read_dataset(s.as_bytes())
    }

    #[test]
    fn empty_stream_reads_empty() {
        assert!(read_str("").unwrap().is_empty());
    }

    #[test]
    fn minimal_record() {
        let docs = read_str(r#"{"id":"a","tokens":[],"clf":{"mistral":0.5}}"#).unwrap();
        assert_eq!(docs.len(), 1);
        assert!(docs[0].tokens.is_empty());
        assert_eq!(docs[0].classifier_probs["mistral"], 0.5);
    }

    #[test]
    fn probability_out_of_range() {
        let err = read_str(r#"{"id":"a","tokens":[],"clf":{"mistral":1.3}}"#).unwrap_err();
        assert!(
            err.to_string().contains("probability out of range"),
            "{err}"
        );
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let input = "{\"id\":\"a\"}\n\n{\"id\":\n";
        match read_str(input).unwrap_err() {
            Error::MalformedLine { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = read_str("{\"id\":\"a\"}\n{\"id\":\"a\"}\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn unknown_fields_ignored() {
        let docs = read_str(r#"{"id":"a","extra":[1,2],"warning":"truncated"}"#).unwrap();
        assert_eq!(docs[0].id, "a");
    }

    #[test]
    fn bad_label_and_token_invariants() {
        assert!(read_str(r#"{"id":"a","label":2}"#).is_err());
        assert!(read_str(r#"{"id":"a","tokens":[{"lp":0.5,"ent":1,"rank":1,"xent":1}]}"#).is_err());
        assert!(
            read_str(r#"{"id":"a","tokens":[{"lp":-0.5,"ent":1,"rank":0,"xent":1}]}"#).is_err()
        );
        assert!(
            read_str(r#"{"id":"a","tokens":[{"lp":-0.5,"ent":-1,"rank":1,"xent":1}]}"#).is_err()
        );
        assert!(
            read_str(r#"{"id":"a","tokens":[{"lp":-0.5,"ent":1,"rank":1,"xent":-1}]}"#).is_err()
        );
        assert!(read_str(r#"{"id":"a","lang_conf":0.9}"#).is_err());
        assert!(read_str(r#"{"id":"a","lang":"en","lang_conf":1.5}"#).is_err());
    }

    #[test]
    fn optional_fields_elided() {
        let doc = DocumentRecord::new("x").with_prob("falcon", 0.25);
        let mut out = Vec::new();
        write_dataset(&[doc], &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "{\"id\":\"x\",\"tokens\":[],\"clf\":{\"falcon\":0.25}}\n"
        );
    }

    #[test]
    fn wire_field_names() {
        let doc = DocumentRecord::new("x")
            .with_text("hi")
            .with_language("en", Some(0.75))
            .with_label(Label::Machine)
            .with_tokens(vec![TokenRecord::new(-1.5, 2.0, 3, 2.5)]);
        let v: serde_json::Value = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["lang"], "en");
        assert_eq!(v["lang_conf"], 0.75);
        assert_eq!(v["label"], 1);
        assert_eq!(v["tokens"][0]["lp"], -1.5);
        assert_eq!(v["tokens"][0]["ent"], 2.0);
        assert_eq!(v["tokens"][0]["rank"], 3);
        assert_eq!(v["tokens"][0]["xent"], 2.5);
    }

    #[test]
    fn orientation_normalization() {
        assert_eq!(Orientation::LowerIsMachine.normalize(0.7), -0.7);
        assert_eq!(Orientation::HigherIsMachine.normalize(0.7), 0.7);
        let o = Orientation::LowerIsMachine;
        assert_eq!(o.denormalize(o.normalize(3.25)), 3.25);
    }
}
