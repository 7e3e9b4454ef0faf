//! Homoglyph substitution and zero-width-joiner insertion.
//!
//! Used to perturb a fraction of training or calibration texts so that
//! detectors see obfuscated inputs. All randomness comes from an explicit
//! seed; each document draws from its own ChaCha stream, so the output for a
//! document does not depend on how many others were processed before it.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::LazyLock;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::records::DocumentRecord;

pub const ZWJ: char = '\u{200D}';

pub const DEFAULT_CHAR_RATE: f64 = 0.1;

const BUILTIN_CONFUSABLES: &str = include_str!("../data/confusables.json");

static DEFAULT_MAP: LazyLock<ConfusableMap> = LazyLock::new(|| {
    ConfusableMap::from_json(BUILTIN_CONFUSABLES).expect("built-in confusable table parses")
});

/// Character → visually confusable replacements.
///
/// The source table lists Latin characters with their look-alikes; the
/// reverse direction is added on load so Cyrillic and Greek text can be
/// perturbed too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusableMap {
    map: HashMap<char, Vec<char>>,
}

fn single_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::ConfusableMap(format!(
            "{s:?} is not a single character"
        ))),
    }
}

impl ConfusableMap {
    pub fn builtin() -> &'static ConfusableMap {
        &DEFAULT_MAP
    }

    /// Parses `{"a": ["а", "α"], ...}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BTreeMap<String, Vec<String>> =
            serde_json::from_str(s).map_err(|e| Error::ConfusableMap(e.to_string()))?;
        let mut map: HashMap<char, Vec<char>> = HashMap::new();
        for (from, tos) in &raw {
            let from = single_char(from)?;
            for to in tos {
                let to = single_char(to)?;
                if to == from {
                    return Err(Error::ConfusableMap(format!("{from:?} maps to itself")));
                }
                map.entry(from).or_default().push(to);
                map.entry(to).or_default().push(from);
            }
        }
        for v in map.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Ok(Self { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| Error::Open {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&s)
    }

    pub fn contains(&self, c: char) -> bool {
        self.map.contains_key(&c)
    }

    pub fn confusables(&self, c: char) -> &[char] {
        self.map.get(&c).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Replaces each mappable character with probability `char_rate`.
    /// Character count is preserved.
    pub fn obfuscate<R: Rng + ?Sized>(&self, text: &str, char_rate: f64, rng: &mut R) -> String {
        text.chars()
            .map(|c| match self.map.get(&c) {
                Some(alts) if rng.gen::<f64>() < char_rate => alts[rng.gen_range(0..alts.len())],
                _ => c,
            })
            .collect()
    }
}

/// Homoglyph substitution with the built-in confusable table.
pub fn homoglyph_obfuscate<R: Rng + ?Sized>(text: &str, char_rate: f64, rng: &mut R) -> String {
    ConfusableMap::builtin().obfuscate(text, char_rate, rng)
}

/// Inserts U+200D after each character with probability `char_rate`.
pub fn zwj_insert<R: Rng + ?Sized>(text: &str, char_rate: f64, rng: &mut R) -> String {
    let mut out = String::with_capacity(text.len() * 2);
    for c in text.chars() {
        out.push(c);
        if rng.gen::<f64>() < char_rate {
            out.push(ZWJ);
        }
    }
    out
}

pub fn strip_zwj(text: &str) -> String {
    text.chars().filter(|&c| c != ZWJ).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObfuscationPlan {
    /// Fraction of documents to obfuscate.
    pub sample_rate: f64,
    /// Per-character perturbation probability within a selected document.
    pub char_rate: f64,
    pub seed: u64,
}

impl ObfuscationPlan {
    pub fn new(sample_rate: f64, seed: u64) -> Self {
        Self {
            sample_rate,
            char_rate: DEFAULT_CHAR_RATE,
            seed,
        }
    }

    pub fn with_char_rate(mut self, char_rate: f64) -> Self {
        self.char_rate = char_rate;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sample_rate", self.sample_rate),
            ("char_rate", self.char_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    /// Number of documents to select out of `n`.
    pub fn target_count(&self, n: usize) -> usize {
        (self.sample_rate * n as f64).round() as usize
    }

    fn doc_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64 + 1);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obfuscated {
    pub docs: Vec<DocumentRecord>,
    /// Ids of documents passed through obfuscation, in selection order.
    pub selected: Vec<String>,
    /// Ids drawn for selection but skipped for lacking text.
    pub skipped: Vec<String>,
}

/// Obfuscates `round(sample_rate * n)` documents chosen from the seed.
///
/// Each selected text goes through homoglyph substitution, then ZWJ
/// insertion. Ids, labels and every other field are kept. Documents without
/// text are skipped and the next candidate is drawn.
pub fn obfuscate_dataset(
    mut docs: Vec<DocumentRecord>,
    plan: &ObfuscationPlan,
    map: &ConfusableMap,
) -> Result<Obfuscated> {
    plan.validate()?;
    let target = plan.target_count(docs.len());
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.seed));

    let mut selected = Vec::with_capacity(target);
    let mut skipped = Vec::new();
    for idx in order {
        if selected.len() == target {
            break;
        }
        let doc = &mut docs[idx];
        let Some(text) = doc.text.as_deref() else {
            log::warn!("document {:?} has no text; drawing another", doc.id);
            skipped.push(doc.id.clone());
            continue;
        };
        let mut rng = plan.doc_rng(idx);
        let swapped = map.obfuscate(text, plan.char_rate, &mut rng);
        doc.text = Some(zwj_insert(&swapped, plan.char_rate, &mut rng));
        selected.push(doc.id.clone());
    }
    if selected.len() < target {
        log::warn!(
            "only {} of {target} requested documents carry text",
            selected.len()
        );
    }
    Ok(Obfuscated {
        docs,
        selected,
        skipped,
    })
}
