//! Synthetic labeled corpora with controllable channel separation.
//!
//! Each document draws a "machine-ness" latent per statistical channel from
//! N(machine_mean, sd) for machine documents and N(human_mean, sd) for human
//! ones. Lower-is-machine channels use `1 - latent`, so in every channel the
//! machine class sits on its machine side. The latent is then mapped into
//! token statistics whose document scores are affine in it:
//!
//! | channel    | document score            |
//! |------------|---------------------------|
//! | likelihood | `-0.2 - 4 (1 - v)`        |
//! | entropy    | `4 v`                     |
//! | rank       | `1 + 20 v` (integer ranks)|
//! | binoculars | `0.5 + v`                 |

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::records::{DocumentRecord, Label, TokenRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub languages: Vec<String>,
    pub docs_per_language: usize,
    pub language_confidence: f64,
    pub machine_mean: f64,
    pub human_mean: f64,
    pub sd: f64,
    pub tokens_per_doc: usize,
    pub clf_channels: Vec<String>,
    pub clf_machine: f64,
    pub clf_human: f64,
    /// Added to the latent of every document in a language.
    pub language_shift: BTreeMap<String, f64>,
    pub with_text: bool,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            languages: vec!["en".into(), "de".into(), "ru".into()],
            docs_per_language: 200,
            language_confidence: 0.95,
            machine_mean: 0.8,
            human_mean: 0.2,
            sd: 0.05,
            tokens_per_doc: 16,
            clf_channels: vec!["falcon".into(), "mistral".into()],
            clf_machine: 0.99,
            clf_human: 0.01,
            language_shift: BTreeMap::new(),
            with_text: false,
            seed: 0,
        }
    }
}

const WORDS: [&str; 12] = [
    "the", "model", "market", "science", "report", "people", "city", "water", "energy", "policy",
    "history", "open",
];

fn tokens_for(latents: [f64; 4], n: usize) -> Vec<TokenRecord> {
    let [v_lik, v_ent, v_rank, v_bino] = latents.map(|v| v.clamp(0.0, 1.5));
    let mean_lp = -0.2 - 4.0 * (1.0 - v_lik).max(0.0);
    let ent = 4.0 * v_ent;
    let xent = -mean_lp / (0.5 + v_bino);
    let total_rank = (n as f64 * (1.0 + 20.0 * v_rank)).round() as u64;
    let base = (total_rank / n as u64) as u32;
    let extra = (total_rank % n as u64) as usize;
    (0..n)
        .map(|i| {
            // zero-sum jitter keeps the mean exact for even n
            let jitter = if n.is_multiple_of(2) {
                0.1 * mean_lp * if i % 2 == 0 { 1.0 } else { -1.0 }
            } else {
                0.0
            };
            let rank = base + u32::from(i < extra);
            TokenRecord::new(mean_lp + jitter, ent, rank.max(1), xent)
        })
        .collect()
}

/// Generates `languages × docs_per_language` labeled documents, half machine.
pub fn generate(spec: &SyntheticSpec) -> Vec<DocumentRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let machine = Normal::new(spec.machine_mean, spec.sd).expect("finite sd");
    let human = Normal::new(spec.human_mean, spec.sd).expect("finite sd");
    let mut docs = Vec::with_capacity(spec.languages.len() * spec.docs_per_language);
    for lang in &spec.languages {
        let shift = spec.language_shift.get(lang).copied().unwrap_or(0.0);
        for i in 0..spec.docs_per_language {
            let label = Label::from_bool(i % 2 == 0);
            let dist = if label.is_machine() { &machine } else { &human };
            let m: [f64; 4] = std::array::from_fn(|_| dist.sample(&mut rng) + shift);
            // likelihood is higher-is-machine; the other three are lower-is-machine
            let latents = [m[0], 1.0 - m[1], 1.0 - m[2], 1.0 - m[3]];
            let mut doc = DocumentRecord::new(format!("{lang}-{i:05}"))
                .with_language(lang.clone(), Some(spec.language_confidence))
                .with_label(label)
                .with_tokens(tokens_for(latents, spec.tokens_per_doc.max(1)));
            let p = if label.is_machine() {
                spec.clf_machine
            } else {
                spec.clf_human
            };
            for c in &spec.clf_channels {
                doc.classifier_probs.insert(c.clone(), p);
            }
            if spec.with_text {
                let words: Vec<&str> = (0..12)
                    .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
                    .collect();
                doc.text = Some(format!("{}.", words.join(" ")));
            }
            docs.push(doc);
        }
    }
    docs
}
