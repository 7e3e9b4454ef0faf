//! Brute-force oracles shared by the integration and acceptance tests.
//! None of these go through the ROC curve code they check.
#![allow(dead_code)]

use mgtdetect::records::{DocumentRecord, Label, Orientation, TokenRecord};
use rand::Rng;

/// P(score_pos > score_neg) + 0.5 P(tie), by counting every pair.
pub fn mann_whitney(scores: &[f64], labels: &[Label], orientation: Orientation) -> f64 {
    let (mut wins, mut pairs) = (0.0f64, 0u64);
    for (i, &li) in labels.iter().enumerate() {
        if !li.is_machine() {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj.is_machine() {
                continue;
            }
            let (a, b) = (
                orientation.normalize(scores[i]),
                orientation.normalize(scores[j]),
            );
            pairs += 1;
            if a > b {
                wins += 1.0;
            } else if a == b {
                wins += 0.5;
            }
        }
    }
    wins / pairs as f64
}

/// (tp, fp) when everything with normalized score >= `cut` is called machine.
pub fn confusion_at(
    scores: &[f64],
    labels: &[Label],
    orientation: Orientation,
    cut: f64,
) -> (usize, usize) {
    let mut tp = 0;
    let mut fp = 0;
    for (&s, &l) in scores.iter().zip(labels) {
        if orientation.normalize(s) >= cut {
            if l.is_machine() {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    (tp, fp)
}

pub fn j_from_counts(tp: usize, fp: usize, p: usize, n: usize) -> f64 {
    tp as f64 / p as f64 - fp as f64 / n as f64
}

/// Max TPR - FPR over every cut position: below all, at each score, between
/// each adjacent pair, and above all (2n + 1 candidates for distinct scores).
pub fn scan_youden(scores: &[f64], labels: &[Label], orientation: Orientation) -> f64 {
    let p = labels.iter().filter(|l| l.is_machine()).count();
    let n = labels.len() - p;
    let mut v: Vec<f64> = scores.iter().map(|&s| orientation.normalize(s)).collect();
    v.sort_by(f64::total_cmp);
    let mut cuts = vec![v[0] - 1.0, v[v.len() - 1] + 1.0];
    for w in v.windows(2) {
        cuts.push(w[0]);
        cuts.push((w[0] + w[1]) / 2.0);
    }
    cuts.push(v[v.len() - 1]);
    cuts.into_iter()
        .map(|c| {
            let (tp, fp) = confusion_at(scores, labels, orientation, c);
            j_from_counts(tp, fp, p, n)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random binary instance with both classes; `ties` draws scores from a coarse grid.
pub fn random_instance<R: Rng>(rng: &mut R, ties: bool) -> (Vec<f64>, Vec<Label>) {
    loop {
        let n = rng.gen_range(2..=200);
        let bias: f64 = rng.gen_range(-1.0..1.0);
        let mut scores = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for _ in 0..n {
            let machine = rng.gen_bool(0.5);
            let raw: f64 = rng.gen_range(0.0..1.0) + if machine { bias } else { 0.0 };
            scores.push(if ties { (raw * 8.0).round() / 8.0 } else { raw });
            labels.push(Label::from_bool(machine));
        }
        if labels.iter().any(|l| l.is_machine()) && labels.iter().any(|l| !l.is_machine()) {
            return (scores, labels);
        }
    }
}

pub fn random_orientation<R: Rng>(rng: &mut R) -> Orientation {
    if rng.gen_bool(0.5) {
        Orientation::HigherIsMachine
    } else {
        Orientation::LowerIsMachine
    }
}

/// Two-step vote written out case by case: when both classifiers agree they
/// decide; otherwise the statistical majority breaks the tie.
pub fn two_step_by_cases(s: [bool; 3], c1: bool, c2: bool) -> bool {
    if c1 == c2 {
        c1
    } else {
        (s[0] && s[1]) || (s[0] && s[2]) || (s[1] && s[2])
    }
}

pub fn random_tokens(rng: &mut impl Rng, n: usize) -> Vec<TokenRecord> {
    (0..n)
        .map(|_| {
            TokenRecord::new(
                -rng.gen_range(0.0..15.0),
                rng.gen_range(0.0..9.0),
                rng.gen_range(1..60_000),
                rng.gen_range(0.05..12.0),
            )
        })
        .collect()
}

pub fn random_string(rng: &mut impl Rng) -> String {
    const POOL: &[char] = &[
        'a', 'Z', ' ', '"', '\\', '\n', 'é', 'Ж', '中', '😀', '\u{200D}', '\t',
    ];
    let n = rng.gen_range(0..20);
    (0..n).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect()
}

pub fn random_record(rng: &mut impl Rng, i: usize) -> DocumentRecord {
    let mut d = DocumentRecord::new(format!("{}-{i}", random_string(rng)));
    if rng.gen_bool(0.5) {
        d.text = Some(random_string(rng));
    }
    if rng.gen_bool(0.7) {
        d.language = Some(["en", "de", "it", "zh"][rng.gen_range(0..4)].to_string());
        if rng.gen_bool(0.7) {
            d.language_confidence = Some(rng.gen_range(0.0..=1.0));
        }
    }
    if rng.gen_bool(0.8) {
        d.label = Some(Label::from_bool(rng.gen_bool(0.5)));
    }
    let n = rng.gen_range(0..6);
    d.tokens = random_tokens(rng, n);
    for name in ["falcon", "mistral", "llama"] {
        if rng.gen_bool(0.5) {
            d.classifier_probs
                .insert(name.to_string(), rng.gen_range(0.0..=1.0));
        }
    }
    d
}
