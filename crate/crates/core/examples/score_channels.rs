//! Scores a hand-built document on every built-in statistical channel, and
//! registers an extra channel alongside them.

use mgtdetect::metrics::{InvalidReason, MetricRegistry, StatisticalMetric};
use mgtdetect::records::{ChannelSpec, DocumentRecord, Orientation, TokenRecord};

/// Fraction of tokens that were the observer's top-1 prediction.
struct TopOneRate;

impl StatisticalMetric for TopOneRate {
    fn orientation(&self) -> Orientation {
        Orientation::HigherIsMachine
    }

    fn score(&self, tokens: &[TokenRecord]) -> Result<f64, InvalidReason> {
        if tokens.is_empty() {
            return Err(InvalidReason::EmptyTokens);
        }
        Ok(tokens.iter().filter(|t| t.rank_observer == 1).count() as f64 / tokens.len() as f64)
    }
}

fn main() -> mgtdetect::Result<()> {
    let doc = DocumentRecord::new("demo").with_tokens(vec![
        TokenRecord::new(-0.3, 1.2, 1, 2.1),
        TokenRecord::new(-2.7, 3.4, 5, 3.0),
        TokenRecord::new(-0.05, 0.4, 1, 1.6),
        TokenRecord::new(-1.1, 2.2, 2, 2.4),
    ]);

    let mut registry = MetricRegistry::new();
    registry.register("top1_rate", TopOneRate)?;

    let mut channels: Vec<ChannelSpec> = [
        "likelihood",
        "entropy",
        "rank",
        "log_rank",
        "binoculars",
        "top1_rate",
    ]
    .iter()
    .map(|name| registry.spec(name))
    .collect::<mgtdetect::Result<_>>()?;
    channels.push(ChannelSpec::classifier("falcon"));

    for (name, score) in registry.score_all(&doc, &channels)? {
        match score.get() {
            Some(v) => println!("{name:<12} {v:>9.4}"),
            None => println!("{name:<12} {:>9} ({:?})", "invalid", score.reason),
        }
    }
    Ok(())
}
