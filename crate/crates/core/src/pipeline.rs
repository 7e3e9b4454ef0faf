//! Whole-dataset calibrate / predict / evaluate driven by a [`PipelineConfig`].

use crate::calibration::{calibrate, ThresholdTable};
use crate::config::PipelineConfig;
use crate::ensemble::{Detector, Prediction};
use crate::error::Result;
use crate::evaluation::{collect_scores, evaluate, EvalReport};
use crate::metrics::MetricRegistry;
use crate::records::DocumentRecord;

/// Calibrates every channel the configuration thresholds from data.
pub fn calibrate_pipeline(
    docs: &[DocumentRecord],
    config: &PipelineConfig,
    registry: &MetricRegistry,
) -> Result<ThresholdTable> {
    config.validate(registry)?;
    let channels = config.calibrated_specs(registry)?;
    let mut table = calibrate(
        docs,
        &channels,
        &config.known_languages,
        &config.calibration_options(),
        registry,
    )?;
    table.meta.config_hash = Some(config.hash());
    Ok(table)
}

pub fn predict_all(docs: &[DocumentRecord], detector: &Detector<'_>) -> Result<Vec<Prediction>> {
    docs.iter().map(|d| detector.predict(d)).collect()
}

/// Evaluates predictions, with per-channel AUC from the gold documents' raw scores.
pub fn evaluate_pipeline(
    predictions: &[Prediction],
    gold: &[DocumentRecord],
    config: &PipelineConfig,
    registry: &MetricRegistry,
) -> Result<EvalReport> {
    let scores = collect_scores(gold, &config.all_specs(registry)?, registry)?;
    evaluate(predictions, gold, Some(&scores))
}
