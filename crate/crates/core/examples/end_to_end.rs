//! Calibrate, predict and evaluate on a synthetic three-language corpus, then
//! print the report.

use std::collections::BTreeMap;

use mgtdetect::config::PipelineConfig;
use mgtdetect::ensemble::Detector;
use mgtdetect::metrics::MetricRegistry;
use mgtdetect::pipeline::{calibrate_pipeline, evaluate_pipeline, predict_all};
use mgtdetect::synthetic::{generate, SyntheticSpec};

fn main() -> mgtdetect::Result<()> {
    let registry = MetricRegistry::builtin();
    let config = PipelineConfig::llm2s3("falcon", "mistral");

    let shift = BTreeMap::from([("en".to_string(), 0.1), ("de".to_string(), -0.1)]);
    let train = generate(&SyntheticSpec {
        sd: 0.15,
        language_shift: shift.clone(),
        seed: 1,
        ..Default::default()
    });
    let test = generate(&SyntheticSpec {
        sd: 0.15,
        language_shift: shift,
        seed: 2,
        ..Default::default()
    });

    let table = calibrate_pipeline(&train, &config, registry)?;
    print!("{}", table.render_text());
    println!();

    let detector = Detector::new(config.clone(), table, registry)?;
    let predictions = predict_all(&test, &detector)?;
    let report = evaluate_pipeline(&predictions, &test, &config, registry)?;
    print!("{}", report.render_text("LLM2S3"));
    Ok(())
}
