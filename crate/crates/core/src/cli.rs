//! File-level commands behind the `mgtdetect` binary.
//!
//! Each command returns a [`Result`]; the binary maps errors to exit codes
//! with [`Error::exit_code`]: 1 for I/O, 2 for domain errors.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::calibration::ThresholdTable;
use crate::config::PipelineConfig;
use crate::ensemble::{Detector, PredictionLine};
use crate::error::{Error, Result};
use crate::evaluation::{collect_scores, evaluate, EvalReport};
use crate::metrics::MetricRegistry;
use crate::obfuscation::{obfuscate_dataset, ConfusableMap, Obfuscated, ObfuscationPlan};
use crate::pipeline::calibrate_pipeline;
use crate::records::{read_dataset, write_dataset, write_record, DatasetReader, DocumentRecord};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Open {
            path: path.to_path_buf(),
            source,
        })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Open {
            path: path.to_path_buf(),
            source,
        })
}

pub fn load_dataset(path: &Path) -> Result<Vec<DocumentRecord>> {
    read_dataset(open(path)?)
}

pub fn load_table(path: &Path) -> Result<ThresholdTable> {
    let mut s = String::new();
    std::io::Read::read_to_string(&mut open(path)?, &mut s)?;
    ThresholdTable::from_json(&s)
}

pub fn load_predictions(path: &Path) -> Result<Vec<PredictionLine>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p = serde_json::from_str(&line).map_err(|e| Error::MalformedLine {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(p);
    }
    Ok(out)
}

/// Calibrates thresholds and writes the table; the j-stat listing goes to `log`.
pub fn cmd_calibrate(
    config: &Path,
    input: &Path,
    out_table: &Path,
    log: &mut dyn Write,
) -> Result<ThresholdTable> {
    let config = PipelineConfig::load(config)?;
    let docs = load_dataset(input)?;
    let table = calibrate_pipeline(&docs, &config, MetricRegistry::builtin())?;
    let mut w = create(out_table)?;
    w.write_all(table.to_json()?.as_bytes())?;
    w.flush()?;
    log.write_all(table.render_text().as_bytes())?;
    Ok(table)
}

/// Streams documents through the detector, one output line per input record.
pub fn cmd_predict(config: &Path, table: &Path, input: &Path, out: &Path) -> Result<usize> {
    let config = PipelineConfig::load(config)?;
    let table = load_table(table)?;
    let detector = Detector::new(config, table, MetricRegistry::builtin())?;
    let reader = DatasetReader::new(open(input)?);
    let mut w = create(out)?;
    let mut n = 0;
    for doc in reader {
        let p = detector.predict(&doc?)?;
        serde_json::to_writer(&mut w, &PredictionLine::from(&p))?;
        w.write_all(b"\n")?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

/// Writes `report.json`; the plain-text table goes to `log`. With a config,
/// per-channel AUCs are computed from the gold records' raw scores.
pub fn cmd_evaluate(
    pred: &Path,
    gold: &Path,
    out: &Path,
    config: Option<&Path>,
    log: &mut dyn Write,
) -> Result<EvalReport> {
    let predictions = load_predictions(pred)?;
    let gold_docs = load_dataset(gold)?;
    let (scores, system) = match config {
        Some(path) => {
            let cfg = PipelineConfig::load(path)?;
            let reg = MetricRegistry::builtin();
            cfg.validate(reg)?;
            let specs = cfg.all_specs(reg)?;
            (
                Some(collect_scores(&gold_docs, &specs, reg)?),
                format!("ensemble ({})", cfg.mode.as_str()),
            )
        }
        None => (None, "ensemble".to_string()),
    };
    let report = evaluate(&predictions, &gold_docs, scores.as_ref())?;
    let mut w = create(out)?;
    w.write_all(report.to_json()?.as_bytes())?;
    w.flush()?;
    log.write_all(report.render_text(&system).as_bytes())?;
    Ok(report)
}

pub fn cmd_obfuscate(
    plan: &ObfuscationPlan,
    map: Option<&Path>,
    input: &Path,
    out: &Path,
) -> Result<Obfuscated> {
    let loaded;
    let map = match map {
        Some(p) => {
            loaded = ConfusableMap::load(p)?;
            &loaded
        }
        None => ConfusableMap::builtin(),
    };
    plan.validate()?;
    let docs = load_dataset(input)?;
    let result = obfuscate_dataset(docs, plan, map)?;
    write_dataset(&result.docs, create(out)?)?;
    Ok(result)
}

pub fn cmd_inspect(table: &Path, out: &mut dyn Write) -> Result<()> {
    let table = load_table(table)?;
    out.write_all(table.render_text().as_bytes())?;
    if let Some(h) = &table.meta.config_hash {
        writeln!(out, "config hash: {h}")?;
    }
    writeln!(
        out,
        "calibrated on {} documents (digest {})",
        table.meta.n_docs, table.meta.dataset_digest
    )?;
    Ok(())
}

/// Writes one record per line to `path`.
pub fn save_dataset(docs: &[DocumentRecord], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    for d in docs {
        write_record(d, &mut w)?;
    }
    w.flush()?;
    Ok(())
}
