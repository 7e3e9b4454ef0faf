use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mgtdetect::calibration::ThresholdTable;
use mgtdetect::cli::{load_dataset, load_predictions, save_dataset};
use mgtdetect::config::PipelineConfig;
use mgtdetect::ensemble::{Detector, PredictionLine};
use mgtdetect::evaluation::{collect_scores, evaluate};
use mgtdetect::langgate::Bucket;
use mgtdetect::metrics::MetricRegistry;
use mgtdetect::records::DocumentRecord;
use mgtdetect::synthetic::{generate, SyntheticSpec};
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgtdetect"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: TempDir::new().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write_config(&self, cfg: &PipelineConfig) -> PathBuf {
        let path = self.path("config.json");
        std::fs::write(&path, serde_json::to_string(cfg).unwrap()).unwrap();
        path
    }

    fn write_docs(&self, name: &str, docs: &[DocumentRecord]) -> PathBuf {
        let path = self.path(name);
        save_dataset(docs, &path).unwrap();
        path
    }
}

fn corpus(seed: u64) -> Vec<DocumentRecord> {
    generate(&SyntheticSpec {
        docs_per_language: 30,
        seed,
        with_text: true,
        ..Default::default()
    })
}

#[test]
fn calibrate_separable_set() {
    let fx = Fixture::new();
    let cfg = fx.write_config(&PipelineConfig::llm2s3("falcon", "mistral"));
    let input = fx.write_docs("train.jsonl", &corpus(1));
    let table = fx.path("table.json");
    let out = bin(&[
        "calibrate",
        "--config",
        p(&cfg),
        "--input",
        p(&input),
        "--out-table",
        p(&table),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = ThresholdTable::from_json(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert!(t.entries.values().all(|e| e.j_stat == 1.0));
    assert_eq!(t.entries.len(), 5 * 4);
    assert!(String::from_utf8_lossy(&out.stdout).contains("binoculars"));

    let inspect = bin(&["inspect", "--table", p(&table)]);
    assert_eq!(inspect.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&inspect.stdout).contains("UNKNOWN"));
}

#[test]
fn calibrate_errors() {
    let fx = Fixture::new();
    let cfg = fx.write_config(&PipelineConfig::llm2s3("falcon", "mistral"));
    let mut docs = corpus(1);
    for d in &mut docs {
        d.label = None;
    }
    let input = fx.write_docs("unlabeled.jsonl", &docs);
    let table = fx.path("table.json");
    let out = bin(&[
        "calibrate",
        "--config",
        p(&cfg),
        "--input",
        p(&input),
        "--out-table",
        p(&table),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("labels required"));

    let missing = fx.path("nope.jsonl");
    let out = bin(&[
        "calibrate",
        "--config",
        p(&cfg),
        "--input",
        p(&missing),
        "--out-table",
        p(&table),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin(&["calibrate"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    // obfuscation requires an explicit seed
    assert_eq!(
        bin(&[
            "obfuscate",
            "--sample-rate",
            "0.2",
            "--input",
            "a",
            "--out",
            "b"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

fn calibrate_lib(cfg: &PipelineConfig, docs: &[DocumentRecord]) -> ThresholdTable {
    mgtdetect::pipeline::calibrate_pipeline(docs, cfg, MetricRegistry::builtin()).unwrap()
}

#[test]
fn predict_matches_library() {
    let fx = Fixture::new();
    let config = PipelineConfig::llm2s3("falcon", "mistral");
    let cfg = fx.write_config(&config);
    let train = corpus(1);
    let mut test = generate(&SyntheticSpec {
        docs_per_language: 30,
        seed: 2,
        sd: 0.3,
        ..Default::default()
    });
    test[0].language = Some("it".into());
    test[1].language_confidence = Some(0.4);
    test[2].tokens.clear();
    test[3].classifier_probs.clear();
    let table = calibrate_lib(&config, &train);
    let table_path = fx.path("table.json");
    std::fs::write(&table_path, table.to_json().unwrap()).unwrap();
    let input = fx.write_docs("test.jsonl", &test);
    let out_path = fx.path("pred.jsonl");

    let out = bin(&[
        "predict",
        "--config",
        p(&cfg),
        "--table",
        p(&table_path),
        "--input",
        p(&input),
        "--out",
        p(&out_path),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines = load_predictions(&out_path).unwrap();

    let det = Detector::new(config, table, MetricRegistry::builtin()).unwrap();
    let expected: Vec<PredictionLine> = test
        .iter()
        .map(|d| PredictionLine::from(&det.predict(d).unwrap()))
        .collect();
    assert_eq!(lines, expected);
    assert_eq!(lines[0].bucket, Bucket::Unknown);
    assert_eq!(lines[1].bucket, Bucket::Unknown);
    assert_eq!(lines[2].decisions["entropy"], None);
    assert_eq!(lines[3].decisions["mistral"], None);
}

#[test]
fn predict_empty_and_mismatch() {
    let fx = Fixture::new();
    let config = PipelineConfig::llm2s3("falcon", "mistral");
    let cfg = fx.write_config(&config);
    let mut table = calibrate_lib(&config, &corpus(1));
    let good = fx.path("table.json");
    std::fs::write(&good, table.to_json().unwrap()).unwrap();
    let empty = fx.write_docs("empty.jsonl", &[]);
    let out_path = fx.path("pred.jsonl");
    let out = bin(&[
        "predict",
        "--config",
        p(&cfg),
        "--table",
        p(&good),
        "--input",
        p(&empty),
        "--out",
        p(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), "");

    table
        .entries
        .retain(|(c, b), _| !(c == "mistral" && b.is_unknown()));
    let bad = fx.path("bad_table.json");
    std::fs::write(&bad, table.to_json().unwrap()).unwrap();
    let out = bin(&[
        "predict",
        "--config",
        p(&cfg),
        "--table",
        p(&bad),
        "--input",
        p(&empty),
        "--out",
        p(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evaluate_matches_library_bytes() {
    let fx = Fixture::new();
    let config = PipelineConfig::llm2s3("falcon", "mistral");
    let cfg = fx.write_config(&config);
    let train = fx.write_docs("train.jsonl", &corpus(1));
    let test_docs = generate(&SyntheticSpec {
        docs_per_language: 30,
        seed: 3,
        sd: 0.25,
        ..Default::default()
    });
    let test = fx.write_docs("test.jsonl", &test_docs);
    let (table, pred, report) = (fx.path("t.json"), fx.path("p.jsonl"), fx.path("r.json"));

    let run = |args: &[&str]| {
        let o = bin(args);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        o
    };
    run(&[
        "calibrate",
        "--config",
        p(&cfg),
        "--input",
        p(&train),
        "--out-table",
        p(&table),
    ]);
    run(&[
        "predict",
        "--config",
        p(&cfg),
        "--table",
        p(&table),
        "--input",
        p(&test),
        "--out",
        p(&pred),
    ]);
    let out = run(&[
        "evaluate",
        "--pred",
        p(&pred),
        "--gold",
        p(&test),
        "--out",
        p(&report),
        "--config",
        p(&cfg),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("ensemble (two_step)") && l.trim_end().ends_with("N/A")));

    let reg = MetricRegistry::builtin();
    let preds = load_predictions(&pred).unwrap();
    let gold = load_dataset(&test).unwrap();
    let scores = collect_scores(&gold, &config.all_specs(reg).unwrap(), reg).unwrap();
    let lib = evaluate(&preds, &gold, Some(&scores)).unwrap();
    assert_eq!(
        std::fs::read_to_string(&report).unwrap(),
        lib.to_json().unwrap()
    );
}

#[test]
fn evaluate_perfect_and_mismatch() {
    let fx = Fixture::new();
    let gold_docs = corpus(4);
    let gold = fx.write_docs("gold.jsonl", &gold_docs);
    let perfect: Vec<String> = gold_docs
        .iter()
        .map(|d| {
            format!(
                r#"{{"id":{},"bucket":"UNKNOWN","decisions":{{}},"final":{}}}"#,
                serde_json::to_string(&d.id).unwrap(),
                d.label.unwrap()
            )
        })
        .collect();
    let pred = fx.path("p.jsonl");
    std::fs::write(&pred, perfect.join("\n") + "\n").unwrap();
    let report = fx.path("r.json");
    let out = bin(&[
        "evaluate",
        "--pred",
        p(&pred),
        "--gold",
        p(&gold),
        "--out",
        p(&report),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["accuracy"], 1.0);

    std::fs::write(
        &pred,
        perfect[1..].join("\n")
            + "\n{\"id\":\"ghost\",\"bucket\":\"UNKNOWN\",\"decisions\":{},\"final\":0}\n",
    )
    .unwrap();
    let out = bin(&[
        "evaluate",
        "--pred",
        p(&pred),
        "--gold",
        p(&gold),
        "--out",
        p(&report),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn obfuscate_command() {
    let fx = Fixture::new();
    let docs = generate(&SyntheticSpec {
        languages: vec!["en".into()],
        docs_per_language: 10,
        with_text: true,
        ..Default::default()
    });
    let input = fx.write_docs("in.jsonl", &docs);
    let (a, b) = (fx.path("a.jsonl"), fx.path("b.jsonl"));
    for out in [&a, &b] {
        let o = bin(&[
            "obfuscate",
            "--sample-rate",
            "0.2",
            "--seed",
            "5",
            "--input",
            p(&input),
            "--out",
            p(out),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let out_docs = load_dataset(&a).unwrap();
    let changed = docs.iter().zip(&out_docs).filter(|(x, y)| x != y).count();
    assert_eq!(changed, 2);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = bin(&[
        "obfuscate",
        "--sample-rate",
        "0",
        "--seed",
        "5",
        "--input",
        p(&input),
        "--out",
        p(&a),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&input).unwrap());

    let map = fx.path("map.json");
    std::fs::write(&map, r#"{"e": ["ė"]}"#).unwrap();
    let o = bin(&[
        "obfuscate",
        "--sample-rate",
        "1",
        "--char-rate",
        "1",
        "--seed",
        "5",
        "--map",
        p(&map),
        "--input",
        p(&input),
        "--out",
        p(&a),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out_docs = load_dataset(&a).unwrap();
    assert!(out_docs
        .iter()
        .all(|d| !d.text.as_ref().unwrap().contains('e')));

    let o = bin(&[
        "obfuscate",
        "--sample-rate",
        "1.5",
        "--seed",
        "5",
        "--input",
        p(&input),
        "--out",
        p(&a),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
