//! Ensemble detection of machine-generated text.
//!
//! The crate works on per-document token statistics produced by an external
//! scorer ([`records`]). From those it computes zero-shot statistical channels
//! ([`metrics`]), fits one decision threshold per channel and language bucket
//! by maximizing TPR - FPR ([`calibration`], [`langgate`]), and combines the
//! per-channel decisions with a two-step majority vote ([`ensemble`]).
//! [`evaluation`] reports accuracy, per-channel AUC and a per-language
//! breakdown; [`obfuscation`] perturbs training texts with homoglyphs and
//! zero-width joiners.
//!
//! ```
//! use mgtdetect::prelude::*;
//! use mgtdetect::synthetic::{generate, SyntheticSpec};
//!
//! let registry = MetricRegistry::builtin();
//! let config = PipelineConfig::llm2s3("falcon", "mistral");
//! let train = generate(&SyntheticSpec { docs_per_language: 20, seed: 1, ..Default::default() });
//! let table = calibrate_pipeline(&train, &config, registry).unwrap();
//! let detector = Detector::new(config, table, registry).unwrap();
//! let prediction = detector.predict(&train[0]).unwrap();
//! assert_eq!(Some(prediction.final_label), train[0].label);
//! ```

pub mod calibration;
pub mod cli;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod langgate;
pub mod metrics;
pub mod obfuscation;
pub mod pipeline;
pub mod records;
pub mod synthetic;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::calibration::{
        auc, build_roc, calibrate, youden_threshold, CalibrationOptions, RocCurve, ThresholdEntry,
        ThresholdTable,
    };
    pub use crate::config::{Mode, PipelineConfig};
    pub use crate::ensemble::{predict, Detector, Prediction, PredictionLine};
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{evaluate, EvalReport};
    pub use crate::langgate::{resolve_bucket, Bucket};
    pub use crate::metrics::{score_all, ChannelScore, MetricRegistry};
    pub use crate::obfuscation::{obfuscate_dataset, ConfusableMap, ObfuscationPlan};
    pub use crate::pipeline::{calibrate_pipeline, evaluate_pipeline, predict_all};
    pub use crate::records::{
        read_dataset, write_dataset, ChannelSpec, DocumentRecord, Label, Orientation, TokenRecord,
    };
}
