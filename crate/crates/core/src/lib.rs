//! Evaluation of diagnostic and prognostic assays beyond ROC/AUC.
//!
//! Sensitivity and specificity are prevalence-independent, but how an assay
//! behaves in the clinic is not. This crate translates test characteristics
//! into prevalence-dependent quantities (false alarms among positive tests,
//! missed cases among negative tests, tests needed per detected case,
//! expected misclassification cost), sweeps them across prevalence, builds
//! empirical ROC curves from raw scores, and renders the results as SVG
//! plots and JSON/Markdown reports.
//!
//! ```
//! use assay_core::{metrics, Probability};
//!
//! let sens = Probability::new(0.90).unwrap();
//! let spec = Probability::new(0.90).unwrap();
//! let prev = Probability::new(0.10).unwrap();
//! let far = metrics::false_alarm_rate_at(sens, spec, prev).unwrap();
//! assert!((far.value() - 0.5).abs() < 1e-12);
//! ```

pub mod error;
pub mod ingest;
pub mod metrics;
pub mod plot;
pub mod report;
pub mod roc;
pub mod sweep;

pub use error::{Error, Result};
pub use ingest::{parse_samples_csv, CsvIngestConfig};
pub use metrics::{
    ConfidenceInterval, ConfusionMatrix, Probability, TestCharacteristics, TranslatedPerformance,
};
pub use plot::{render_prevalence_plot, render_roc_plot, PlotOptions};
pub use report::{build_report, report_to_json, report_to_markdown, Report};
pub use roc::{Label, RocCurve, RocPoint, ScoredSample};
pub use sweep::{CostWeights, PrevalenceCurve, PrevalenceGrid};
