//! Multiclass ROC analysis with whitening-derived class weights.
//!
//! Given per-class classifier scores and true labels, this crate builds a
//! single aggregated multiclass ROC curve whose class weights come from a
//! multidimensional Gini decomposition of the whitened score matrix, and
//! reports it alongside the standard baselines: per-class one-vs-rest
//! curves, macro and micro AUC, and the pairwise M-measure. Bootstrap
//! resampling provides pointwise confidence bands for the aggregated curve.
//!
//! The pipeline is deterministic end to end: a dataset, an options struct,
//! and a seed fully determine every byte of the output report.
//!
//! ```no_run
//! use mcroc::dataset::{load_dataset, LoadOptions};
//! use mcroc::pipeline::{evaluate_dataset, EvalOptions};
//!
//! # fn main() -> Result<(), mcroc::error::Error> {
//! let dataset = load_dataset("scores.csv", &LoadOptions::default())?;
//! let options = EvalOptions::default();
//! let report = evaluate_dataset(&dataset, &options, options.echo())?;
//! println!("aggregated AUC: {}", report.auc.table.gini_auc);
//! # Ok(())
//! # }
//! ```

pub mod bootstrap;
pub mod dataset;
pub mod error;
pub mod gini;
pub mod linalg;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod roc;
pub mod whitening;

pub use bootstrap::{bootstrap_band, BootstrapConfig, BootstrapOutcome, ConfidenceBand};
pub use dataset::{
    class_frequencies, load_dataset, to_indicator, write_dataset, ClassLabel, EvaluationDataset,
    IndicatorMatrix, LoadOptions,
};
pub use error::{Error, ErrorClass, Result};
pub use gini::{
    auc_from_gini, class_weights, gini_from_auc, gini_univariate, multidimensional_gini,
    GiniDecomposition,
};
pub use pipeline::{evaluate_dataset, EvalOptions};
pub use report::{read_report, write_curve_csv, write_report, ConfigEcho, EvaluationReport};
pub use roc::{
    gini_auc, m_measure, macro_auc, mann_whitney_auc, micro_auc, roc_aggregated, roc_binary,
    roc_per_class, AggregatedRoc, AucTable, ClassCurve, CurveKind, MMeasure, RocCurve, RocPoint,
};
pub use whitening::{
    estimate_moments, fit_zca_cor, inverse_sqrt_symmetric, MomentEstimates, WhiteningModel,
};
