//! End-to-end evaluation: dataset in, report out.

use std::time::{SystemTime, UNIX_EPOCH};

use crate::bootstrap::{bootstrap_band, BootstrapConfig};
use crate::dataset::{class_frequencies, EvaluationDataset};
use crate::error::Result;
use crate::gini::multidimensional_gini;
use crate::report::{
    AggregationReport, AucReport, BootstrapReport, ConfigEcho, CurveSet, DatasetSummary,
    EvaluationReport, Provenance, WhiteningReport, SCHEMA_VERSION,
};
use crate::roc::{m_measure, macro_auc, micro_auc, roc_aggregated, roc_per_class, AucTable};
use crate::whitening::{estimate_moments, fit_zca_cor, DEFAULT_RIDGE};

/// Numeric knobs of one evaluation run; all defaults are materialized up
/// front so a run is fully described by this struct plus the input data.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalOptions {
    pub grid_size: usize,
    pub ridge: f64,
    /// Recorded even when the bootstrap is disabled.
    pub seed: u64,
    pub bootstrap: bool,
    pub replicates: usize,
    pub level: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            grid_size: 512,
            ridge: DEFAULT_RIDGE,
            seed: 42,
            bootstrap: false,
            replicates: 1000,
            level: 0.95,
        }
    }
}

impl EvalOptions {
    /// A config echo for library runs without file paths; the CLI fills in
    /// the file-level fields itself.
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            input: None,
            label_column: crate::dataset::DEFAULT_LABEL_COLUMN.to_string(),
            score_columns: None,
            delimiter: ",".to_string(),
            grid_size: self.grid_size,
            ridge: self.ridge,
            bootstrap_enabled: self.bootstrap,
            replicates: self.replicates,
            level: self.level,
            seed: self.seed,
            out_dir: None,
            plots: false,
        }
    }
}

/// Runs the whole pipeline: moments, whitening, Gini decomposition,
/// per-class and aggregated curves, the scalar AUC table, and (optionally)
/// the bootstrap band.
pub fn evaluate_dataset(
    dataset: &EvaluationDataset,
    options: &EvalOptions,
    echo: ConfigEcho,
) -> Result<EvaluationReport> {
    let class_names = dataset.class_names();
    let frequencies = class_frequencies(dataset);

    let moments = estimate_moments(dataset.scores())?;
    let model = fit_zca_cor(moments, options.ridge)?;
    let decomposition = multidimensional_gini(&model, dataset.scores())?;

    let per_class = roc_per_class(dataset);
    let aggregated = roc_aggregated(dataset, &decomposition.weights, options.grid_size)?;
    let macro_value = macro_auc(&per_class)?;
    let micro_curve = micro_auc(dataset)?;
    let m = m_measure(dataset)?;

    let bootstrap = if options.bootstrap {
        let config = BootstrapConfig {
            replicates: options.replicates,
            level: options.level,
            seed: options.seed,
            grid_size: options.grid_size,
            ridge: options.ridge,
        };
        let outcome = bootstrap_band(dataset, &config)?;
        Some(BootstrapReport {
            replicates: config.replicates,
            level: config.level,
            seed: config.seed,
            auc_std_error: outcome.auc_std_error,
            discarded_replicates: outcome.discarded,
            band: outcome.band,
            replicate_aucs: outcome.replicate_aucs,
        })
    } else {
        None
    };

    let per_class_auc: Vec<Option<f64>> = per_class
        .iter()
        .map(|c| c.curve.as_ref().map(|curve| curve.auc))
        .collect();
    let macro_excluded = per_class.iter().filter(|c| c.curve.is_none()).count();

    let report = EvaluationReport {
        schema_version: SCHEMA_VERSION,
        dataset: DatasetSummary {
            n: dataset.len(),
            k: dataset.class_count(),
            classes: class_names.clone(),
            frequencies,
            empty_classes: dataset
                .empty_classes()
                .iter()
                .map(|&i| class_names[i].clone())
                .collect(),
        },
        whitening: WhiteningReport {
            method: model.method.clone(),
            ridge: model.ridge,
            variance_floor: model.variance_floor,
            correlation_floor: model.correlation_floor,
            condition_residual: model.condition_residual(),
            degenerate_columns: model
                .moments
                .degenerate_columns
                .iter()
                .map(|&i| class_names[i].clone())
                .collect(),
        },
        auc: AucReport {
            table: AucTable {
                gini_auc: aggregated.curve.auc,
                macro_auc: macro_value,
                micro_auc: micro_curve.auc,
                m_measure: m.value,
                per_class_auc,
            },
            gini_identity_auc: (decomposition.aggregate + 1.0) / 2.0,
        },
        gini: decomposition,
        curves: CurveSet {
            per_class,
            aggregated: aggregated.curve,
            micro: micro_curve,
        },
        aggregation: AggregationReport {
            weights_used: aggregated.weights_used,
            dropped_classes: aggregated
                .dropped_classes
                .iter()
                .map(|&i| class_names[i].clone())
                .collect(),
            macro_excluded_classes: macro_excluded,
            m_measure_skipped_pairs: m.skipped_pairs,
        },
        bootstrap,
        provenance: Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: options.seed,
            config: echo,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    };
    Ok(report)
}
