//! Bootstrap confidence bands for the aggregated ROC curve.
//!
//! Rows are resampled with replacement and the whole pipeline (moments,
//! whitening, class weights, aggregated curve) is re-run per replicate.
//! Replicate curves are interpolated onto a shared FPR grid; the band is
//! the pointwise percentile interval. Every replicate draws from its own
//! stream of a counter-based generator, so output depends only on the
//! dataset and the configuration.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::EvaluationDataset;
use crate::error::{Error, Result};
use crate::gini::class_weights;
use crate::roc::{roc_aggregated, RocCurve};
use crate::whitening::{estimate_moments, fit_zca_cor, DEFAULT_RIDGE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of usable replicates (B).
    pub replicates: usize,
    /// Confidence level of the band, e.g. 0.95.
    pub level: f64,
    pub seed: u64,
    /// Threshold grid size for the aggregated curve; also the size of the
    /// shared FPR grid.
    pub grid_size: usize,
    /// Ridge passed through to the per-replicate whitening fit.
    pub ridge: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 1000,
            level: 0.95,
            seed: 42,
            grid_size: 512,
            ridge: DEFAULT_RIDGE,
        }
    }
}

/// Pointwise percentile band on a shared FPR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub fpr_grid: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub level: f64,
    pub replicates: usize,
}

/// Band plus the replicate AUC distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapOutcome {
    pub band: ConfidenceBand,
    pub replicate_aucs: Vec<f64>,
    /// Sample standard deviation of the replicate AUCs.
    pub auc_std_error: f64,
    /// Replicates discarded because no class survived the resample.
    pub discarded: usize,
}

/// TPR of the curve at a given FPR, reading vertical segments at their
/// upper end and interpolating linearly in between.
pub(crate) fn tpr_at(curve: &RocCurve, fpr: f64) -> f64 {
    let points = &curve.points;
    let hi = points.partition_point(|p| p.fpr <= fpr);
    if hi == 0 {
        return points[0].tpr;
    }
    if hi == points.len() {
        return points[hi - 1].tpr;
    }
    let a = &points[hi - 1];
    let b = &points[hi];
    let span = b.fpr - a.fpr;
    let t = (fpr - a.fpr) / span;
    a.tpr + t * (b.tpr - a.tpr)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let last = sorted.len() - 1;
    let position = q * last as f64;
    let lo = position.floor() as usize;
    let hi = position.ceil() as usize;
    if sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    let frac = position - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

fn replicate_curve(
    dataset: &EvaluationDataset,
    ridge: f64,
    grid_size: usize,
) -> Result<RocCurve> {
    let moments = estimate_moments(dataset.scores())?;
    let model = fit_zca_cor(moments, ridge)?;
    let weights = class_weights(&model)?;
    Ok(roc_aggregated(dataset, &weights, grid_size)?.curve)
}

/// Pointwise percentile confidence band for the aggregated curve.
///
/// Replicates whose resample leaves every class empty on one side are
/// discarded and redrawn, up to `10 * replicates` attempts.
pub fn bootstrap_band(
    dataset: &EvaluationDataset,
    config: &BootstrapConfig,
) -> Result<BootstrapOutcome> {
    if config.replicates < 10 {
        return Err(Error::Config(format!(
            "need at least 10 bootstrap replicates, got {}",
            config.replicates
        )));
    }
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::Config(format!(
            "confidence level must be in (0, 1), got {}",
            config.level
        )));
    }
    if config.grid_size < 2 {
        return Err(Error::Config(format!(
            "grid size must be at least 2, got {}",
            config.grid_size
        )));
    }

    let n = dataset.len();
    let grid: Vec<f64> = (0..config.grid_size)
        .map(|j| j as f64 / (config.grid_size - 1) as f64)
        .collect();

    let max_attempts = config.replicates * 10;
    let mut tpr_rows: Vec<Vec<f64>> = Vec::with_capacity(config.replicates);
    let mut replicate_aucs = Vec::with_capacity(config.replicates);
    let mut discarded = 0usize;

    let mut attempt = 0u64;
    while replicate_aucs.len() < config.replicates {
        if attempt as usize >= max_attempts {
            return Err(Error::Bootstrap(format!(
                "only {} of {} replicates usable after {} attempts",
                replicate_aucs.len(),
                config.replicates,
                max_attempts
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(attempt);
        attempt += 1;

        let indices: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let replicate = dataset.resample(&indices)?;
        match replicate_curve(&replicate, config.ridge, config.grid_size) {
            Ok(curve) => {
                tpr_rows.push(grid.iter().map(|&f| tpr_at(&curve, f)).collect());
                replicate_aucs.push(curve.auc);
            }
            Err(Error::NoSignal(_)) => discarded += 1,
            Err(other) => return Err(other),
        }
    }

    let alpha = 1.0 - config.level;
    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    let mut column = vec![0.0; config.replicates];
    for j in 0..grid.len() {
        for (b, row) in tpr_rows.iter().enumerate() {
            column[b] = row[j];
        }
        column.sort_by(|a, b| a.total_cmp(b));
        lower.push(percentile(&column, alpha / 2.0).clamp(0.0, 1.0));
        upper.push(percentile(&column, 1.0 - alpha / 2.0).clamp(0.0, 1.0));
    }

    // Identical replicate AUCs have zero spread by definition; computing
    // the variance through a rounded mean would report ~1e-16 instead.
    let all_equal = replicate_aucs.windows(2).all(|w| w[0] == w[1]);
    let variance = if all_equal {
        0.0
    } else {
        let mean = replicate_aucs.iter().sum::<f64>() / config.replicates as f64;
        replicate_aucs
            .iter()
            .map(|a| (a - mean) * (a - mean))
            .sum::<f64>()
            / (config.replicates - 1) as f64
    };

    Ok(BootstrapOutcome {
        band: ConfidenceBand {
            fpr_grid: grid,
            lower,
            upper,
            level: config.level,
            replicates: config.replicates,
        },
        replicate_aucs,
        auc_std_error: variance.sqrt(),
        discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ClassLabel;
    use crate::linalg::Matrix;
    use crate::roc::{CurveKind, RocPoint};

    fn dataset(labels: Vec<usize>, rows: Vec<Vec<f64>>, k: usize) -> EvaluationDataset {
        let classes = (0..k)
            .map(|i| ClassLabel {
                name: format!("c{i}"),
                index: i,
            })
            .collect();
        EvaluationDataset::new(classes, labels, Matrix::from_rows(rows).unwrap()).unwrap()
    }

    fn perfect_dataset(n_per_class: usize, k: usize) -> EvaluationDataset {
        let mut labels = Vec::new();
        let mut rows = Vec::new();
        for c in 0..k {
            for _ in 0..n_per_class {
                labels.push(c);
                let row: Vec<f64> = (0..k)
                    .map(|j| if j == c { 0.9 } else { 0.05 })
                    .collect();
                rows.push(row);
            }
        }
        dataset(labels, rows, k)
    }

    #[test]
    fn interpolation_reads_upper_envelope() {
        let curve = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 0.0, tpr: 1.0, threshold: 0.9 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.1 },
            ],
            auc: 1.0,
            kind: CurveKind::Aggregated,
        };
        assert_eq!(tpr_at(&curve, 0.0), 1.0);
        assert_eq!(tpr_at(&curve, 0.5), 1.0);
        assert_eq!(tpr_at(&curve, 1.0), 1.0);

        let ramp = RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.1 },
            ],
            auc: 0.5,
            kind: CurveKind::Aggregated,
        };
        assert!((tpr_at(&ramp, 0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let ds = perfect_dataset(10, 3);
        let bad = BootstrapConfig { replicates: 9, ..BootstrapConfig::default() };
        assert!(matches!(bootstrap_band(&ds, &bad), Err(Error::Config(_))));
        let bad = BootstrapConfig { level: 1.0, ..BootstrapConfig::default() };
        assert!(matches!(bootstrap_band(&ds, &bad), Err(Error::Config(_))));
        let bad = BootstrapConfig { level: 0.0, ..BootstrapConfig::default() };
        assert!(matches!(bootstrap_band(&ds, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn perfect_classifier_band_has_zero_width() {
        let ds = perfect_dataset(20, 3);
        let config = BootstrapConfig {
            replicates: 10,
            grid_size: 33,
            ..BootstrapConfig::default()
        };
        let outcome = bootstrap_band(&ds, &config).unwrap();
        for (lo, hi) in outcome.band.lower.iter().zip(&outcome.band.upper) {
            assert_eq!(lo, hi);
        }
        assert_eq!(outcome.auc_std_error, 0.0);
        assert!(outcome.replicate_aucs.iter().all(|&a| a == 1.0));
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let ds = perfect_dataset(15, 2);
        let config = BootstrapConfig {
            replicates: 12,
            grid_size: 17,
            seed: 7,
            ..BootstrapConfig::default()
        };
        let a = bootstrap_band(&ds, &config).unwrap();
        let b = bootstrap_band(&ds, &config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        use rand::{RngExt, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let n = 120;
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let ds = dataset(labels, rows, 3);
        let c1 = BootstrapConfig { replicates: 20, grid_size: 33, seed: 1, ..Default::default() };
        let c2 = BootstrapConfig { seed: 2, ..c1 };
        let a = bootstrap_band(&ds, &c1).unwrap();
        let b = bootstrap_band(&ds, &c2).unwrap();
        assert_ne!(a.band, b.band);
    }

    #[test]
    fn band_bounds_are_ordered_and_in_range() {
        use rand::{RngExt, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let n = 200;
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..3)).collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.random::<f64>()).collect())
            .collect();
        let ds = dataset(labels, rows, 3);
        let config = BootstrapConfig { replicates: 50, grid_size: 65, ..Default::default() };
        let outcome = bootstrap_band(&ds, &config).unwrap();
        for ((lo, hi), f) in outcome
            .band
            .lower
            .iter()
            .zip(&outcome.band.upper)
            .zip(&outcome.band.fpr_grid)
        {
            assert!(lo <= hi, "lower {lo} above upper {hi} at fpr {f}");
            assert!((0.0..=1.0).contains(lo));
            assert!((0.0..=1.0).contains(hi));
        }
    }
}
