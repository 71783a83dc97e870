//! Univariate and multidimensional Gini indices.
//!
//! The univariate index is the relative mean absolute difference,
//! `sum_ij |x_i - x_j| / (2 n^2 |mean|)`, computed with a sorted
//! prefix-sum formula in O(n log n). The multidimensional index whitens
//! the score matrix, takes the univariate Gini of each whitened column,
//! and combines them convexly with weights proportional to the absolute
//! whitened means. Those weights double as the class weights for the
//! aggregated ROC curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::whitening::WhiteningModel;

/// Relative tolerance below which a column mean makes the Gini undefined.
const MEAN_TOLERANCE: f64 = 1e-15;

/// Per-class Gini indices of the whitened columns, the convex class
/// weights, and their weighted aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiniDecomposition {
    pub per_class_gini: Vec<f64>,
    /// Whitened mean vector `W m`.
    pub whitened_means: Vec<f64>,
    /// Normalized absolute whitened means; nonnegative, summing to 1.
    pub weights: Vec<f64>,
    /// Weighted combination of the per-class Ginis.
    pub aggregate: f64,
}

/// Sample Gini index of a vector: the mean absolute difference over all
/// ordered pairs, divided by twice the absolute mean.
///
/// Undefined (an error) when the mean is within rounding distance of zero,
/// which signals a degenerate whitened column.
pub fn gini_univariate(values: &[f64]) -> Result<f64> {
    gini_univariate_for_column(values, 0)
}

fn gini_univariate_for_column(values: &[f64], column: usize) -> Result<f64> {
    let n = values.len();
    if n == 0 {
        return Err(Error::UndefinedGini {
            column,
            message: "empty input".into(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "Gini input contains non-finite values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));

    let nf = n as f64;
    let mean = sorted.iter().sum::<f64>() / nf;
    let max_abs = sorted.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if mean.abs() <= MEAN_TOLERANCE * max_abs || max_abs == 0.0 {
        return Err(Error::UndefinedGini {
            column,
            message: format!("mean {mean} too close to zero"),
        });
    }

    // sum over ordered pairs of |x_i - x_j| = 2 * sum_j (2j - n + 1) x_(j)
    // for ascending order and 0-based j; ties contribute zero difference
    // without any special casing.
    let mut weighted = 0.0;
    for (j, &x) in sorted.iter().enumerate() {
        weighted += (2.0 * j as f64 - nf + 1.0) * x;
    }
    Ok(weighted / (nf * nf * mean.abs()))
}

/// Convex class weights from a fitted whitening model: the normalized
/// absolute whitened means, `|m*_i| / sum_j |m*_j|`.
pub fn class_weights(model: &WhiteningModel) -> Result<Vec<f64>> {
    let whitened_means = model.whitened_mean();
    let total: f64 = whitened_means.iter().map(|m| m.abs()).sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::UndefinedWeights);
    }
    Ok(whitened_means.iter().map(|m| m.abs() / total).collect())
}

/// Whitens `scores` with the fitted model and decomposes the
/// multidimensional Gini index into per-class indices and convex weights.
pub fn multidimensional_gini(
    model: &WhiteningModel,
    scores: &Matrix,
) -> Result<GiniDecomposition> {
    let whitened = model.whiten(scores)?;
    let whitened_means = model.whitened_mean();
    let weights = class_weights(model)?;

    let k = whitened.cols();
    let mut per_class_gini = Vec::with_capacity(k);
    for j in 0..k {
        let column = whitened.column(j);
        per_class_gini.push(gini_univariate_for_column(&column, j)?);
    }

    let aggregate = weights
        .iter()
        .zip(&per_class_gini)
        .map(|(w, g)| w * g)
        .sum();

    Ok(GiniDecomposition {
        per_class_gini,
        whitened_means,
        weights,
        aggregate,
    })
}

/// `G = 2 AUC - 1`.
pub fn gini_from_auc(auc: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&auc) {
        return Err(Error::Domain(format!("AUC {auc} outside [0, 1]")));
    }
    Ok(2.0 * auc - 1.0)
}

/// `AUC = (G + 1) / 2`.
pub fn auc_from_gini(g: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&g) {
        return Err(Error::Domain(format!("Gini {g} outside [-1, 1]")));
    }
    Ok((g + 1.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::whitening::{estimate_moments, fit_zca_cor, MomentEstimates};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n^2) mean-absolute-difference oracle.
    fn gini_brute_force(values: &[f64]) -> f64 {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut total = 0.0;
        for &a in values {
            for &b in values {
                total += (a - b).abs();
            }
        }
        total / (2.0 * n * n * mean.abs())
    }

    #[test]
    fn constant_vector_has_zero_gini() {
        assert_eq!(gini_univariate(&[3.5; 7]).unwrap(), 0.0);
        assert_eq!(gini_univariate(&[-2.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn two_point_gini() {
        // [0, 1]: sum of |diffs| over ordered pairs is 2; 2 / (2*4*0.5) = 0.5.
        assert!((gini_univariate(&[0.0, 1.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn four_point_gini_matches_brute_force() {
        // [1,2,3,4]: brute force over all 16 ordered pairs gives 20;
        // 20 / (2*16*2.5) = 0.25.
        let v = [1.0, 2.0, 3.0, 4.0];
        let g = gini_univariate(&v).unwrap();
        assert!((g - 0.25).abs() < 1e-15);
        assert!((g - gini_brute_force(&v)).abs() < 1e-15);
    }

    #[test]
    fn near_zero_mean_is_undefined() {
        let err = gini_univariate(&[-1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::UndefinedGini { .. }));
        let err = gini_univariate(&[0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::UndefinedGini { .. }));
    }

    #[test]
    fn permutation_invariant() {
        let a = [0.3, 1.2, 0.7, 2.2, 0.05];
        let b = [2.2, 0.05, 0.3, 0.7, 1.2];
        assert_eq!(gini_univariate(&a).unwrap(), gini_univariate(&b).unwrap());
    }

    #[test]
    fn matches_brute_force_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [3usize, 17, 101, 500] {
            let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.01).collect();
            let fast = gini_univariate(&v).unwrap();
            let slow = gini_brute_force(&v);
            assert!((fast - slow).abs() < 1e-12, "n={n}: {fast} vs {slow}");
        }
    }

    #[test]
    fn single_column_decomposition_collapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let scores = Matrix::from_fn(200, 1, |_, _| rng.random::<f64>() + 0.5);
        let model = fit_zca_cor(estimate_moments(&scores).unwrap(), 0.0).unwrap();
        let d = multidimensional_gini(&model, &scores).unwrap();
        assert_eq!(d.weights, vec![1.0]);
        let whitened = model.whiten(&scores).unwrap();
        let expected = gini_univariate(&whitened.column(0)).unwrap();
        assert!((d.aggregate - expected).abs() < 1e-15);
    }

    #[test]
    fn symmetric_columns_share_weight() {
        // Identical marginal structure and P = I: both weights are 1/2.
        let moments = MomentEstimates::from_mean_covariance(
            vec![0.4, 0.4],
            Matrix::diagonal(&[0.09, 0.09]),
        )
        .unwrap();
        let model = fit_zca_cor(moments, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let scores = Matrix::from_fn(400, 2, |_, _| 0.4 + 0.3 * (rng.random::<f64>() - 0.5));
        let d = multidimensional_gini(&model, &scores).unwrap();
        assert!((d.weights[0] - 0.5).abs() < 1e-9);
        assert!((d.weights[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn identity_correlation_weights_follow_mean_over_sd() {
        // With P = I the whitened mean is V^{-1/2} m, so the weights are
        // proportional to p / sqrt(p (1 - p)) for indicator-style columns.
        let p = [0.5, 0.3, 0.2];
        let variances: Vec<f64> = p.iter().map(|&q| q * (1.0 - q)).collect();
        let moments =
            MomentEstimates::from_mean_covariance(p.to_vec(), Matrix::diagonal(&variances))
                .unwrap();
        let model = fit_zca_cor(moments, 0.0).unwrap();
        let means = model.whitened_mean();
        let raw: Vec<f64> = p
            .iter()
            .map(|&q| q / (q * (1.0 - q)).sqrt())
            .collect();
        let total: f64 = raw.iter().sum();
        for j in 0..3 {
            assert!((means[j] - raw[j]).abs() < 1e-12);
            let w = means[j].abs() / means.iter().map(|m| m.abs()).sum::<f64>();
            assert!((w - raw[j] / total).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_form_probability_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let scores = Matrix::from_fn(300, 4, |_, j| rng.random::<f64>() * (j + 1) as f64 + 0.1);
        let model = fit_zca_cor(estimate_moments(&scores).unwrap(), 0.0).unwrap();
        let d = multidimensional_gini(&model, &scores).unwrap();
        assert!(d.weights.iter().all(|&w| w >= 0.0));
        assert!((d.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let dot: f64 = d
            .weights
            .iter()
            .zip(&d.per_class_gini)
            .map(|(w, g)| w * g)
            .sum();
        assert!((d.aggregate - dot).abs() < 1e-12);
    }

    #[test]
    fn aggregate_between_per_class_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let scores = Matrix::from_fn(250, 3, |_, j| rng.random::<f64>() * (1.0 + j as f64) + 0.2);
        let model = fit_zca_cor(estimate_moments(&scores).unwrap(), 0.0).unwrap();
        let d = multidimensional_gini(&model, &scores).unwrap();
        let min = d.per_class_gini.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = d
            .per_class_gini
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(d.aggregate >= min - 1e-12 && d.aggregate <= max + 1e-12);
    }

    #[test]
    fn affine_maps_are_exact() {
        assert_eq!(auc_from_gini(0.0).unwrap(), 0.5);
        assert_eq!(auc_from_gini(1.0).unwrap(), 1.0);
        assert_eq!(gini_from_auc(0.5).unwrap(), 0.0);
        let auc = 0.77;
        assert_eq!(auc_from_gini(gini_from_auc(auc).unwrap()).unwrap(), auc);
    }

    #[test]
    fn affine_maps_reject_out_of_range() {
        assert!(matches!(gini_from_auc(1.2), Err(Error::Domain(_))));
        assert!(matches!(gini_from_auc(-0.1), Err(Error::Domain(_))));
        assert!(matches!(auc_from_gini(1.5), Err(Error::Domain(_))));
        assert!(matches!(auc_from_gini(-1.5), Err(Error::Domain(_))));
    }
}
