//! Moment estimation and the correlation-based whitening transform.
//!
//! The whitening matrix is `W = P^{-1/2} V^{-1/2}` where `P` is the sample
//! correlation matrix and `V` the diagonal of sample variances. Applied to
//! the score matrix it yields columns with unit variance and (up to
//! regularization) zero cross-correlation, while preserving the orientation
//! of the data. Inverse square roots come from a symmetric
//! eigendecomposition with an eigenvalue floor, so rank-deficient inputs
//! (e.g. softmax scores whose rows sum to one) stay finite and
//! deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Relative eigenvalue floor: eigenvalues below `RATIO * lambda_max` are
/// clamped before taking the inverse square root.
pub const EIGEN_FLOOR_RATIO: f64 = 1e-10;

/// Columns whose variance falls below `RATIO * max_variance` are treated
/// as constant: they get zero correlation with everything else.
const DEGENERATE_VARIANCE_RATIO: f64 = 1e-12;

/// Default ridge added to the correlation matrix before inversion.
pub const DEFAULT_RIDGE: f64 = 1e-8;

/// Sample moments of a score matrix: column means, covariance (unbiased
/// `1/(n-1)` estimator), per-column variances, and the derived correlation
/// matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub mean: Vec<f64>,
    pub covariance: Matrix,
    pub variances: Vec<f64>,
    pub correlation: Matrix,
    /// Columns flagged as effectively constant.
    pub degenerate_columns: Vec<usize>,
}

/// A fitted whitening transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhiteningModel {
    pub moments: MomentEstimates,
    /// The whitening matrix `W`.
    pub matrix: Matrix,
    /// Ridge actually applied to the correlation matrix.
    pub ridge: f64,
    /// Absolute eigenvalue floor applied inside `V^{-1/2}`.
    pub variance_floor: f64,
    /// Absolute eigenvalue floor applied inside `P^{-1/2}`.
    pub correlation_floor: f64,
    pub method: String,
}

impl MomentEstimates {
    /// Derives variances and correlation from a given mean and covariance,
    /// applying the same degenerate-column conventions as
    /// [`estimate_moments`].
    pub fn from_mean_covariance(mean: Vec<f64>, covariance: Matrix) -> Result<Self> {
        let k = mean.len();
        if covariance.rows() != k || covariance.cols() != k {
            return Err(Error::Shape(format!(
                "covariance is {}x{}, expected {}x{}",
                covariance.rows(),
                covariance.cols(),
                k,
                k
            )));
        }
        if !covariance.is_finite() || mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(
                "moments contain non-finite values".into(),
            ));
        }
        let scale = covariance.max_abs().max(1.0);
        if covariance.asymmetry() > 1e-10 * scale {
            return Err(Error::Shape("covariance matrix is not symmetric".into()));
        }
        let (variances, correlation, degenerate_columns) = derive_correlation(&covariance);
        Ok(MomentEstimates {
            mean,
            covariance,
            variances,
            correlation,
            degenerate_columns,
        })
    }

    /// The variance diagonal as a matrix.
    pub fn variance_matrix(&self) -> Matrix {
        Matrix::diagonal(&self.variances)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

fn derive_correlation(covariance: &Matrix) -> (Vec<f64>, Matrix, Vec<usize>) {
    let k = covariance.rows();
    let variances: Vec<f64> = (0..k).map(|i| covariance.get(i, i).max(0.0)).collect();
    let max_var = variances.iter().fold(0.0_f64, |m, &v| m.max(v));
    let degenerate: Vec<usize> = (0..k)
        .filter(|&i| variances[i] <= DEGENERATE_VARIANCE_RATIO * max_var || max_var == 0.0)
        .collect();
    let mut correlation = Matrix::identity(k);
    for i in 0..k {
        if degenerate.contains(&i) {
            continue;
        }
        for j in (i + 1)..k {
            if degenerate.contains(&j) {
                continue;
            }
            let r = covariance.get(i, j) / (variances[i] * variances[j]).sqrt();
            correlation.set(i, j, r);
            correlation.set(j, i, r);
        }
    }
    (variances, correlation, degenerate)
}

/// Column means, unbiased covariance, and correlation of an n-by-k matrix.
pub fn estimate_moments(scores: &Matrix) -> Result<MomentEstimates> {
    let n = scores.rows();
    let k = scores.cols();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if !scores.is_finite() {
        return Err(Error::Validation(
            "score matrix contains non-finite values".into(),
        ));
    }
    let mut mean = vec![0.0; k];
    for i in 0..n {
        for (j, m) in mean.iter_mut().enumerate() {
            *m += scores.get(i, j);
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let mut covariance = Matrix::zeros(k, k);
    for i in 0..n {
        let row = scores.row(i);
        for a in 0..k {
            let da = row[a] - mean[a];
            for b in a..k {
                let v = covariance.get(a, b) + da * (row[b] - mean[b]);
                covariance.set(a, b, v);
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..k {
        for b in a..k {
            let v = covariance.get(a, b) / denom;
            covariance.set(a, b, v);
            covariance.set(b, a, v);
        }
    }

    MomentEstimates::from_mean_covariance(mean, covariance)
}

/// Inverse square root of a symmetric PSD matrix via eigendecomposition,
/// `U diag(max(lambda, floor))^{-1/2} U^T`. The effective floor is at least
/// `EIGEN_FLOOR_RATIO * lambda_max`, which keeps rank-deficient inputs
/// finite. Returns the matrix together with the floor actually applied.
fn inverse_sqrt_with_floor(matrix: &Matrix, floor: f64) -> Result<(Matrix, f64)> {
    if matrix.rows() != matrix.cols() {
        return Err(Error::Shape(format!(
            "inverse square root needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    let scale = matrix.max_abs().max(1.0);
    if matrix.asymmetry() > 1e-8 * scale {
        return Err(Error::Shape(
            "inverse square root needs a symmetric matrix".into(),
        ));
    }
    let (values, vectors) = symmetric_eigen(matrix)?;
    let lambda_max = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    if lambda_max.is_nan() || lambda_max <= 0.0 {
        return Err(Error::Numerical(
            "matrix has no positive eigenvalues".into(),
        ));
    }
    let applied_floor = floor.max(EIGEN_FLOOR_RATIO * lambda_max);
    let inv_roots: Vec<f64> = values
        .iter()
        .map(|&v| 1.0 / v.max(applied_floor).sqrt())
        .collect();
    let mut out = Matrix::zeros(matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        for j in i..matrix.cols() {
            let mut sum = 0.0;
            for (l, r) in inv_roots.iter().enumerate() {
                sum += vectors.get(i, l) * r * vectors.get(j, l);
            }
            out.set(i, j, sum);
            out.set(j, i, sum);
        }
    }
    Ok((out, applied_floor))
}

/// Inverse square root of a symmetric PSD matrix; see
/// [`inverse_sqrt_with_floor`] for the floor semantics.
pub fn inverse_sqrt_symmetric(matrix: &Matrix, floor: f64) -> Result<Matrix> {
    inverse_sqrt_with_floor(matrix, floor).map(|(m, _)| m)
}

/// Ridge-regularized correlation matrix, renormalized to unit diagonal:
/// `(P + ridge I) / (1 + ridge)`.
fn regularize_correlation(correlation: &Matrix, ridge: f64) -> Matrix {
    if ridge == 0.0 {
        return correlation.clone();
    }
    let k = correlation.rows();
    Matrix::from_fn(k, k, |i, j| {
        let base = correlation.get(i, j) + if i == j { ridge } else { 0.0 };
        base / (1.0 + ridge)
    })
}

/// Fits the correlation-based whitening transform `W = P^{-1/2} V^{-1/2}`.
pub fn fit_zca_cor(moments: MomentEstimates, ridge: f64) -> Result<WhiteningModel> {
    if ridge.is_nan() || ridge < 0.0 {
        return Err(Error::Config(format!("ridge must be >= 0, got {ridge}")));
    }
    let k = moments.dim();
    if moments.degenerate_columns.len() == k {
        return Err(Error::DegenerateInput(
            "all score columns have zero variance".into(),
        ));
    }
    let regularized = regularize_correlation(&moments.correlation, ridge);
    let (p_inv_sqrt, correlation_floor) = inverse_sqrt_with_floor(&regularized, 0.0)?;
    let (v_inv_sqrt, variance_floor) =
        inverse_sqrt_with_floor(&moments.variance_matrix(), 0.0)?;
    let matrix = p_inv_sqrt.matmul(&v_inv_sqrt)?;
    if !matrix.is_finite() {
        return Err(Error::Numerical("whitening matrix is not finite".into()));
    }
    Ok(WhiteningModel {
        moments,
        matrix,
        ridge,
        variance_floor,
        correlation_floor,
        method: "zca-cor".to_string(),
    })
}

impl WhiteningModel {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Applies `W` to every row of `scores`.
    pub fn whiten(&self, scores: &Matrix) -> Result<Matrix> {
        if scores.cols() != self.dim() {
            return Err(Error::Shape(format!(
                "scores have {} columns, model expects {}",
                scores.cols(),
                self.dim()
            )));
        }
        scores.matmul(&self.matrix.transpose())
    }

    /// The whitened mean vector `W m`.
    pub fn whitened_mean(&self) -> Vec<f64> {
        self.matrix
            .matvec(&self.moments.mean)
            .expect("model mean has matching dimension")
    }

    /// The covariance the model actually inverts: variances floored, ridge
    /// applied to the correlation.
    pub fn regularized_covariance(&self) -> Matrix {
        let k = self.dim();
        let regularized = regularize_correlation(&self.moments.correlation, self.ridge);
        let sd: Vec<f64> = self
            .moments
            .variances
            .iter()
            .map(|&v| v.max(self.variance_floor).sqrt())
            .collect();
        Matrix::from_fn(k, k, |i, j| regularized.get(i, j) * sd[i] * sd[j])
    }

    /// Largest absolute deviation of `W Sigma_r W^T` from the identity,
    /// where `Sigma_r` is the regularized covariance. Zero for
    /// well-conditioned inputs; grows when the eigenvalue floor engages.
    pub fn condition_residual(&self) -> f64 {
        let sigma = self.regularized_covariance();
        let wswt = self
            .matrix
            .matmul(&sigma)
            .and_then(|m| m.matmul(&self.matrix.transpose()))
            .expect("dimensions agree by construction");
        wswt.max_abs_diff(&Matrix::identity(self.dim()))
    }
}
