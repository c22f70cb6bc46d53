//! Empirical distance covariance: double centering, the α-dCov statistic,
//! and the projected objective `F(C)`.
//!
//! For pairwise predictor distances `a_kl = ‖X_k − X_l‖^α` and response-side
//! distances `b_kl`, the empirical statistic is `(1/n²) Σ_{k,l} A_kl B_kl`
//! with `A`, `B` the doubly centered versions of `a`, `b`. Because `B` is
//! doubly centered, `(1/n²) Σ a_kl B_kl` gives the same value, which is what
//! the optimizer evaluates: only `a_kl(C) = ‖Cᵀ(Z_k − Z_l)‖` changes across
//! iterations while the centered response matrix is computed once per fit.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::StiefelPoint;

/// A doubly centered square matrix: all row and column sums are (near) zero.
#[derive(Debug, Clone)]
pub struct CenteredMatrix {
    entries: DMatrix<f64>,
}

impl CenteredMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

impl std::ops::Index<(usize, usize)> for CenteredMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.entries[idx]
    }
}

/// Empirical distance covariance value; nonnegative up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcovValue(f64);

impl DcovValue {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Subtract row means and column means and add back the grand mean:
/// `A_kl = a_kl − ā_k· − ā_·l + ā_··`.
pub fn double_center(d: &DMatrix<f64>) -> Result<CenteredMatrix> {
    let n = d.nrows();
    if n != d.ncols() {
        return Err(Error::invalid(format!(
            "double centering needs a square matrix, got {}x{}",
            d.nrows(),
            d.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::invalid("double centering needs n >= 2"));
    }
    let row_means: Vec<f64> = (0..n).map(|k| d.row(k).mean()).collect();
    let col_means: Vec<f64> = (0..n).map(|l| d.column(l).mean()).collect();
    let grand = d.mean();
    let centered = DMatrix::from_fn(n, n, |k, l| d[(k, l)] - row_means[k] - col_means[l] + grand);
    Ok(CenteredMatrix { entries: centered })
}

/// Empirical α-dCov of predictor rows `x` against response-side pairwise
/// distances `b`: `(1/n²) Σ A_kl B_kl` with `a_kl = ‖X_k − X_l‖₂^α`.
///
/// The exponent applies on the predictor side; `b` is taken as-is (raw
/// metric distances or kernel feature distances).
pub fn empirical_dcov(x: &DMatrix<f64>, b: &DMatrix<f64>, alpha: f64) -> Result<DcovValue> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid("dcov needs at least 2 samples"));
    }
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::invalid(format!(
            "distance matrix is {}x{}, expected {n}x{n}",
            b.nrows(),
            b.ncols()
        )));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    let mut a = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in (k + 1)..n {
            let d = (x.row(k) - x.row(l)).norm().powf(alpha);
            a[(k, l)] = d;
            a[(l, k)] = d;
        }
    }
    let a_c = double_center(&a)?;
    let b_c = double_center(b)?;
    let sum: f64 = a_c
        .as_matrix()
        .iter()
        .zip(b_c.as_matrix().iter())
        .map(|(u, v)| u * v)
        .sum();
    Ok(DcovValue(sum / (n * n) as f64))
}

/// The optimizer objective `F(C) = (1/n²) Σ ‖Cᵀ(Z_k − Z_l)‖ B̃_kl` for a
/// Stiefel point `C`, whitened predictors `z`, and centered response
/// distances `b_tilde`.
pub fn objective(c: &StiefelPoint, z: &DMatrix<f64>, b_tilde: &CenteredMatrix) -> Result<f64> {
    if c.rows() != z.ncols() {
        return Err(Error::invalid(format!(
            "C has {} rows but Z has {} columns",
            c.rows(),
            z.ncols()
        )));
    }
    if b_tilde.dim() != z.nrows() {
        return Err(Error::invalid(format!(
            "centered matrix is {}x{} but Z has {} rows",
            b_tilde.dim(),
            b_tilde.dim(),
            z.nrows()
        )));
    }
    let v = z * c.as_matrix();
    Ok(objective_projected(&v, b_tilde))
}

/// Objective evaluated on already-projected predictors `v = Z·C`.
pub(crate) fn objective_projected(v: &DMatrix<f64>, b_tilde: &CenteredMatrix) -> f64 {
    let n = v.nrows();
    let d = v.ncols();
    let vs = v.as_slice(); // column-major: (k, c) at c*n + k
    let bs = b_tilde.as_matrix().as_slice();
    let mut acc = 0.0;
    for k in 0..n {
        for l in (k + 1)..n {
            let mut sq = 0.0;
            for c in 0..d {
                let diff = vs[c * n + k] - vs[c * n + l];
                sq += diff * diff;
            }
            acc += sq.sqrt() * bs[l * n + k];
        }
    }
    2.0 * acc / (n * n) as f64
}
