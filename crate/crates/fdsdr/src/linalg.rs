//! Dense symmetric/PSD matrix primitives: sample covariance, PSD matrix
//! powers via eigendecomposition, and the SVD projection onto the Stiefel
//! manifold.
//!
//! All operations are pure functions on immutable inputs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Maximum allowed deviation of `CᵀC` from the identity for a Stiefel point.
pub const STIEFEL_TOL: f64 = 1e-10;

/// Smallest singular value accepted by [`stiefel_project`].
pub const PROJECTION_RANK_TOL: f64 = 1e-12;

/// A square matrix that is symmetric by construction.
///
/// The constructor symmetrizes its input as `(M + Mᵀ)/2`; eigendecomposition
/// of nearly-symmetric matrices is otherwise numerically fragile.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    entries: DMatrix<f64>,
}

impl SymMatrix {
    /// Build from a square matrix, symmetrizing it.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::invalid(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymMatrix { entries: sym })
    }

    /// Build from an entry function over the upper triangle; `f(i, j)` is
    /// mirrored to `(j, i)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix { entries: m }
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.entries[idx]
    }
}

/// A `p×d` matrix with orthonormal columns (a point on the Stiefel manifold).
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelPoint {
    entries: DMatrix<f64>,
}

impl StiefelPoint {
    /// Validate orthonormality (`‖CᵀC − I‖_max ≤ 1e-10`) and wrap.
    pub fn try_new(m: DMatrix<f64>) -> Result<Self> {
        let (p, d) = (m.nrows(), m.ncols());
        if d == 0 || d > p {
            return Err(Error::invalid(format!(
                "Stiefel point needs 1 <= d <= p, got p={p}, d={d}"
            )));
        }
        let gram = m.transpose() * &m;
        let dev = (gram - DMatrix::identity(d, d)).abs().max();
        if dev > STIEFEL_TOL {
            return Err(Error::invalid(format!(
                "columns are not orthonormal (max deviation {dev:.3e})"
            )));
        }
        Ok(StiefelPoint { entries: m })
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }
}

/// Unbiased sample covariance `(1/(n−1)) Σᵢ (Xᵢ−X̄)(Xᵢ−X̄)ᵀ` of the rows of `x`.
pub fn sample_covariance(x: &DMatrix<f64>) -> Result<SymMatrix> {
    let (n, p) = (x.nrows(), x.ncols());
    if n < 2 {
        return Err(Error::invalid(format!(
            "sample covariance needs at least 2 rows, got {n}"
        )));
    }
    let mean = x.row_mean();
    let mut cov = DMatrix::zeros(p, p);
    for i in 0..n {
        let c = x.row(i) - &mean;
        // rank-one update over the upper triangle
        for a in 0..p {
            for b in a..p {
                cov[(a, b)] += c[a] * c[b];
            }
        }
    }
    let denom = (n - 1) as f64;
    for a in 0..p {
        for b in a..p {
            cov[(a, b)] /= denom;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    Ok(SymMatrix { entries: cov })
}

/// Default eigenvalue floor used when whitening: `1e-10 · trace(Σ)/p`.
pub fn default_eigen_floor(sigma: &SymMatrix) -> f64 {
    1e-10 * sigma.as_matrix().trace() / sigma.dim() as f64
}

fn eigen_map(m: &SymMatrix, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let eig = m.entries.clone().symmetric_eigen();
    let mapped = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| f(l)));
    let product = &eig.eigenvectors * DMatrix::from_diagonal(&mapped) * eig.eigenvectors.transpose();
    // QΛQᵀ is symmetric only up to rounding; restore exact symmetry
    (&product + product.transpose()) * 0.5
}

/// PSD square root: eigenvalues below `eigen_floor` are clamped to zero
/// before taking the square root.
pub fn psd_sqrt(m: &SymMatrix, eigen_floor: f64) -> Result<SymMatrix> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(SymMatrix {
        entries: eigen_map(m, |l| if l < eigen_floor { 0.0 } else { l.sqrt() }),
    })
}

/// PSD inverse square root: eigenvalues below `eigen_floor` are clamped to
/// the floor before inversion. Errors if no eigenvalue exceeds the floor.
pub fn psd_inv_sqrt(m: &SymMatrix, eigen_floor: f64) -> Result<SymMatrix> {
    if !m.is_finite() {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let eig = m.entries.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l <= eigen_floor) {
        return Err(Error::Singular(format!(
            "all eigenvalues at or below the floor {eigen_floor:.3e}"
        )));
    }
    let mapped = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| l.max(eigen_floor).powf(-0.5)),
    );
    let product = &eig.eigenvectors * DMatrix::from_diagonal(&mapped) * eig.eigenvectors.transpose();
    Ok(SymMatrix {
        entries: (&product + product.transpose()) * 0.5,
    })
}

/// Matrix exponential of a symmetric matrix via eigendecomposition.
pub fn sym_exp(m: &SymMatrix) -> SymMatrix {
    SymMatrix {
        entries: eigen_map(m, f64::exp),
    }
}

/// Matrix logarithm of a symmetric positive definite matrix.
pub fn sym_log(m: &SymMatrix) -> Result<SymMatrix> {
    let eig = m.entries.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return Err(Error::Singular(
            "matrix logarithm requires positive eigenvalues".into(),
        ));
    }
    let mapped = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|l| l.ln()));
    let product = &eig.eigenvectors * DMatrix::from_diagonal(&mapped) * eig.eigenvectors.transpose();
    Ok(SymMatrix {
        entries: (&product + product.transpose()) * 0.5,
    })
}

/// Project a full-column-rank `p×d` matrix onto the Stiefel manifold.
///
/// With the thin SVD `G = UΣVᵀ`, the nearest point with orthonormal columns
/// is `UVᵀ`. Rank-deficient inputs are rejected so the caller can
/// re-randomize.
pub fn stiefel_project(g: &DMatrix<f64>) -> Result<StiefelPoint> {
    let svd = g.clone().svd(true, true);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !smin.is_finite() || smin <= PROJECTION_RANK_TOL {
        return Err(Error::DegenerateProjection);
    }
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    StiefelPoint::try_new(u * vt)
}
