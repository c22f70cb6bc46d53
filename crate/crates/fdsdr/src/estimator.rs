//! End-to-end central-subspace estimation and the subspace error metric.
//!
//! [`fit`] runs the full pipeline: pairwise response distances, kernel and
//! feature-space distances, double centering, predictor whitening,
//! Stiefel-manifold ascent, and de-whitening of the optimum to the
//! coefficient matrix `β̂ = Σ̂_X^{−1/2} Ĉ`, which satisfies
//! `β̂ᵀ Σ̂_X β̂ = I_d`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dcov::double_center;
use crate::error::{Error, Result};
use crate::kernel::{
    feature_distances, kernel_matrix, linear_kernel_matrix, KernelConfig, KernelFamily, KernelSpec,
};
use crate::linalg::{default_eigen_floor, psd_inv_sqrt, sample_covariance, StiefelPoint, SymMatrix};
use crate::metric::ResponseSample;
use crate::optim::{fit_direction, FitTrace, OptimizerConfig};

/// Predictor rows paired with metric-space responses.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    responses: ResponseSample,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, responses: ResponseSample) -> Result<Self> {
        if x.nrows() != responses.len() {
            return Err(Error::invalid(format!(
                "predictor matrix has {} rows but there are {} responses",
                x.nrows(),
                responses.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("predictor matrix has non-finite entries"));
        }
        Ok(Dataset { x, responses })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn responses(&self) -> &ResponseSample {
        &self.responses
    }
}

/// Result of a fit: the de-whitened coefficient matrix plus diagnostics.
#[derive(Debug, Clone)]
pub struct SubspaceEstimate {
    /// `p×d` coefficient matrix with `β̂ᵀ Σ̂_X β̂ = I_d`.
    pub beta_hat: DMatrix<f64>,
    /// The optimum on the Stiefel manifold (whitened coordinates).
    pub c_hat: StiefelPoint,
    /// `Σ̂_X^{−1/2}` used for whitening and de-whitening.
    pub sigma_inv_sqrt: SymMatrix,
    pub trace: FitTrace,
    /// The kernel actually applied (bandwidth resolved).
    pub kernel_used: KernelSpec,
}

/// Sidecar summary of a fit, serialized next to the coefficient CSV.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub seed: u64,
    pub d: usize,
    pub kernel: KernelSpec,
    pub optimizer: OptimizerConfig,
    pub objective_final: f64,
    pub iters_used: usize,
    pub converged: bool,
    pub restart_index_of_best: usize,
    pub objective_per_iter: Vec<f64>,
    pub fit_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_error_vs_truth: Option<f64>,
}

/// Center the rows of `x` and transform so the sample covariance of the
/// result is (numerically) the identity. Returns the whitened matrix and
/// `Σ̂_X^{−1/2}`. `eigen_floor` defaults to `1e-10 · trace(Σ̂_X)/p`.
pub fn whiten(x: &DMatrix<f64>, eigen_floor: Option<f64>) -> Result<(DMatrix<f64>, SymMatrix)> {
    let sigma = sample_covariance(x)?;
    let floor = eigen_floor.unwrap_or_else(|| default_eigen_floor(&sigma));
    let s_inv = psd_inv_sqrt(&sigma, floor)?;
    let mean = x.row_mean();
    let mut centered = x.clone();
    for i in 0..x.nrows() {
        let row = x.row(i) - &mean;
        centered.set_row(i, &row);
    }
    let z = &centered * s_inv.as_matrix();
    Ok((z, s_inv))
}

/// Estimate a `d`-dimensional central-subspace basis.
///
/// `kernel` defaults ([`KernelConfig::default`]) to a Gaussian kernel with
/// the data-driven bandwidth. The optimizer runs `opt.restarts` seeded
/// restarts; the result is deterministic given `(dataset, kernel, opt,
/// seed)`.
pub fn fit(
    dataset: &Dataset,
    kernel: &KernelConfig,
    d: usize,
    opt: &OptimizerConfig,
    seed: u64,
) -> Result<SubspaceEstimate> {
    let p = dataset.p();
    if d == 0 || d > p {
        return Err(Error::invalid(format!(
            "target dimension d={d} must satisfy 1 <= d <= p={p}"
        )));
    }
    let (k, spec) = match kernel.family {
        KernelFamily::Linear => {
            let spec = KernelSpec {
                family: KernelFamily::Linear,
                gamma: 0.0,
                rho_y: kernel.rho_y,
            };
            (linear_kernel_matrix(dataset.responses())?, spec)
        }
        _ => {
            let distances = dataset.responses().pairwise_distances()?;
            let spec = kernel.resolve(&distances)?;
            (kernel_matrix(&distances, &spec)?, spec)
        }
    };
    let b = feature_distances(&k)?;
    let b_tilde = double_center(b.as_matrix())?;
    let (z, sigma_inv_sqrt) = whiten(dataset.x(), None)?;
    let (c_hat, trace) = fit_direction(&z, &b_tilde, d, opt, seed)?;
    let beta_hat = sigma_inv_sqrt.as_matrix() * c_hat.as_matrix();
    Ok(SubspaceEstimate {
        beta_hat,
        c_hat,
        sigma_inv_sqrt,
        trace,
        kernel_used: spec,
    })
}

/// Frobenius distance between the orthogonal projectors onto the column
/// spaces of `b` and `b_hat`: `‖P_B − P_B̂‖_F`.
///
/// Projectors are formed from thin QR factors of each basis, so the value
/// is invariant to any invertible right-multiplication of either argument.
pub fn subspace_error(b: &DMatrix<f64>, b_hat: &DMatrix<f64>) -> Result<f64> {
    let projector = |m: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        if m.nrows() < m.ncols() || m.ncols() == 0 {
            return Err(Error::invalid(format!(
                "basis must be tall, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin <= 1e-10 * smax.max(1.0) {
            return Err(Error::invalid("basis is rank-deficient"));
        }
        let q = m.clone().qr().q();
        Ok(&q * q.transpose())
    };
    if b.nrows() != b_hat.nrows() {
        return Err(Error::invalid(format!(
            "bases live in different spaces: {} vs {} rows",
            b.nrows(),
            b_hat.nrows()
        )));
    }
    Ok((projector(b)? - projector(b_hat)?).norm())
}
