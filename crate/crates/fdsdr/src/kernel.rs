//! Kernels on metric spaces, data-driven bandwidth selection, and
//! feature-space distances.
//!
//! For responses with pairwise distances `d(Y_k, Y_l)` the Gaussian and
//! Laplacian kernels are
//!
//! ```text
//! κ_G(Y, Y') = exp(−γ_G d(Y,Y')²),   κ_L(Y, Y') = exp(−γ_L d(Y,Y')),
//! ```
//!
//! with bandwidths `γ_G = ρ_Y/(2σ_G²)` and `γ_L = ρ_Y/(2σ_L)` where `σ_G²`
//! and `σ_L` are the mean squared / mean pairwise distance over the sample.
//! The linear kernel `κ(Y,Y') = ⟨Y,Y'⟩` applies to vector responses only and
//! recovers plain distance covariance.
//!
//! Feature-space distances are computed through the kernel identity
//! `b_kl = sqrt(κ_kk + κ_ll − 2κ_kl)`, which is `O(n²)`; the equivalent
//! route through the kernel square root `M = K^{1/2}` costs `O(n³)` and is
//! kept in the test suite as an oracle.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::linalg::SymMatrix;
use crate::metric::{ResponseKind, ResponseObject, ResponseSample};

/// Pre-sqrt values above this (in magnitude) on the negative side mean the
/// kernel matrix is not PSD; smaller violations are clamped as rounding.
pub const FEATURE_DISTANCE_NEG_TOL: f64 = 1e-8;

/// Kernel family applied to response distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[default]
    Gaussian,
    Laplacian,
    Linear,
}

impl std::fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Laplacian => "laplacian",
            KernelFamily::Linear => "linear",
        };
        f.write_str(s)
    }
}

/// A fully resolved kernel: family plus concrete bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Bandwidth γ; ignored by the linear kernel.
    pub gamma: f64,
    /// Scaling parameter ρ_Y that produced γ (echoed for provenance).
    pub rho_y: f64,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.family != KernelFamily::Linear && !positive(self.gamma) {
            return Err(Error::invalid(format!(
                "kernel bandwidth must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Kernel selection as it appears in run configs: a family, the bandwidth
/// scaling ρ_Y, and an optional explicit bandwidth override. The default
/// ("auto") is a Gaussian kernel with the data-driven bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub rho_y: f64,
    pub gamma_override: Option<f64>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            family: KernelFamily::Gaussian,
            rho_y: 10.0,
            gamma_override: None,
        }
    }
}

impl KernelConfig {
    /// Resolve to a concrete [`KernelSpec`] for the given pairwise response
    /// distances.
    pub fn resolve(&self, distances: &SymMatrix) -> Result<KernelSpec> {
        if !positive(self.rho_y) {
            return Err(Error::invalid(format!(
                "rho_y must be positive, got {}",
                self.rho_y
            )));
        }
        let gamma = match (self.family, self.gamma_override) {
            (KernelFamily::Linear, _) => 0.0,
            (_, Some(g)) if g > 0.0 => g,
            (_, Some(g)) => {
                return Err(Error::invalid(format!(
                    "gamma_override must be positive, got {g}"
                )))
            }
            (family, None) => select_bandwidth(distances, family, self.rho_y)?,
        };
        let spec = KernelSpec {
            family: self.family,
            gamma,
            rho_y: self.rho_y,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Data-driven bandwidth: `γ_G = ρ_Y/(2σ_G²)` with
/// `σ_G² = C(n,2)⁻¹ Σ_{i<j} d_ij²`, and `γ_L = ρ_Y/(2σ_L)` with
/// `σ_L = C(n,2)⁻¹ Σ_{i<j} d_ij`.
pub fn select_bandwidth(distances: &SymMatrix, family: KernelFamily, rho_y: f64) -> Result<f64> {
    let n = distances.dim();
    if n < 2 {
        return Err(Error::invalid("bandwidth selection needs at least 2 responses"));
    }
    if family == KernelFamily::Linear {
        return Err(Error::invalid("the linear kernel has no bandwidth"));
    }
    if !positive(rho_y) {
        return Err(Error::invalid(format!("rho_y must be positive, got {rho_y}")));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distances[(i, j)];
            sum += d;
            sum_sq += d * d;
        }
    }
    if sum == 0.0 {
        return Err(Error::DegenerateSample(
            "all pairwise response distances are zero".into(),
        ));
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let gamma = match family {
        KernelFamily::Gaussian => rho_y / (2.0 * sum_sq / pairs),
        KernelFamily::Laplacian => rho_y / (2.0 * sum / pairs),
        KernelFamily::Linear => unreachable!(),
    };
    Ok(gamma)
}

/// Kernel matrix `K_kl = κ(Y_k, Y_l)` from pairwise distances
/// (Gaussian/Laplacian families; use [`linear_kernel_matrix`] for the
/// linear kernel).
pub fn kernel_matrix(distances: &SymMatrix, spec: &KernelSpec) -> Result<SymMatrix> {
    spec.validate()?;
    if !distances.is_finite() {
        return Err(Error::invalid("distance matrix has non-finite entries"));
    }
    let n = distances.dim();
    let k = match spec.family {
        KernelFamily::Gaussian => {
            SymMatrix::from_fn(n, |i, j| (-spec.gamma * distances[(i, j)].powi(2)).exp())
        }
        KernelFamily::Laplacian => {
            SymMatrix::from_fn(n, |i, j| (-spec.gamma * distances[(i, j)]).exp())
        }
        KernelFamily::Linear => {
            return Err(Error::invalid(
                "linear kernel is computed from raw vectors, not distances",
            ))
        }
    };
    Ok(k)
}

/// Gram matrix `K_kl = ⟨Y_k, Y_l⟩` of vector responses.
pub fn linear_kernel_matrix(sample: &ResponseSample) -> Result<SymMatrix> {
    if sample.kind() != ResponseKind::Vector {
        return Err(Error::invalid(format!(
            "linear kernel applies to vector responses, got {}",
            sample.kind()
        )));
    }
    let n = sample.len();
    let vec_at = |i: usize| match sample.get(i) {
        ResponseObject::Vector(v) => v,
        _ => unreachable!(),
    };
    Ok(SymMatrix::from_fn(n, |i, j| vec_at(i).dot(vec_at(j))))
}

/// Pairwise distances between responses in the kernel feature space,
/// `b_kl = sqrt(max(0, K_kk + K_ll − 2K_kl))`.
#[derive(Debug, Clone)]
pub struct FeatureDistanceMatrix {
    entries: DMatrix<f64>,
}

impl FeatureDistanceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

impl std::ops::Index<(usize, usize)> for FeatureDistanceMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.entries[idx]
    }
}

/// Compute feature-space distances from a kernel matrix.
///
/// Pre-sqrt values in `(−1e-8, 0)` are clamped to zero as floating-point
/// noise; anything more negative is a non-PSD kernel and is rejected.
pub fn feature_distances(k: &SymMatrix) -> Result<FeatureDistanceMatrix> {
    let n = k.dim();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let sq = k[(i, i)] + k[(j, j)] - 2.0 * k[(i, j)];
            if sq < -FEATURE_DISTANCE_NEG_TOL {
                return Err(Error::NonPsdKernel(sq));
            }
            let d = sq.max(0.0).sqrt();
            b[(i, j)] = d;
            b[(j, i)] = d;
        }
    }
    Ok(FeatureDistanceMatrix { entries: b })
}
