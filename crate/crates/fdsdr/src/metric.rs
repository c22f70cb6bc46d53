//! Metric-space-valued responses and their pairwise distances.
//!
//! Four response spaces are supported:
//!
//! * `Vector` — points in `R^m` with the Euclidean metric;
//! * `Quantile` — one-dimensional distributions represented by their
//!   quantile function sampled on the midpoint grid `u_j = (j−½)/m` of
//!   `[0,1]`, compared with the Wasserstein-2 distance (which in one
//!   dimension is the `L₂` distance of quantile functions);
//! * `SymMatrixPoint` — symmetric matrices with the Frobenius metric;
//! * `Sphere` — unit vectors with the geodesic metric
//!   `arccos(clamp(⟨a,b⟩, −1, 1))`.

use nalgebra::DVector;
use statrs::distribution::ContinuousCDF;

use crate::error::{positive, Error, Result};
use crate::linalg::SymMatrix;

/// Tolerance on `|‖y‖₂ − 1|` for sphere points.
pub const SPHERE_NORM_TOL: f64 = 1e-10;

/// Response variants, used to tag samples and data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseKind {
    Vector,
    Quantile,
    #[serde(rename = "symmatrix")]
    SymMatrix,
    Sphere,
}

impl std::str::FromStr for ResponseKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vector" => Ok(ResponseKind::Vector),
            "quantile" => Ok(ResponseKind::Quantile),
            "symmatrix" => Ok(ResponseKind::SymMatrix),
            "sphere" => Ok(ResponseKind::Sphere),
            other => Err(Error::invalid(format!(
                "unknown response kind '{other}' (expected vector|quantile|symmatrix|sphere)"
            ))),
        }
    }
}

impl std::fmt::Display for ResponseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ResponseKind::Vector => "vector",
            ResponseKind::Quantile => "quantile",
            ResponseKind::SymMatrix => "symmatrix",
            ResponseKind::Sphere => "sphere",
        };
        f.write_str(s)
    }
}

/// Which metric to use between sphere points. Geodesic is the canonical
/// choice; chordal is kept for sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SphereMetric {
    #[default]
    Geodesic,
    Chordal,
}

/// A single response: a point in one of the supported metric spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum ResponseObject {
    Vector(DVector<f64>),
    /// Non-decreasing quantile values on the midpoint grid of `[0,1]`.
    Quantile(DVector<f64>),
    SymMatrixPoint(SymMatrix),
    /// Unit vector (checked to [`SPHERE_NORM_TOL`]).
    Sphere(DVector<f64>),
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} contains non-finite values")));
    }
    Ok(())
}

impl ResponseObject {
    pub fn vector(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("vector response must be non-empty"));
        }
        check_finite(&values, "vector response")?;
        Ok(ResponseObject::Vector(DVector::from_vec(values)))
    }

    /// Quantile grid of a distribution; values must be non-decreasing with
    /// at least two grid points.
    pub fn quantile(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("quantile grid needs at least 2 points"));
        }
        check_finite(&values, "quantile grid")?;
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("quantile values must be non-decreasing"));
        }
        Ok(ResponseObject::Quantile(DVector::from_vec(values)))
    }

    pub fn sym_matrix_point(m: SymMatrix) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::invalid("matrix response contains non-finite values"));
        }
        Ok(ResponseObject::SymMatrixPoint(m))
    }

    pub fn sphere(values: Vec<f64>) -> Result<Self> {
        check_finite(&values, "sphere response")?;
        let v = DVector::from_vec(values);
        if (v.norm() - 1.0).abs() > SPHERE_NORM_TOL {
            return Err(Error::invalid(format!(
                "sphere point has norm {:.12}, expected 1",
                v.norm()
            )));
        }
        Ok(ResponseObject::Sphere(v))
    }

    pub fn kind(&self) -> ResponseKind {
        match self {
            ResponseObject::Vector(_) => ResponseKind::Vector,
            ResponseObject::Quantile(_) => ResponseKind::Quantile,
            ResponseObject::SymMatrixPoint(_) => ResponseKind::SymMatrix,
            ResponseObject::Sphere(_) => ResponseKind::Sphere,
        }
    }

    /// Vector length, grid size, or matrix dimension.
    pub fn len(&self) -> usize {
        match self {
            ResponseObject::Vector(v) | ResponseObject::Quantile(v) | ResponseObject::Sphere(v) => {
                v.len()
            }
            ResponseObject::SymMatrixPoint(m) => m.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.kind() == other.kind() && self.len() == other.len()
    }
}

/// Distance between two responses of the same variant and shape.
pub fn distance(a: &ResponseObject, b: &ResponseObject) -> Result<f64> {
    distance_with(a, b, SphereMetric::Geodesic)
}

/// Like [`distance`], with an explicit choice of sphere metric.
pub fn distance_with(a: &ResponseObject, b: &ResponseObject, sphere: SphereMetric) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::invalid(format!(
            "cannot compare {} response of size {} with {} response of size {}",
            a.kind(),
            a.len(),
            b.kind(),
            b.len()
        )));
    }
    let d = match (a, b) {
        (ResponseObject::Vector(x), ResponseObject::Vector(y)) => (x - y).norm(),
        (ResponseObject::Quantile(x), ResponseObject::Quantile(y)) => {
            // Wasserstein-2 on the midpoint grid: sqrt((1/m) Σ (x_j − y_j)²)
            (x - y).norm() / (x.len() as f64).sqrt()
        }
        (ResponseObject::SymMatrixPoint(x), ResponseObject::SymMatrixPoint(y)) => {
            (x.as_matrix() - y.as_matrix()).norm()
        }
        (ResponseObject::Sphere(x), ResponseObject::Sphere(y)) => match sphere {
            // identical inputs short-circuit to 0: acos(x·x) picks up ~1e-8
            // of rounding even though the metric identity is exact
            SphereMetric::Geodesic if x == y => 0.0,
            SphereMetric::Geodesic => x.dot(y).clamp(-1.0, 1.0).acos(),
            SphereMetric::Chordal => (x - y).norm(),
        },
        _ => unreachable!("shape check above"),
    };
    Ok(d)
}

/// A homogeneous sample of responses.
#[derive(Debug, Clone)]
pub struct ResponseSample {
    objects: Vec<ResponseObject>,
}

impl ResponseSample {
    /// All objects must share variant and shape.
    pub fn new(objects: Vec<ResponseObject>) -> Result<Self> {
        let first = objects
            .first()
            .ok_or_else(|| Error::invalid("response sample must be non-empty"))?;
        for (i, o) in objects.iter().enumerate().skip(1) {
            if !first.same_shape(o) {
                return Err(Error::invalid(format!(
                    "response {} ({} of size {}) does not match response 0 ({} of size {})",
                    i,
                    o.kind(),
                    o.len(),
                    first.kind(),
                    first.len()
                )));
            }
        }
        Ok(ResponseSample { objects })
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn kind(&self) -> ResponseKind {
        self.objects[0].kind()
    }

    pub fn get(&self, i: usize) -> &ResponseObject {
        &self.objects[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ResponseObject> {
        self.objects.iter()
    }

    /// Matrix of pairwise distances; zero diagonal, symmetric.
    pub fn pairwise_distances(&self) -> Result<SymMatrix> {
        self.pairwise_distances_with(SphereMetric::Geodesic)
    }

    pub fn pairwise_distances_with(&self, sphere: SphereMetric) -> Result<SymMatrix> {
        let n = self.len();
        if n < 2 {
            return Err(Error::invalid("pairwise distances need at least 2 responses"));
        }
        let mut d = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = distance_with(&self.objects[i], &self.objects[j], sphere)?;
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        SymMatrix::new(d)
    }
}

/// Quantile grid of `N(mu, sigma²)` on the midpoint grid with `m` points:
/// `q_j = mu + sigma·Φ⁻¹((j−½)/m)`.
pub fn gaussian_quantile_distribution(mu: f64, sigma: f64, m: usize) -> Result<ResponseObject> {
    if !positive(sigma) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if m < 2 {
        return Err(Error::invalid("grid size must be at least 2"));
    }
    let normal = statrs::distribution::Normal::standard();
    let values: Vec<f64> = (1..=m)
        .map(|j| mu + sigma * normal.inverse_cdf((j as f64 - 0.5) / m as f64))
        .collect();
    ResponseObject::quantile(values)
}
