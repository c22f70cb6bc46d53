//! Seeded synthetic data generators for three benchmark scenarios.
//!
//! * Scenario I — distributional responses: `Y ~ N(μ_Y, α·σ_Y²)` with
//!   `μ_Y`, `σ_Y` driven by linear combinations of the predictors, stored
//!   as quantile grids.
//! * Scenario II — SPD matrix responses: `log(Y) ~ N_{q×q}(log(D(X)), σ²I)`
//!   with a correlation-matrix mean whose entries depend on the predictors.
//! * Scenario III — spherical responses on `S¹`/`S²` built from
//!   predictor-driven angles plus tangent noise.
//!
//! All generators are deterministic given `(spec, seed)`, and every dataset
//! comes with a [`GroundTruth`] basis of the central subspace.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;

use crate::error::{positive, Error, Result};
use crate::estimator::Dataset;
use crate::linalg::{sym_exp, sym_log, SymMatrix};
use crate::metric::{gaussian_quantile_distribution, ResponseObject, ResponseSample};
use crate::rng;

/// Truncation range for σ_Y in Scenario I, applied by clamping.
const SIGMA_CLAMP: (f64, f64) = (0.1, 10.0);

/// Noise scale of the symmetric matrix normal in Scenario II.
const MATRIX_NOISE_SD: f64 = 0.5;

/// Standard deviation of the tangent noise in Scenario III.
const SPHERE_NOISE_SD: f64 = 0.2;

/// Attempts at redrawing a predictor row before giving up when the mean
/// matrix `D(X)` must be positive definite.
const PD_RESAMPLE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    I,
    II,
    III,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scenario::I => f.write_str("I"),
            Scenario::II => f.write_str("II"),
            Scenario::III => f.write_str("III"),
        }
    }
}

/// How predictor rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorScheme {
    /// `X ~ N(0, I_p)`.
    A,
    /// AR(1) draws `U` with covariance `(0.5^|i−j|)`, then
    /// `X = (sin U₁, |U₂|, U₃, …, U_p)`.
    B,
    /// AR(1) draws `U`, then `X = (Φ(U₁), …, Φ(U_p))`.
    C,
}

impl std::fmt::Display for PredictorScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PredictorScheme::A => f.write_str("a"),
            PredictorScheme::B => f.write_str("b"),
            PredictorScheme::C => f.write_str("c"),
        }
    }
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    /// Model number within the scenario.
    pub model: u8,
    pub predictor_scheme: PredictorScheme,
    pub n: usize,
    pub p: usize,
    /// Variance multiplier of Scenario I responses (`Y ~ N(μ_Y, α·σ_Y²)`).
    #[serde(default = "default_alpha_var")]
    pub alpha_var: f64,
    /// Gamma dispersion parameter of Scenario I Models 3–4.
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Quantile grid size of Scenario I responses.
    #[serde(default = "default_grid_m")]
    pub grid_m: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_alpha_var() -> f64 {
    1.0
}
fn default_nu() -> f64 {
    0.5
}
fn default_grid_m() -> usize {
    100
}

impl ScenarioSpec {
    /// Check the (scenario, model, scheme) combination and basic sizes.
    pub fn validate(&self) -> Result<()> {
        use PredictorScheme::*;
        if self.p < 5 {
            return Err(Error::invalid("scenario generators need p >= 5"));
        }
        if self.n < 2 {
            return Err(Error::invalid("scenario generators need n >= 2"));
        }
        if !positive(self.alpha_var) || !positive(self.nu) {
            return Err(Error::invalid("alpha_var and nu must be positive"));
        }
        if self.grid_m < 2 {
            return Err(Error::invalid("grid_m must be at least 2"));
        }
        let ok = match self.scenario {
            Scenario::I => matches!(
                (self.model, self.predictor_scheme),
                (1, A) | (1, B) | (2, A) | (2, B) | (3, C) | (4, C)
            ),
            Scenario::II => matches!(
                (self.model, self.predictor_scheme),
                (1, A) | (1, B) | (2, A) | (2, B)
            ),
            Scenario::III => matches!(
                (self.model, self.predictor_scheme),
                (1, A) | (1, C) | (2, A) | (2, C) | (3, A) | (3, C)
            ),
        };
        if !ok {
            return Err(Error::invalid(format!(
                "scenario {} has no model {} with predictor scheme {}",
                self.scenario, self.model, self.predictor_scheme
            )));
        }
        Ok(())
    }

    /// Dimension of the true central subspace.
    pub fn true_dim(&self) -> usize {
        match (self.scenario, self.model) {
            (Scenario::I, 1) | (Scenario::II, 1) | (Scenario::III, 1) => 1,
            _ => 2,
        }
    }

    /// Response variant this spec generates.
    pub fn response_kind(&self) -> crate::metric::ResponseKind {
        match self.scenario {
            Scenario::I => crate::metric::ResponseKind::Quantile,
            Scenario::II => crate::metric::ResponseKind::SymMatrix,
            Scenario::III => crate::metric::ResponseKind::Sphere,
        }
    }
}

/// A basis of the true central subspace.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub basis: DMatrix<f64>,
    pub d_true: usize,
}

// Fixed direction patterns of Scenarios I and II.
fn beta1(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[0] = 1.0;
    b[1] = 1.0;
    b
}

fn beta2(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[p - 2] = 1.0;
    b[p - 1] = 1.0;
    b
}

fn beta3(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[0] = 1.0;
    b[1] = 2.0;
    b[p - 1] = 2.0;
    b
}

fn beta4(p: usize) -> DVector<f64> {
    let mut b = DVector::zeros(p);
    b[2] = 1.0;
    b[3] = 2.0;
    b[4] = 2.0;
    b
}

fn basis_from(cols: &[DVector<f64>]) -> DMatrix<f64> {
    let p = cols[0].len();
    DMatrix::from_fn(p, cols.len(), |i, j| cols[j][i])
}

/// Cholesky factor of the AR(1) covariance `(0.5^|i−j|)`.
fn ar1_cholesky(p: usize) -> DMatrix<f64> {
    let sigma = DMatrix::from_fn(p, p, |i, j| 0.5f64.powi((i as i32 - j as i32).abs()));
    nalgebra::Cholesky::new(sigma)
        .expect("AR(1) covariance is positive definite")
        .l()
}

fn standard_normal_row(p: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(p, |_, _| rng.sample(StandardNormal))
}

fn predictor_row(
    scheme: PredictorScheme,
    chol: &DMatrix<f64>,
    rng: &mut ChaCha8Rng,
) -> DVector<f64> {
    let p = chol.nrows();
    match scheme {
        PredictorScheme::A => standard_normal_row(p, rng),
        PredictorScheme::B => {
            let mut u = chol * standard_normal_row(p, rng);
            u[0] = u[0].sin();
            u[1] = u[1].abs();
            u
        }
        PredictorScheme::C => {
            let u = chol * standard_normal_row(p, rng);
            let normal = statrs::distribution::Normal::standard();
            u.map(|v| normal.cdf(v))
        }
    }
}

/// Draw an `n×p` predictor matrix under the given scheme.
pub fn gen_predictors(
    scheme: PredictorScheme,
    n: usize,
    p: usize,
    rng: &mut ChaCha8Rng,
) -> Result<DMatrix<f64>> {
    if p < 5 {
        return Err(Error::invalid("predictor schemes need p >= 5"));
    }
    let chol = ar1_cholesky(p);
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        x.set_row(i, &predictor_row(scheme, &chol, rng).transpose());
    }
    Ok(x)
}

/// Gamma parameters (shape, scale) for σ_Y in Scenario I Models 3–4; the
/// conditional mean is `shape·scale = m`.
pub(crate) fn gamma_sigma_params(m: f64, nu: f64) -> (f64, f64) {
    (m * m / nu, nu / m)
}

fn clamp_sigma(sigma: f64) -> f64 {
    sigma.clamp(SIGMA_CLAMP.0, SIGMA_CLAMP.1)
}

fn gen_scenario_i(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<(Dataset, GroundTruth)> {
    let (n, p) = (spec.n, spec.p);
    let b1 = beta1(p);
    let b2 = beta2(p);
    let b3 = beta3(p);
    let b4 = beta4(p);
    let x = gen_predictors(spec.predictor_scheme, n, p, rng)?;
    let mut responses = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x.row(i).transpose();
        let (mu, sigma) = match spec.model {
            1 => {
                let mu = (b1.dot(&xi)).exp() + 0.1f64.sqrt() * rng.sample::<f64, _>(StandardNormal);
                (mu, 0.5)
            }
            2 => {
                let mu = (b1.dot(&xi)).exp() + 0.1f64.sqrt() * rng.sample::<f64, _>(StandardNormal);
                (mu, clamp_sigma((b2.dot(&xi)).exp()))
            }
            3 | 4 => {
                let t = b3.dot(&xi);
                let loc = if spec.model == 3 { 3.0 * t } else { 3.0 * t.sin() };
                let mu = loc + 0.5 * rng.sample::<f64, _>(StandardNormal);
                let mean_sigma = 2.0 + 2.0 * b4.dot(&xi);
                let (shape, scale) = gamma_sigma_params(mean_sigma, spec.nu);
                let gamma = Gamma::new(shape, scale)
                    .map_err(|e| Error::invalid(format!("gamma parameters: {e}")))?;
                (mu, clamp_sigma(gamma.sample(rng)))
            }
            _ => unreachable!("validated"),
        };
        responses.push(gaussian_quantile_distribution(
            mu,
            spec.alpha_var.sqrt() * sigma,
            spec.grid_m,
        )?);
    }
    let truth = match spec.model {
        1 => basis_from(&[b1]),
        2 => basis_from(&[b1, b2]),
        _ => basis_from(&[b3, b4]),
    };
    let d_true = truth.ncols();
    Ok((
        Dataset::new(x, ResponseSample::new(responses)?)?,
        GroundTruth { basis: truth, d_true },
    ))
}

/// Mean matrix `D(X)` of Scenario II.
fn scenario_ii_mean(model: u8, b1: &DVector<f64>, b2: &DVector<f64>, xi: &DVector<f64>) -> SymMatrix {
    match model {
        1 => {
            let r = 0.8 * (b1.dot(xi)).cos();
            SymMatrix::from_fn(2, |i, j| if i == j { 1.0 } else { r })
        }
        _ => {
            let r1 = 0.8 * (b1.dot(xi)).cos();
            let r2 = 0.8 * (b2.dot(xi)).sin();
            let m = DMatrix::from_row_slice(3, 3, &[1.0, r1, r2, r1, 1.0, r1, r2, r1, 1.0]);
            SymMatrix::new(m).expect("square by construction")
        }
    }
}

fn min_eigenvalue(m: &SymMatrix) -> f64 {
    m.as_matrix()
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric matrix normal noise: diagonal entries `N(0, σ²)`, off-diagonal
/// `N(0, σ²/2)`.
fn symmetric_noise(q: usize, sd: f64, rng: &mut ChaCha8Rng) -> SymMatrix {
    let off_sd = sd / 2.0f64.sqrt();
    let mut m = DMatrix::zeros(q, q);
    for a in 0..q {
        for b in a..q {
            let scale = if a == b { sd } else { off_sd };
            let v = scale * rng.sample::<f64, _>(StandardNormal);
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    SymMatrix::new(m).expect("square by construction")
}

fn gen_scenario_ii(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<(Dataset, GroundTruth)> {
    let (n, p) = (spec.n, spec.p);
    let b1 = beta1(p);
    let b2 = beta2(p);
    let chol = ar1_cholesky(p);
    let mut x = DMatrix::zeros(n, p);
    let mut responses = Vec::with_capacity(n);
    for i in 0..n {
        // redraw the predictor row until D(X) is positive definite (Model 2
        // can produce indefinite correlation patterns)
        let mut accepted = None;
        for _ in 0..PD_RESAMPLE_ATTEMPTS {
            let xi = predictor_row(spec.predictor_scheme, &chol, rng);
            let d = scenario_ii_mean(spec.model, &b1, &b2, &xi);
            if min_eigenvalue(&d) > 1e-8 {
                accepted = Some((xi, d));
                break;
            }
        }
        let (xi, d) = accepted.ok_or_else(|| {
            Error::DegenerateSample(format!(
                "could not draw a positive definite mean matrix in {PD_RESAMPLE_ATTEMPTS} attempts"
            ))
        })?;
        x.set_row(i, &xi.transpose());
        let log_mean = sym_log(&d)?;
        let noise = symmetric_noise(log_mean.dim(), MATRIX_NOISE_SD, rng);
        let log_y = SymMatrix::new(log_mean.as_matrix() + noise.as_matrix())?;
        responses.push(ResponseObject::sym_matrix_point(sym_exp(&log_y))?);
    }
    let truth = match spec.model {
        1 => basis_from(&[b1]),
        _ => basis_from(&[b1, b2]),
    };
    let d_true = truth.ncols();
    Ok((
        Dataset::new(x, ResponseSample::new(responses)?)?,
        GroundTruth { basis: truth, d_true },
    ))
}

/// Combine a base point and a tangent perturbation into a sphere point:
/// `Y = cos(‖ε‖)·m + sin(‖ε‖)·ε/‖ε‖`, with `Y = m` at `ε = 0`.
pub(crate) fn sphere_point_from(m: &DVector<f64>, eps: &DVector<f64>) -> DVector<f64> {
    let norm = eps.norm();
    if norm == 0.0 {
        return m.clone();
    }
    m * norm.cos() + eps * (norm.sin() / norm)
}

/// Orthonormal tangent basis at a point on `S²` by Gram–Schmidt over the
/// standard basis.
pub(crate) fn tangent_basis(m: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2);
    for axis in 0..3 {
        let mut v = DVector::zeros(3);
        v[axis] = 1.0;
        v -= m * m.dot(&v);
        for u in &basis {
            let proj = u.dot(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
            if basis.len() == 2 {
                break;
            }
        }
    }
    let v2 = basis.pop().expect("two independent tangent directions exist");
    let v1 = basis.pop().expect("two independent tangent directions exist");
    (v1, v2)
}

/// Scenario III Model 3 point from the two driving angles.
pub(crate) fn spherical_angles_point(s1: f64, s2: f64) -> DVector<f64> {
    DVector::from_vec(vec![s1.sin() * s2.sin(), s1.sin() * s2.cos(), s1.cos()])
}

fn unit_sphere_response(y: DVector<f64>) -> Result<ResponseObject> {
    // renormalize away accumulated rounding before the strict constructor
    let norm = y.norm();
    ResponseObject::sphere((y / norm).iter().cloned().collect())
}

fn gen_scenario_iii(spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> Result<(Dataset, GroundTruth)> {
    let (n, p) = (spec.n, spec.p);
    // β₁, β₂ are drawn once per dataset, then held fixed
    let g: Vec<f64> = (0..6).map(|_| rng.sample(StandardNormal)).collect();
    let mut b1 = DVector::zeros(p);
    let mut b2 = DVector::zeros(p);
    let s3 = 3.0f64.sqrt();
    for k in 0..3 {
        b1[k] = g[k] / s3;
        b2[p - 3 + k] = g[3 + k] / s3;
    }
    let mut b3 = DVector::zeros(p);
    b3[1] = 1.0;

    let x = gen_predictors(spec.predictor_scheme, n, p, rng)?;
    let mut responses = Vec::with_capacity(n);
    for i in 0..n {
        let xi = x.row(i).transpose();
        let y = match spec.model {
            1 => {
                let delta: f64 = SPHERE_NOISE_SD * rng.sample::<f64, _>(StandardNormal);
                let theta = std::f64::consts::PI * b1.dot(&xi);
                let m = DVector::from_vec(vec![theta.cos(), theta.sin()]);
                let eps = DVector::from_vec(vec![-delta * theta.sin(), delta * theta.cos()]);
                sphere_point_from(&m, &eps)
            }
            2 => {
                let theta = std::f64::consts::PI * b1.dot(&xi);
                // scheme (a) can push β₃ᵀX outside [−1, 1]; clamp keeps the
                // base point on the sphere
                let t = b3.dot(&xi).clamp(-1.0, 1.0);
                let r = (1.0 - t * t).sqrt();
                let m = DVector::from_vec(vec![r * theta.cos(), r * theta.sin(), t]);
                let (v1, v2) = tangent_basis(&m);
                let d1: f64 = SPHERE_NOISE_SD * rng.sample::<f64, _>(StandardNormal);
                let d2: f64 = SPHERE_NOISE_SD * rng.sample::<f64, _>(StandardNormal);
                sphere_point_from(&m, &(v1 * d1 + v2 * d2))
            }
            3 => {
                let d1: f64 = SPHERE_NOISE_SD * rng.sample::<f64, _>(StandardNormal);
                let d2: f64 = SPHERE_NOISE_SD * rng.sample::<f64, _>(StandardNormal);
                spherical_angles_point(b1.dot(&xi) + d1, b2.dot(&xi) + d2)
            }
            _ => unreachable!("validated"),
        };
        responses.push(unit_sphere_response(y)?);
    }
    let truth = match spec.model {
        1 => basis_from(&[b1]),
        2 => basis_from(&[b1, b3]),
        _ => basis_from(&[b1, b2]),
    };
    let d_true = truth.ncols();
    Ok((
        Dataset::new(x, ResponseSample::new(responses)?)?,
        GroundTruth { basis: truth, d_true },
    ))
}

/// Generate the dataset and ground truth described by `spec`, seeded by
/// `spec.seed`.
pub fn generate(spec: &ScenarioSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut r = rng::seeded(spec.seed);
    match spec.scenario {
        Scenario::I => gen_scenario_i(spec, &mut r),
        Scenario::II => gen_scenario_ii(spec, &mut r),
        Scenario::III => gen_scenario_iii(spec, &mut r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sample_covariance;
    use approx::assert_relative_eq;
    use statrs::distribution::ContinuousCDF;

    fn spec(
        scenario: Scenario,
        model: u8,
        scheme: PredictorScheme,
        n: usize,
        p: usize,
    ) -> ScenarioSpec {
        ScenarioSpec {
            scenario,
            model,
            predictor_scheme: scheme,
            n,
            p,
            alpha_var: 1.0,
            nu: 0.5,
            grid_m: 100,
            seed: 7,
        }
    }

    #[test]
    fn scheme_a_moments() {
        let mut r = rng::seeded(1);
        let x = gen_predictors(PredictorScheme::A, 10_000, 6, &mut r).unwrap();
        let cov = sample_covariance(&x).unwrap();
        let dev = (cov.as_matrix() - DMatrix::identity(6, 6)).abs().max();
        assert!(dev < 0.05, "covariance deviation {dev}");
    }

    #[test]
    fn scheme_b_second_column_nonnegative() {
        let mut r = rng::seeded(2);
        let x = gen_predictors(PredictorScheme::B, 500, 5, &mut r).unwrap();
        assert!(x.column(1).iter().all(|&v| v >= 0.0));
        // first column is a sine, bounded by 1
        assert!(x.column(0).iter().all(|&v| v.abs() <= 1.0));
    }

    #[test]
    fn scheme_c_entries_in_unit_interval() {
        let mut r = rng::seeded(3);
        let x = gen_predictors(PredictorScheme::C, 500, 5, &mut r).unwrap();
        assert!(x.iter().all(|&v| v > 0.0 && v < 1.0));
    }

    #[test]
    fn scheme_b_untransformed_columns_follow_ar1() {
        let mut r = rng::seeded(4);
        let x = gen_predictors(PredictorScheme::B, 20_000, 6, &mut r).unwrap();
        let cov = sample_covariance(&x).unwrap();
        for i in 2..6 {
            for j in 2..6 {
                let expected = 0.5f64.powi((i as i32 - j as i32).abs());
                assert_relative_eq!(cov[(i, j)], expected, epsilon = 0.05);
            }
        }
    }

    #[test]
    fn scenario_i_model_1_has_constant_sigma() {
        let (dataset, truth) = generate(&spec(Scenario::I, 1, PredictorScheme::A, 50, 6)).unwrap();
        assert_eq!(truth.d_true, 1);
        let normal = statrs::distribution::Normal::standard();
        let m = 100;
        let z_span =
            normal.inverse_cdf((m as f64 - 0.5) / m as f64) - normal.inverse_cdf(0.5 / m as f64);
        for obj in dataset.responses().iter() {
            let ResponseObject::Quantile(q) = obj else { panic!() };
            // grid span recovers σ = 0.5 exactly for every draw
            assert_relative_eq!((q[m - 1] - q[0]) / z_span, 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn scenario_i_model_2_sigma_is_clamped() {
        let (dataset, _) = generate(&spec(Scenario::I, 2, PredictorScheme::B, 200, 6)).unwrap();
        let normal = statrs::distribution::Normal::standard();
        let m = 100;
        let z_span =
            normal.inverse_cdf((m as f64 - 0.5) / m as f64) - normal.inverse_cdf(0.5 / m as f64);
        for obj in dataset.responses().iter() {
            let ResponseObject::Quantile(q) = obj else { panic!() };
            let sigma = (q[m - 1] - q[0]) / z_span;
            assert!((0.1 - 1e-9..=10.0 + 1e-9).contains(&sigma), "sigma {sigma}");
        }
    }

    #[test]
    fn gamma_sigma_mean_matches_target() {
        // shape·scale identity plus a Monte-Carlo check of the sampler
        let target = 3.4;
        let (shape, scale) = gamma_sigma_params(target, 0.5);
        assert_relative_eq!(shape * scale, target, epsilon = 1e-12);
        let gamma = Gamma::new(shape, scale).unwrap();
        let mut r = rng::seeded(5);
        let mean: f64 = (0..10_000).map(|_| gamma.sample(&mut r)).sum::<f64>() / 10_000.0;
        assert!((mean - target).abs() < 0.05, "sample mean {mean}");
    }

    #[test]
    fn scenario_i_rejects_invalid_combinations() {
        assert!(generate(&spec(Scenario::I, 3, PredictorScheme::A, 50, 6)).is_err());
        assert!(generate(&spec(Scenario::I, 1, PredictorScheme::C, 50, 6)).is_err());
        assert!(generate(&spec(Scenario::I, 5, PredictorScheme::A, 50, 6)).is_err());
    }

    #[test]
    fn scenario_i_quantile_grids_are_valid() {
        for model in [1u8, 2] {
            let (dataset, _) =
                generate(&spec(Scenario::I, model, PredictorScheme::B, 60, 6)).unwrap();
            for obj in dataset.responses().iter() {
                let ResponseObject::Quantile(q) = obj else { panic!() };
                assert!(q.iter().zip(q.iter().skip(1)).all(|(a, b)| a <= b));
            }
        }
    }

    #[test]
    fn scenario_ii_zero_correlation_mean_is_identity_log() {
        let p = 6;
        let b1 = beta1(p);
        let b2 = beta2(p);
        // β₁ᵀx = π/2 makes ρ = 0.8·cos(π/2) = 0
        let mut xi = DVector::zeros(p);
        xi[0] = std::f64::consts::FRAC_PI_2;
        let d = scenario_ii_mean(1, &b1, &b2, &xi);
        assert!((d.as_matrix() - DMatrix::identity(2, 2)).abs().max() < 1e-12);
        assert!(sym_log(&d).unwrap().as_matrix().abs().max() < 1e-12);
    }

    #[test]
    fn scenario_ii_responses_are_spd() {
        for model in [1u8, 2] {
            let (dataset, truth) =
                generate(&spec(Scenario::II, model, PredictorScheme::A, 60, 6)).unwrap();
            assert_eq!(truth.d_true, if model == 1 { 1 } else { 2 });
            for obj in dataset.responses().iter() {
                let ResponseObject::SymMatrixPoint(m) = obj else { panic!() };
                assert!(min_eigenvalue(m) > 0.0);
                assert_eq!(m.dim(), if model == 1 { 2 } else { 3 });
            }
        }
    }

    #[test]
    fn scenario_ii_log_mean_recovered_by_monte_carlo() {
        // at fixed X, the mean of log(Y) is log(D(X))
        let p = 6;
        let b1 = beta1(p);
        let b2 = beta2(p);
        let mut xi = DVector::zeros(p);
        xi[0] = 1.2;
        xi[p - 1] = 0.2;
        let d = scenario_ii_mean(2, &b1, &b2, &xi);
        assert!(min_eigenvalue(&d) > 0.0, "test point must be PD");
        let log_mean = sym_log(&d).unwrap();
        let mut r = rng::seeded(6);
        let mut acc = DMatrix::zeros(3, 3);
        let reps = 10_000;
        for _ in 0..reps {
            let noise = symmetric_noise(3, MATRIX_NOISE_SD, &mut r);
            let log_y = SymMatrix::new(log_mean.as_matrix() + noise.as_matrix()).unwrap();
            acc += sym_log(&sym_exp(&log_y)).unwrap().as_matrix();
        }
        acc /= reps as f64;
        assert!((acc - log_mean.as_matrix()).abs().max() < 0.05);
    }

    #[test]
    fn scenario_iii_responses_are_unit_norm() {
        for (model, scheme) in [
            (1u8, PredictorScheme::A),
            (2, PredictorScheme::C),
            (3, PredictorScheme::A),
        ] {
            let (dataset, truth) = generate(&spec(Scenario::III, model, scheme, 80, 6)).unwrap();
            assert_eq!(truth.d_true, if model == 1 { 1 } else { 2 });
            for obj in dataset.responses().iter() {
                let ResponseObject::Sphere(y) = obj else { panic!() };
                assert!((y.norm() - 1.0).abs() <= 1e-10);
                assert_eq!(y.len(), if model == 1 { 2 } else { 3 });
            }
        }
    }

    #[test]
    fn sphere_point_zero_noise_returns_base() {
        let m = DVector::from_vec(vec![0.6, 0.8]);
        let eps = DVector::zeros(2);
        assert_eq!(sphere_point_from(&m, &eps), m);
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent() {
        for seed in 0..20u64 {
            let mut r = rng::seeded(seed);
            let g = DVector::from_fn(3, |_, _| r.sample::<f64, _>(StandardNormal));
            let m = &g / g.norm();
            let (v1, v2) = tangent_basis(&m);
            assert!(m.dot(&v1).abs() < 1e-12);
            assert!(m.dot(&v2).abs() < 1e-12);
            assert!(v1.dot(&v2).abs() < 1e-12);
            assert_relative_eq!(v1.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(v2.norm(), 1.0, epsilon = 1e-12);
        }
        // poles exercise the Gram-Schmidt skip branch
        let pole = DVector::from_vec(vec![0.0, 0.0, 1.0]);
        let (v1, v2) = tangent_basis(&pole);
        assert!(pole.dot(&v1).abs() < 1e-12 && pole.dot(&v2).abs() < 1e-12);
    }

    #[test]
    fn spherical_angles_formula_by_substitution() {
        let y = spherical_angles_point(std::f64::consts::FRAC_PI_2, 0.0);
        assert_relative_eq!(y[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(y[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(y[2], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn generators_are_deterministic() {
        for s in [
            spec(Scenario::I, 2, PredictorScheme::B, 30, 6),
            spec(Scenario::II, 2, PredictorScheme::A, 30, 6),
            spec(Scenario::III, 3, PredictorScheme::C, 30, 6),
        ] {
            let (d1, t1) = generate(&s).unwrap();
            let (d2, t2) = generate(&s).unwrap();
            let bits = |m: &DMatrix<f64>| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(d1.x()), bits(d2.x()));
            assert_eq!(bits(&t1.basis), bits(&t2.basis));
            for (a, b) in d1.responses().iter().zip(d2.responses().iter()) {
                assert_eq!(a, b);
            }
            // a different seed produces different data
            let other = ScenarioSpec { seed: 8, ..s };
            let (d3, _) = generate(&other).unwrap();
            assert_ne!(bits(d1.x()), bits(d3.x()));
        }
    }

    #[test]
    fn ground_truth_bases_have_full_rank() {
        for s in [
            spec(Scenario::I, 3, PredictorScheme::C, 20, 7),
            spec(Scenario::II, 2, PredictorScheme::B, 20, 7),
            spec(Scenario::III, 2, PredictorScheme::A, 20, 7),
        ] {
            let (_, truth) = generate(&s).unwrap();
            let svd = truth.basis.clone().svd(false, false);
            assert!(svd.singular_values.min() > 1e-8);
        }
    }

    #[test]
    fn spec_validation_catches_bad_sizes() {
        let mut s = spec(Scenario::I, 1, PredictorScheme::A, 50, 4);
        assert!(s.validate().is_err());
        s.p = 6;
        s.grid_m = 1;
        assert!(s.validate().is_err());
        s.grid_m = 100;
        s.alpha_var = 0.0;
        assert!(s.validate().is_err());
    }
}
