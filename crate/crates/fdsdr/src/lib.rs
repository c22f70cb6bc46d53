//! Sufficient dimension reduction for metric space-valued responses via
//! kernel distance covariance.
//!
//! Given predictors `X ∈ R^{n×p}` and responses living in a metric space
//! (vectors, one-dimensional distributions, symmetric matrices, or points on
//! a sphere), this crate estimates a basis of the central subspace by
//! maximizing the empirical kernel distance covariance between projected
//! predictors and responses over the Stiefel manifold.
//!
//! The pipeline is:
//!
//! 1. pairwise response distances ([`metric`]),
//! 2. kernel matrix and feature-space distances with data-driven bandwidth
//!    ([`kernel`]),
//! 3. double centering and the distance-covariance objective ([`dcov`]),
//! 4. projected subgradient ascent on the Stiefel manifold ([`optim`]),
//! 5. whitening and de-whitening to the coefficient matrix ([`estimator`]).
//!
//! [`sim`] provides seeded synthetic data generators for three benchmark
//! scenarios (distributional, SPD-matrix, and spherical responses) and
//! [`bench`] a Monte-Carlo harness around them. See the `examples/`
//! directory for end-to-end usage and the `fdsdr` binary for the CLI.

pub mod bench;
pub mod csvio;
pub mod dcov;
pub mod error;
pub mod estimator;
pub mod kernel;
pub mod linalg;
pub mod metric;
pub mod optim;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use estimator::{fit, subspace_error, Dataset, SubspaceEstimate};
pub use kernel::{KernelConfig, KernelFamily, KernelSpec};
pub use linalg::{StiefelPoint, SymMatrix};
pub use metric::{ResponseKind, ResponseObject, ResponseSample};
pub use optim::{FitTrace, OptimizerConfig};
pub use sim::{GroundTruth, PredictorScheme, Scenario, ScenarioSpec};
