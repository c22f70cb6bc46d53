//! Error type shared across the crate.

/// Errors produced by estimation, simulation, and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input (shape mismatches, out-of-range
    /// parameters, invalid scenario combinations, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A matrix required to be invertible (up to the eigenvalue floor) was
    /// numerically singular.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// Stiefel projection of a rank-deficient matrix; the caller should
    /// re-randomize the input.
    #[error("degenerate projection: input matrix is rank-deficient")]
    DegenerateProjection,

    /// A sample with no usable variation, e.g. all pairwise response
    /// distances are zero.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Feature-space squared distances came out strongly negative, which
    /// indicates a kernel matrix that is not positive semidefinite.
    #[error("kernel matrix is not positive semidefinite (violation {0:.3e})")]
    NonPsdKernel(f64),

    /// The optimizer could not make progress from any restart.
    #[error("optimization failed: {0}")]
    OptimizationFailure(String),

    /// A data file could not be parsed; `line` is 1-based.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

/// Finite and strictly positive (rejects NaN and infinities).
pub(crate) fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}
