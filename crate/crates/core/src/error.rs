use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("field has {actual} samples, grid expects {expected}")]
    FieldLength { expected: usize, actual: usize },

    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("expected a {expected}D grid, got {actual}D")]
    Dimension { expected: usize, actual: usize },

    #[error("argument {value} outside the logarithmic potential domain (-1, 1)")]
    Domain { value: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("stabilization κ = {kappa} is below ‖f′‖ = {required}")]
    KappaTooSmall { kappa: f64, required: f64 },

    #[error("time step {tau} exceeds the {scheme} limit {limit}")]
    StepTooLarge {
        scheme: &'static str,
        tau: f64,
        limit: f64,
    },

    #[error("initial sup norm {sup_norm} exceeds the bound β = {beta}")]
    InitialBound { sup_norm: f64, beta: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("Cardano formula needs a positive discriminant, got {0:e}")]
    Discriminant(f64),

    #[error("Cardano solver applies only to the polynomial potential")]
    CardanoNeedsPolynomial,

    #[error("bisection bracket [{lo}, {hi}] has no sign change")]
    NoBracket { lo: f64, hi: f64 },

    #[error("dense oracle limited to {limit} unknowns, got {size}")]
    DenseTooLarge { size: usize, limit: usize },

    #[error("matrix is not triangular in the expected sense")]
    NotTriangular,

    #[error("step {step} (t = {time}): {what}")]
    MonitorViolation {
        step: usize,
        time: f64,
        what: String,
    },

    #[error("grids with {coarse} and {fine} points per axis do not nest")]
    NonNesting { coarse: usize, fine: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
