use thiserror::Error;

/// Errors raised by the measure, solver and leakage APIs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input vector")]
    Empty,

    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("entries sum to {sum}, expected 1 within 1e-9")]
    NotNormalized { sum: f64 },

    #[error("all entries are zero")]
    ZeroMass,

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid order {0}: must be positive")]
    InvalidOrder(f64),

    #[error("order {0} is in the Shannon window; use the Shannon quantity")]
    ShannonRegime(f64),

    #[error("order {alpha} outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("geometric mean requires positive values on the support (index {index})")]
    NonPositiveValue { index: usize },

    #[error("values of mixed sign on the support")]
    MixedSigns,

    #[error("q-exponential undefined: 1 + (1 - q) x = {base} < 0")]
    DomainError { base: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("mean structure not supported for this gain: {0}")]
    UnsupportedMeanSpec(String),

    #[error("{solver} solver did not converge after {iterations} iterations (best value {best}, last change {last_change:e})")]
    SolverDidNotConverge {
        solver: &'static str,
        iterations: usize,
        best: f64,
        last_change: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
