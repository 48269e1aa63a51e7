//! Error types shared across the crate.

use thiserror::Error;

/// Coarse classification used by callers to map errors onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input: bad expression source, bad configuration value.
    Config,
    /// Numerical failure while computing: singular factorization, lost identity.
    Numerical,
    /// A documented precondition of an operation does not hold.
    Precondition,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("empty expression source")]
    EmptySource,

    #[error("division by zero while evaluating `{subexpr}`")]
    DivisionByZero { subexpr: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Hurst index {0} outside the admissible range")]
    HurstOutOfRange(f64),

    #[error("grid must have at least one step")]
    EmptyGrid,

    #[error("time horizon must be positive, got {0}")]
    NonPositiveHorizon(f64),

    #[error(
        "n = {n} exceeds the Cholesky sampling limit {limit}; \
         enable circulant embedding for larger grids"
    )]
    CholeskyLimitExceeded { n: usize, limit: usize },

    #[error("fractional Gaussian noise covariance is not positive definite (n = {n})")]
    NonPsdCovariance { n: usize },

    #[error(
        "circulant embedding has eigenvalue {value:.3e} below -{tol:.1e} of the largest; \
         the embedding is not nonnegative definite"
    )]
    NegativeCirculantEigenvalue { value: f64, tol: f64 },

    #[error("interval is empty: lo = {lo} > hi = {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("tube gap violation at t = {t}: l = {lower} >= u = {upper}")]
    TubeGapViolation { t: f64, lower: f64, upper: f64 },

    #[error("x0 = {x0} outside C(0) = [{lower}, {upper}]")]
    InitialStateOutsideTube { x0: f64, lower: f64, upper: f64 },

    #[error("noise array has length {got}, expected {expected}")]
    NoiseLengthMismatch { got: usize, expected: usize },

    #[error("noise array must start at zero, got {0}")]
    NoiseNonzeroStart(f64),

    #[error("tube gap {gap} at t = {t} does not exceed twice the contact tolerance {tol}")]
    GapTooSmallForTolerance { t: f64, gap: f64, tol: f64 },

    #[error("regime transition at grid index {index}: the reflection derivative is undefined there")]
    RegimeTransition { index: usize },

    #[error(
        "regime {regime} at grid index {index} is inconsistent with the normal cone \
         (computed ydot = {ydot})"
    )]
    NormalConeInconsistency {
        regime: &'static str,
        index: usize,
        ydot: f64,
    },

    #[error("internal cross-check failed: {0}")]
    CrossCheckFailed(String),

    #[error("evaluation time {t} outside [0, {horizon}]")]
    EvalTimeOutOfRange { t: f64, horizon: f64 },

    #[error("time {t} does not lie on the grid (nearest node at {nearest})")]
    TimeNotOnGrid { t: f64, nearest: f64 },

    #[error(
        "kernel support [{lo}, {hi}] around t = {t} leaves the observation window [0, {horizon}]"
    )]
    SupportViolation {
        t: f64,
        lo: f64,
        hi: f64,
        horizon: f64,
    },

    #[error("kernel support must start at A >= 0 for the bias study, got A = {0}")]
    NegativeSupportStart(f64),

    #[error("mismatched grids: {0}")]
    MismatchedGrids(String),

    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),

    #[error("risk values must be positive for log-log regression, got {0}")]
    NonPositiveRisk(f64),

    #[error("need at least {need} data points, got {got}")]
    NotEnoughPoints { need: usize, got: usize },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Syntax { .. } | UnknownIdentifier { .. } | EmptySource | InvalidConfig(_) => {
                ErrorKind::Config
            }
            DivisionByZero { .. }
            | NonPsdCovariance { .. }
            | NegativeCirculantEigenvalue { .. }
            | TubeGapViolation { .. }
            | CrossCheckFailed(_)
            | NonPositiveRisk(_) => ErrorKind::Numerical,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
