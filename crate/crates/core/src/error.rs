use thiserror::Error;

/// Errors produced by the spectral and propagator routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a system needs at least 2 levels, got {0}")]
    TooFewLevels(usize),
    #[error("coupling g_{index} = {value} must be strictly positive and finite")]
    InvalidCoupling { index: usize, value: f64 },
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("closed-form eigenvalues exist only for 2 <= n <= 7, got n = {0}")]
    ClosedFormUnsupported(usize),
    #[error("cubic has non-real roots (discriminant q^2 + 4p^3 = {discriminant:e})")]
    ComplexCubicRoots { discriminant: f64 },
    #[error("root {index} did not converge within {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    #[error("spectrum is degenerate: minimum gap {gap_min:e} below threshold {threshold:e}")]
    DegenerateSpectrum { gap_min: f64, threshold: f64 },
    #[error("initial state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("level index {index} out of range for {n} levels")]
    LevelOutOfRange { index: usize, n: usize },
    #[error("U(t = {t}) has unitarity defect {defect:e} above {tolerance:e}")]
    UnitarityLoss { t: f64, defect: f64, tolerance: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
