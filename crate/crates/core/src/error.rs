use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector is numerically zero (norm {norm:e})")]
    ZeroVector { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point lies within {angle:e} rad of the projection center")]
    IllConditioned { angle: f64 },

    #[error("point is not in the join of center and target (residual {residual:e})")]
    NotInSpan { residual: f64 },

    #[error("Plücker vector is not decomposable (relation residual {residual:e})")]
    NotDecomposable { residual: f64 },

    #[error("finite-difference step {h:e} is outside the admissible range")]
    StepTooSmall { h: f64 },

    #[error("line is outside the reduction chart: {0}")]
    NotInChart(String),

    #[error("invalid base point: {0}")]
    InvalidBase(String),

    #[error("fiber solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("sample {index} failed on base {base}: {source}")]
    SampleFailed {
        index: usize,
        base: String,
        #[source]
        source: Box<Error>,
    },

    #[error("tangent frame is rank deficient (smallest normalized singular value {min_singular:e})")]
    RankDeficient { min_singular: f64 },

    #[error("invalid cycle descriptor: {0}")]
    InvalidDescriptor(String),
}
