use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),

    #[error("{supports} supports exceed the enumeration cap of {cap}")]
    TooManySupports { supports: u128, cap: u128 },

    #[error("no starting point with strictly positive fitted rates")]
    InfeasibleStart,

    #[error("constraint radius {epsilon} is below the smallest achievable SQJSD {achievable}")]
    InfeasibleEpsilon { epsilon: f64, achievable: f64 },

    #[error("percentile mode requires at least {required} samples, got {actual}")]
    MissingSamples { required: usize, actual: usize },

    #[error("samples have zero variance")]
    DegenerateSamples,
}
