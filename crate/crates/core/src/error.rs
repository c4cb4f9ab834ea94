use thiserror::Error;

/// Errors produced by the estimator library and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RiskError {
    #[error("sample must contain at least one value")]
    EmptySample,

    #[error("sample contains a non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("dimension mismatch: weights have length {weights}, sample has length {sample}")]
    DimensionMismatch { weights: usize, sample: usize },

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("permutation oracle supports n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level alpha = {alpha} is incompatible with sample size n = {n}: {reason}")]
    LevelSize { alpha: f64, n: usize, reason: String },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("estimator failed on input {input:?}: {reason}")]
    EstimatorFailure { input: Vec<f64>, reason: String },

    #[error("response to cash shifts is not affine (defect {defect:e})")]
    NotAffine { defect: f64 },

    #[error("estimator is not a comonotonic law-invariant CRE: {0}")]
    NotComonotonic(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cell {cell} failed: {reason}")]
    Cell { cell: String, reason: String },

    #[error("table is incomplete: {0}")]
    IncompleteTable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, RiskError>;
