use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sample count {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),

    #[error("sample {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("level {level} out of range (max {max})")]
    LevelOutOfRange { level: u32, max: u32 },

    #[error("coefficient index (j={j}, k={k}) out of range")]
    IndexOutOfRange { j: u32, k: usize },

    #[error("malformed pyramid: {0}")]
    MalformedPyramid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("n={n} is too small for alpha={alpha}: J0={j0} exceeds J1={j1}")]
    TooFewSamples { n: usize, alpha: f64, j0: u32, j1: u32 },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported number of vanishing moments: {0} (supported: 1..=5)")]
    UnsupportedMoments(usize),

    #[error("signal is not certified for the requested class: {0}")]
    NotCertified(String),

    #[error("inconsistent configuration: {0}")]
    InconsistentConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
