use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("invalid vector: {0}")]
    InvalidVector(&'static str),
    #[error("vector has no nonzero coordinate")]
    ZeroVector,
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("unsupported ratio-set power {0} (expected 1, 2 or 4)")]
    UnsupportedPower(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate Gaussian draw after {0} attempts")]
    DegenerateDraw(u32),
    #[error("bad interval [{a}, {b}]: need 0 < a < b")]
    BadInterval { a: f64, b: f64 },
    #[error("phase difference is a multiple of pi")]
    DegenerateAngles,
    #[error("bad parameters: {0}")]
    BadParameters(&'static str),
    #[error("tennis-ball sample is empty")]
    EmptySample,
}
