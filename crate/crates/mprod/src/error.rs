use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("transform matrix is numerically singular (pivot ratio {pivot_ratio:.3e})")]
    SingularTransform { pivot_ratio: f64 },

    #[error("frontal slice {slice} is numerically singular in the transform domain")]
    SingularSlice { slice: usize },

    #[error("zero diagonal entry at ({row},{row}) of transform-domain slice {slice}")]
    ZeroDiagonal { slice: usize, row: usize },

    #[error("splitting is inconsistent: ||F - G - A|| = {defect:.3e}")]
    InconsistentSplitting { defect: f64 },

    #[error("system A *_M X *_M B = C is inconsistent")]
    InconsistentSystem,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}
