use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("not an eigentensor: residual {residual:.3e} exceeds {bound:.3e}")]
    NotEigen { residual: f64, bound: f64 },
    #[error("invalid spacetime: {0}")]
    Spacetime(String),
    #[error("invalid region: {0}")]
    Region(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("nonzero charge {0:.3e}")]
    Charge(f64),
    #[error("degree {degree} exceeds truncation {max}")]
    TruncationOverflow { degree: usize, max: usize },
    #[error("size guard: {0}")]
    TooLarge(String),
    #[error("scenario {name}: {msg}")]
    Scenario { name: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
