use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index range {what} out of bounds: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("SVD did not converge after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not orthogonal (deviation {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("leading block is numerically singular (sigma_k = {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("sampler starved: acceptance {accepted}/{attempts} below floor")]
    Starvation { accepted: usize, attempts: usize },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
