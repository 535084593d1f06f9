use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("no records")]
    NoRecords,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A requested group contains no samples. Kept distinct from zero-valued
    /// statistics so reports can say so explicitly.
    #[error("empty group")]
    EmptyGroup,

    #[error("series {index} does not share the horizon grid of series 0")]
    GridMismatch { index: usize },

    #[error("need at least {needed} levels, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("singular design: process parameter has zero variance")]
    SingularDesign,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("covariance matrix is not positive semi-definite")]
    NonPsdCovariance,

    #[error("invalid scenario: {0}")]
    Scenario(String),
}
