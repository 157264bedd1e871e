use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid record `{id}`: {message}")]
    Validation { id: String, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("partition `{0}` is empty after filtering; no model can be built")]
    EmptyPartition(String),

    #[error("insufficient data: need at least {required} observations, have {available}")]
    InsufficientData { required: usize, available: usize },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("singular design: column(s) {} are linearly dependent on earlier columns", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    #[error("no well-formed training set can be formed: {0}")]
    NoFolds(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error: 2 for configuration and usage
    /// problems, 3 for everything data related.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) => 2,
            _ => 3,
        }
    }
}
