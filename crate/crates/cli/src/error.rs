use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Harness-level failures. Per-trial numerical errors are recorded in report
/// rows instead and never surface here.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("UNSUPPORTED: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Core(#[from] tslab_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit code. Harness errors are all input-side, so 2; code 1 is
    /// reserved for failed assertions in an otherwise valid run.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
