use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, values or combinations.
    #[error("{0}")]
    Usage(String),
    /// Configuration problems, all of them at once.
    #[error("{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error(transparent)]
    Compute(#[from] epdyn::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for usage and configuration errors, 1 for failures during the run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}
