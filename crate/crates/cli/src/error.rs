use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qshhg::Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Parse(_) | CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Core(qshhg::Error::Config(_) | qshhg::Error::Domain(_)) => EXIT_VALIDATION,
            CliError::Core(qshhg::Error::Refused { .. }) => EXIT_REFUSED,
            CliError::Core(qshhg::Error::NotConverged(_)) => EXIT_NOT_CONVERGED,
            CliError::Io { .. } => EXIT_OTHER,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
