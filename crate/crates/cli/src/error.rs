use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("verification failed:\n{0}")]
    Verification(String),
    #[error("{0}")]
    Cap(qlump_core::Error),
    #[error("{0}")]
    Numeric(qlump_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Cap(_) => 4,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        })
    }
}

impl From<qlump_core::Error> for CliError {
    fn from(e: qlump_core::Error) -> Self {
        use qlump_core::Error as E;
        match e {
            E::CapExceeded { .. } => CliError::Cap(e),
            E::NoConvergence { .. } | E::NotHermitian { .. } => CliError::Numeric(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
