//! CLI error kinds mapped to process exit codes.

/// Exit codes: 1 configuration, 2 numerical failure, 3 I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<awva_core::Error> for CliError {
    fn from(err: awva_core::Error) -> Self {
        match err {
            awva_core::Error::Config(_)
            | awva_core::Error::Shape(_)
            | awva_core::Error::Grouping(_) => CliError::Config(err.to_string()),
            awva_core::Error::Degenerate(_) | awva_core::Error::UndefinedSnr => {
                CliError::Numerical(err.to_string())
            }
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
