use std::fmt;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    VerifyFailed(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::VerifyFailed(m) => write!(f, "verification failed: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<bohmz_core::Error> for CliError {
    fn from(e: bohmz_core::Error) -> Self {
        match e {
            bohmz_core::Error::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
