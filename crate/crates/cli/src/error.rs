use std::fmt;

/// CLI failure with its process exit code: 1 usage, 2 numeric-domain
/// rejection, 3 internal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        CliError::Internal(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Internal(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self {
            CliError::Usage(_) => "usage error",
            CliError::Domain(_) => "domain error",
            CliError::Internal(_) => "internal error",
        };
        write!(f, "{kind}: {}", self.message())
    }
}

impl From<pittlab::Error> for CliError {
    fn from(e: pittlab::Error) -> Self {
        match e {
            pittlab::Error::Internal(m) => CliError::Internal(m),
            pittlab::Error::Domain(m) => CliError::Domain(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("i/o: {e}"))
    }
}
