use std::fmt;
use std::process::ExitCode;

/// Failure classes, one per nonzero exit code.
#[derive(Debug)]
pub enum CliError {
    /// A bench case missed its threshold.
    Acceptance(String),
    /// Bad arguments, unreadable or malformed input.
    Usage(String),
    /// The solver itself failed.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Acceptance(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Acceptance(m) => write!(f, "acceptance failure: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<gdam::Error> for CliError {
    fn from(e: gdam::Error) -> Self {
        use gdam::Error::*;
        match e {
            Parse { .. } | UnknownProblemId(_) | Io(_) | InvalidConfig(_) | Domain(_) | DimensionMismatch { .. }
            | IndexMismatch(_) | InfeasibleStart { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
