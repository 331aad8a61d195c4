use helmholtz_lp::Error;
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    Config(String),
    Core(Error),
    Io(std::io::Error),
    /// Some selftest checks failed.
    Selftest(Vec<String>),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Machine-readable error written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    /// 2 for configuration and precondition errors, 3 for numerical
    /// failures, 4 for I/O and file-format errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 4,
            CliError::Selftest(_) => 3,
            CliError::Core(e) => match e {
                Error::NoConvergence { .. }
                | Error::NotInX0 { .. }
                | Error::NoContraction { .. }
                | Error::IterationLimit { .. }
                | Error::Disagreement(_) => 3,
                Error::Format(_) | Error::Io(_) => 4,
                _ => 2,
            },
        }
    }

    fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "Config".into(),
            CliError::Io(_) => "Io".into(),
            CliError::Selftest(_) => "SelftestFailed".into(),
            CliError::Core(e) => {
                // Variant name: the Debug output up to the first delimiter.
                let debug = format!("{e:?}");
                debug.split(['(', ' ', '{']).next().unwrap_or_default().to_string()
            }
        }
    }

    pub fn report(&self) -> ErrorReport {
        let message = match self {
            CliError::Config(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
            CliError::Io(e) => e.to_string(),
            CliError::Selftest(failed) => format!("failed checks: {}", failed.join(", ")),
        };
        ErrorReport {
            error: self.kind(),
            message,
            exit_code: self.exit_code(),
        }
    }
}
