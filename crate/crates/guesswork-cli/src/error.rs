use std::fmt;

/// CLI failure modes, each with a fixed exit code:
/// 1 verification failure, 2 configuration error, 3 numeric error,
/// 4 resource cap exceeded.
#[derive(Debug)]
pub enum CliError {
    VerificationFailed(Vec<String>),
    Config(String),
    Numeric(String),
    ResourceCap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::ResourceCap(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::VerificationFailed(names) => {
                write!(f, "verification failed: {}", names.join(", "))
            }
            CliError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric failure: {msg}"),
            CliError::ResourceCap(msg) => write!(f, "resource cap: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<guesswork_core::Error> for CliError {
    fn from(err: guesswork_core::Error) -> Self {
        use guesswork_core::Error as E;
        match err {
            E::EnumerationCapExceeded { .. } | E::JointCapExceeded { .. } => {
                CliError::ResourceCap(err.to_string())
            }
            E::Numeric(_) => CliError::Numeric(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {err}"))
    }
}
