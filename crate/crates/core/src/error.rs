use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module.
///
/// The CLI maps these onto exit codes: resource errors exit with 2,
/// consistency failures with 3 and everything else with 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("graph is not connected: {0}")]
    Disconnected(String),
    #[error("{what} exceeds cap of {cap}")]
    Resource { what: String, cap: usize },
    #[error("inconsistent data: {0}")]
    Data(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn resource(what: impl Into<String>, cap: usize) -> Self {
        Error::Resource {
            what: what.into(),
            cap,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource { .. } => 2,
            Error::Consistency(_) => 3,
            _ => 1,
        }
    }
}
