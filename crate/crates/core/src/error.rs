use thiserror::Error;

/// Errors raised across the toolkit.
///
/// The CLI maps these onto exit codes with [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("conditioning event has zero probability")]
    ZeroMassCondition,

    #[error("axis groups overlap on axis {0}")]
    OverlappingGroups(usize),

    #[error("channel is not deterministic (input {0} has a non point-mass row)")]
    NotDeterministic(usize),

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Guard(_) => 2,
            Error::Internal(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
