use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("capacity profile is empty")]
    EmptyProfile,

    #[error("binary matrix is singular")]
    SingularMatrix,

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_range(what: &'static str, value: impl std::fmt::Display, range: &'static str) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            range,
        }
    }

    pub(crate) fn length(what: &'static str, expected: usize, found: usize) -> Self {
        Error::LengthMismatch { what, expected, found }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
