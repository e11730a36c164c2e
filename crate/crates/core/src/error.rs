use std::path::PathBuf;

use thiserror::Error;

use crate::field::Point2;

/// Errors raised while parsing the field DSL.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at {line}:{column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("non-integer trig mode {value} on torus at {line}:{column}")]
    NonIntegerMode {
        value: f64,
        line: usize,
        column: usize,
    },
    #[error("invalid bump parameters at {line}:{column}: {message}")]
    InvalidBump {
        line: usize,
        column: usize,
        message: String,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::UnknownIdentifier { line, column, .. }
            | ParseError::NonIntegerMode { line, column, .. }
            | ParseError::InvalidBump { line, column, .. } => (*line, *column),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("fixed-point iteration diverged at ({q}, {p}) with step {step}", q = point.q, p = point.p)]
    FixedPointDivergence { point: Point2, step: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Process exit code: 1 for bad input, 2 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FixedPointDivergence { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
