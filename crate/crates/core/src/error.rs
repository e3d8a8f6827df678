//! Error types shared by the parser, the engines and the command line.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A precondition or internal invariant of an algorithm was violated.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("{0}")]
    Usage(String),
    /// A conflict budget or deadline ran out before a verdict.
    #[error("resource budget exhausted")]
    Budget,
}

pub type Result<T> = std::result::Result<T, Error>;
