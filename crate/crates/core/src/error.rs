//! Error type shared by every module in the crate.
//!
//! Each variant corresponds to one failure class with a stable meaning, so
//! callers (in particular the CLI) can map errors to exit codes without
//! string matching:
//!
//! * [`Error::Validation`] — a structural invariant of an input object does
//!   not hold (first violation wins, with its location in the message).
//! * [`Error::Parameter`] — a caller-supplied parameter is outside its
//!   accepted range (for example a balancing factor below 2).
//! * [`Error::Format`] — a binary stream is malformed; carries the byte
//!   offset at which decoding failed.
//! * [`Error::Parse`] — a text input is malformed; carries the line number.
//! * [`Error::Range`] — a queried position lies outside the domain.
//! * [`Error::Internal`] — a bound that must hold by construction was
//!   violated. This is a bug indicator, never a user error.
//! * [`Error::Sink`] / [`Error::Io`] — I/O failures, the former tagged with
//!   the number of values already delivered when the sink failed.

use std::fmt;
use std::io;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// A structural invariant does not hold for the given object.
    Validation {
        /// Description of the first violated invariant and where it occurred.
        what: String,
    },
    /// A parameter is outside its accepted range.
    Parameter {
        /// Description of the offending parameter and its accepted range.
        what: String,
    },
    /// A binary stream is malformed.
    Format {
        /// Byte offset at which decoding failed.
        offset: u64,
        /// Description of the problem.
        what: String,
    },
    /// A text input is malformed.
    Parse {
        /// One-based line number at which parsing failed.
        line: u64,
        /// Description of the problem.
        what: String,
    },
    /// A queried position lies outside the valid domain `[0, bound)`.
    Range {
        /// The offending position.
        index: u64,
        /// The exclusive upper bound of the domain.
        bound: u64,
    },
    /// An internal invariant was violated; indicates a bug, not bad input.
    Internal {
        /// Description of the broken invariant.
        what: String,
    },
    /// The output sink failed after `delivered` values had been emitted.
    Sink {
        /// Number of values successfully delivered before the failure.
        delivered: u64,
        /// The underlying I/O error.
        source: io::Error,
    },
    /// An I/O failure while reading or writing a stream.
    Io(io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Validation { what } => write!(f, "validation failed: {what}"),
            Error::Parameter { what } => write!(f, "invalid parameter: {what}"),
            Error::Format { offset, what } => {
                write!(f, "malformed input at byte {offset}: {what}")
            }
            Error::Parse { line, what } => write!(f, "parse error on line {line}: {what}"),
            Error::Range { index, bound } => {
                write!(f, "position {index} out of range (domain is [0, {bound}))")
            }
            Error::Internal { what } => {
                write!(f, "internal invariant violated (this is a bug): {what}")
            }
            Error::Sink { delivered, source } => {
                write!(f, "sink failed after {delivered} values: {source}")
            }
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Sink { source, .. } => Some(source),
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::Io(e)
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for a [`Error::Validation`] with a formatted message.
    pub(crate) fn validation(what: impl Into<String>) -> Self {
        Error::Validation { what: what.into() }
    }

    /// Shorthand for a [`Error::Parameter`] with a formatted message.
    pub(crate) fn parameter(what: impl Into<String>) -> Self {
        Error::Parameter { what: what.into() }
    }

    /// Shorthand for a [`Error::Format`] at a byte offset.
    pub(crate) fn format(offset: u64, what: impl Into<String>) -> Self {
        Error::Format {
            offset,
            what: what.into(),
        }
    }

    /// Shorthand for a [`Error::Parse`] at a line number.
    pub(crate) fn parse(line: u64, what: impl Into<String>) -> Self {
        Error::Parse {
            line,
            what: what.into(),
        }
    }

    /// Shorthand for an [`Error::Internal`] with a formatted message.
    pub(crate) fn internal(what: impl Into<String>) -> Self {
        Error::Internal { what: what.into() }
    }
}
