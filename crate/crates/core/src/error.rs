use thiserror::Error;

use crate::formats::FormatId;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid {format} encoding: {violations:?}")]
    InvalidEncoding {
        format: FormatId,
        violations: Vec<Violation>,
    },

    #[error("{0} is not a matrix format")]
    NotAMatrixFormat(FormatId),

    #[error("{0} is not a rank-3 tensor format")]
    NotATensorFormat(FormatId),

    #[error("no conversion path from {from} to {to}")]
    NoConversionPath { from: FormatId, to: FormatId },

    #[error("{format} is not a supported streaming compute format")]
    UnsupportedStreamFormat { format: FormatId },

    #[error("{format} is not a supported stationary compute format")]
    UnsupportedStationaryFormat { format: FormatId },

    #[error(
        "bus of {bus} elements/cycle cannot carry one {format} element with its metadata"
    )]
    BusTooNarrow { format: FormatId, bus: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("container error: {0}")]
    Container(String),

    #[error("generator error: {0}")]
    Generator(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A single invariant violation found by `validate`.
///
/// `index` points at the offending entry when the violation is localized
/// (e.g. the position in `row_ptr` that decreases); it is `None` for
/// whole-structure problems such as mismatched array lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub index: Option<usize>,
}

impl Violation {
    pub fn new(invariant: &'static str) -> Self {
        Violation {
            invariant,
            index: None,
        }
    }

    pub fn at(invariant: &'static str, index: usize) -> Self {
        Violation {
            invariant,
            index: Some(index),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.index {
            Some(i) => write!(f, "{} (at index {})", self.invariant, i),
            None => write!(f, "{}", self.invariant),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
