use thiserror::Error;

use crate::superalg::Parity;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands live on different charts")]
    ChartMismatch,

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),

    #[error("generator `{name}` has parity {found}, expected {expected}")]
    ParityMismatch {
        name: String,
        expected: Parity,
        found: Parity,
    },

    #[error("value is not homogeneous")]
    Inhomogeneous,

    #[error("Berezin integration over even generator `{0}`")]
    EvenIntegration(String),

    #[error("exponential of a non-nilpotent element without a truncation budget")]
    NonNilpotent,

    #[error("commutator not divisible by (-i hbar)^{order}: residual hbar exponent {exponent}")]
    Divisibility { order: u32, exponent: i32 },

    #[error("chart lacks {0}")]
    MissingStructure(&'static str),

    #[error("{0}")]
    Precondition(String),

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("fixed-point iteration did not stabilise within {0} steps")]
    NoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
