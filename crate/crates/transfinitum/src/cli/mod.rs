//! Expression language over every operation in the crate, plus the batch
//! runner and REPL built on it.

mod eval;
mod parse;
mod session;
mod value;

use thiserror::Error;

pub use eval::{eval, Env};
pub use parse::{parse, parse_line, Arg, BinOp, Expr};
pub use session::{run_batch, run_repl, value_from_json, Options};
pub use value::Value;

use crate::genreal::GenError;
use crate::ordinal::OrdinalError;
use crate::skand::SkandError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{line}:{col}: syntax error: expected {expected}")]
    Syntax { line: usize, col: usize, expected: String },
    #[error("TypeError: {0}")]
    Type(String),
    /// An error raised by one of the library modules, tagged by kind.
    #[error("{kind}: {msg}")]
    Domain { kind: &'static str, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } => EXIT_SYNTAX,
            CliError::Type(_) | CliError::Domain { .. } => EXIT_DOMAIN,
        }
    }

    /// The name used by `=> error <Kind>` expectations.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax { .. } => "SyntaxError",
            CliError::Type(_) => "TypeError",
            CliError::Domain { kind, .. } => kind,
        }
    }

    /// The error text without its kind prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Domain { msg, .. } | CliError::Type(msg) => msg.clone(),
            e => e.to_string(),
        }
    }

    pub(crate) fn domain(kind: &'static str, msg: impl Into<String>) -> CliError {
        CliError::Domain { kind, msg: msg.into() }
    }
}

impl From<OrdinalError> for CliError {
    fn from(e: OrdinalError) -> CliError {
        let kind = match e {
            OrdinalError::NotSubtractable(..) => "NotSubtractable",
            OrdinalError::Domain(_) => "DomainError",
            OrdinalError::TooLarge(_) => "TooLarge",
            OrdinalError::Parse { .. } => "ParseError",
        };
        CliError::domain(kind, e.to_string())
    }
}

impl From<SkandError> for CliError {
    fn from(e: SkandError) -> CliError {
        let kind = match e {
            SkandError::LengthMismatch(..) => "LengthMismatch",
            SkandError::NotSelfSimilar => "NotSelfSimilar",
            SkandError::InvalidPieces(_) => "InvalidPieces",
            SkandError::TooLarge(_) => "TooLarge",
        };
        CliError::domain(kind, e.to_string())
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> CliError {
        let kind = match e {
            GenError::InvalidUniverse(_) => "InvalidUniverse",
            GenError::OutOfUniverse(..) => "OutOfUniverse",
            GenError::UniverseMismatch(..) => "UniverseMismatch",
            GenError::UndefinedSum(_) => "UndefinedSum",
            GenError::NotSubtractable => "NotSubtractable",
            GenError::NotDivisible(_) => "NotDivisible",
            GenError::NotNested(_) => "NotNested",
            GenError::NotLess => "NotLess",
            GenError::NotDyadicLength => "NotDyadicLength",
            GenError::SameSign => "SameSign",
            GenError::EmptySet => "EmptySet",
            GenError::Unrepresentable(_) => "Unrepresentable",
            GenError::Domain(_) => "DomainError",
        };
        CliError::domain(kind, e.to_string())
    }
}
