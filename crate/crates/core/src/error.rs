use thiserror::Error;

use crate::semigroup::Element;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element index {index} out of range for a semigroup of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("element {element:?} is outside the carrier domain: {reason}")]
    DomainViolation { element: Element, reason: String },

    #[error("order {order} exceeds the enumeration bound {bound}")]
    OrderTooLarge { order: usize, bound: usize },

    #[error("associativity fails at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("sigma is not an involutive automorphism: {0}")]
    NotAnInvolution(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed complex literal `{0}`")]
    ComplexLiteral(String),

    #[error("the zero function is not a valid non-zero multiplicative function")]
    ZeroCharacter,

    #[error("function is not multiplicative: {0}")]
    NotMultiplicative(String),

    #[error("invalid family descriptor: {0}")]
    Descriptor(String),

    #[error("function does not vanish on S^2 at {0:?}")]
    NotVanishingOnSquare(Element),

    #[error("family 7 h-spec violates condition {condition}: {detail}")]
    HCondition { condition: &'static str, detail: String },

    #[error("input pair is not a solution (max residual {0:e})")]
    NotASolution(f64),

    #[error("value is not exactly representable: {0}")]
    Inexact(String),

    #[error("operation requires a finite carrier")]
    RequiresFinite,

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("name `{0}` is already registered")]
    DuplicateName(String),

    #[error("function does not match the carrier: {0}")]
    FunctionShape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
