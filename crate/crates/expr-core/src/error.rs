use thiserror::Error;

/// Errors produced while building or manipulating expressions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by a symbolically zero denominator")]
    DivisionByZero,
    #[error("zero cannot be raised to a negative power")]
    ZeroToNegativePower,
    #[error("exponent must be a rational constant")]
    NonConstantExponent,
    #[error("fractional power of a non-atomic expression (declare a defined atom instead)")]
    FractionalPowerOfNonAtom,
    #[error("{0} has no exact rational root of degree {1}")]
    NoExactRoot(String, u32),
    #[error("missing binding for jet variable {0} in total substitution")]
    MissingJetBinding(String),
    #[error("rewrite budget exceeded while normalizing (cyclic atom relations?)")]
    RewriteBudget,
    #[error("defined atom {atom} has no relation of degree <= 2; cannot clear it from a denominator")]
    UnclearableDenominator { atom: String },
    #[error("{0}")]
    Context(#[from] ContextError),
}

/// Errors raised while declaring names in a [`crate::Context`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("name `{0}` is already declared")]
    DuplicateName(String),
    #[error("`{0}` is a reserved word")]
    ReservedName(String),
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{name}` is declared as {actual}, expected {expected}")]
    WrongKind {
        name: String,
        actual: &'static str,
        expected: &'static str,
    },
    #[error("relation for `{0}` must not mention `{0}` or later-declared atoms")]
    RecursiveRelation(String),
    #[error("relation degree must be at least 1")]
    ZeroDegreeRelation,
}

/// Parse errors carry the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }

    /// Shift the reported position, for parsers embedding expression slices
    /// in a larger source file.
    pub fn offset(mut self, by: usize) -> Self {
        self.pos += by;
        self
    }
}

/// Errors from numeric evaluation of an expression.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no numeric value for {0}")]
    MissingValue(String),
    #[error("ln of a non-positive value ({0})")]
    LnDomain(f64),
    #[error("even root of a negative value ({0})")]
    RootDomain(f64),
    #[error("numeric division by zero")]
    DivisionByZero,
    #[error("defined atom {0} has no relation and no direct value")]
    NoAtomValue(String),
    #[error("non-finite value encountered")]
    NonFinite,
}
