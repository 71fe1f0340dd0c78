use thiserror::Error;

/// Errors raised by the library. Every variant maps onto CLI exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed utility: {0}")]
    MalformedUtility(String),

    #[error("malformed instance: {0}")]
    MalformedInstance(String),

    #[error("enumeration limit exceeded: {what} needs {needed}, limit is {limit}")]
    EnumerationLimit {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("rule mismatch: {0}")]
    RuleMismatch(String),

    #[error("membership violation: {0}")]
    Membership(String),

    #[error("not a basis: {0}")]
    NotABasis(String),

    #[error("matroid axiom violated: {0}")]
    MatroidAxiom(String),

    #[error("cannot extend {0:?} to a basis from the given pool")]
    CannotComplete(Vec<usize>),

    #[error("unsupported constraint: {0}")]
    UnsupportedConstraint(String),

    #[error("the feasible family is empty")]
    EmptyFamily,

    #[error("instance mode: {0}")]
    Mode(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("input outside the admissible region: {0}")]
    OutOfRegion(String),

    #[error("value is irrational: {0}")]
    Irrational(String),

    #[error("premise not satisfied: {0}")]
    Premise(String),

    #[error("invalid rational literal {0:?}")]
    RationalSyntax(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn limit(what: &'static str, needed: u128, limit: u128) -> Error {
    Error::EnumerationLimit {
        what,
        needed,
        limit,
    }
}
