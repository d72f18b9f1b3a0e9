//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of special-function evaluation, series summation, quadrature,
/// catalog parsing and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no convergence after {iterations} iterations in {context}")]
    NonConvergence { context: String, iterations: usize },

    #[error("pole at the origin: {0}")]
    PoleAtOrigin(String),

    #[error("pole at non-positive integer argument {0}")]
    PoleAtNonpositiveInteger(f64),

    #[error("Hurwitz zeta has a pole at s = 1")]
    PoleAtSOne,

    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("argument outside the closed unit disk: |z| = {0}")]
    DomainOutsideUnitDisk(f64),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("lower parameter {0} is a non-positive integer")]
    LowerParameterPole(f64),

    #[error("need at least {needed} terms, got {got}")]
    InsufficientTerms { needed: usize, got: usize },

    #[error("non-integrable singularity: {0}")]
    NonIntegrableSingularity(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("record {id}: invalid field {field}: {message}")]
    ValidationError {
        id: String,
        field: String,
        message: String,
    },

    #[error("unbound parameter {0}")]
    UnboundParameter(String),

    #[error("evaluation failed at {path}: {message}")]
    EvaluationError { path: String, message: String },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("unknown identity id {0}")]
    UnknownId(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn non_convergence(context: impl Into<String>, iterations: usize) -> Self {
        Error::NonConvergence {
            context: context.into(),
            iterations,
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::DomainViolation(message.into())
    }
}
