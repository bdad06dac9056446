use thiserror::Error;

use crate::mask::Mask;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid structure: {}", .0.join("; "))]
    InvalidStructure(Vec<String>),

    #[error("invalid set family: {0}")]
    InvalidFamily(String),

    #[error("invalid bi-convexity: {0}")]
    InvalidBiConvexity(String),

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("empty universe is not supported")]
    EmptyUniverse,

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("constant `{name}` = {value} lies outside the chosen subset")]
    ConstantOutside { name: String, value: usize },

    #[error("operation `{symbol}` is not closed on the subset at arguments {args:?}")]
    FunctionNotClosed { symbol: String, args: Vec<usize> },

    #[error("{what}: size {size} exceeds cap {cap}")]
    UniverseTooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("homomorphism count exceeds limit {limit}")]
    HomLimitExceeded { limit: usize },

    #[error("search exceeded its wall-clock budget")]
    Timeout,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("Pasch failure at stage {stage}: {detail}")]
    PaschFailure {
        stage: &'static str,
        point: Option<usize>,
        detail: String,
    },

    #[error("axioms fail: {}", .0.join(", "))]
    AxiomsFail(Vec<String>),

    #[error("constants 0 and 1 are required")]
    MissingConstants,

    #[error("element {element} has several complements: {candidates:?}")]
    DuplicateComplement {
        element: usize,
        candidates: Vec<usize>,
    },

    #[error("dual is not of the expected class: {0}")]
    S1Violation(String),

    #[error("instance {index} is not separated: {detail}")]
    NotSeparated { index: usize, detail: String },

    #[error("map is not surjective")]
    NotSurjective,

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("bi-convexity is not normal")]
    NotNormal,

    #[error("round trip failed on pair {a:#x}, {b:#x}")]
    RoundTripFailure { a: Mask, b: Mask },

    #[error("generator cap: {0}")]
    TooLargeForExhaustive(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by size caps or budgets rather than by bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            Error::UniverseTooLarge { .. }
                | Error::HomLimitExceeded { .. }
                | Error::Timeout
                | Error::TooLargeForExhaustive(_)
        )
    }
}
