use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable sets differ: [{left}] vs [{right}]")]
    VarSetMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` has no binding")]
    UnboundVariable(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("operation undefined for the zero polynomial: {0}")]
    ZeroPolynomial(&'static str),

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
