use thiserror::Error;

/// Errors produced by the algebra, linkage, tracing and fitting layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("all generators are zero")]
    EmptyIdeal,
    #[error("computation cancelled: deadline expired")]
    Cancelled,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid linkage: {0}")]
    InvalidSpec(String),
    #[error("coupler point coincides with E (u = v = 0); use the unreduced system")]
    DegenerateCoupler,
    #[error("linkage cannot be assembled at theta = {theta}")]
    NoAssembly { theta: f64 },
    #[error("invalid degree {0}: must be at least 1")]
    InvalidDegree(i64),
    #[error("degree {degree} needs at least {needed} points, got {got}")]
    InsufficientPoints { degree: u32, needed: usize, got: usize },
    #[error("points do not determine a unique curve (nullity {nullity})")]
    RankDeficient { nullity: usize },
    #[error("no curve of the requested degree passes through all points")]
    NoCurve,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
