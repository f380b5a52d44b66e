use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("malformed algebra spec: {0}")]
    InvalidSpec(String),
    #[error("rewriting system is not confluent: ambiguity at path {path}")]
    NonConfluent { path: String },
    #[error("path algebra is infinite-dimensional: {0}")]
    InfiniteDimension(String),
    #[error("Euler matrix routes disagree at entry ({row}, {col}): cartan route {cartan}, direct route {direct}")]
    RouteDisagreement { row: usize, col: usize, cartan: String, direct: String },
    #[error("validation failed: {check}: {detail}")]
    Validation { check: String, detail: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("slope undefined: both pairings vanish")]
    UndefinedSlope,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("data inconsistency: {0}")]
    DataInconsistency(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("relation {relation} does not vanish")]
    RelationViolation { relation: String },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse",
            Error::Domain(_) => "domain",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::NonConfluent { .. } => "non_confluent",
            Error::InfiniteDimension(_) => "infinite_dimension",
            Error::RouteDisagreement { .. } => "route_disagreement",
            Error::Validation { .. } => "validation",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::UndefinedSlope => "undefined_slope",
            Error::Precondition(_) => "precondition",
            Error::DataInconsistency(_) => "data_inconsistency",
            Error::Unsupported(_) => "unsupported",
            Error::BudgetExhausted(_) => "budget_exhausted",
            Error::Shape(_) => "shape",
            Error::RelationViolation { .. } => "relation_violation",
            Error::TypeMismatch(_) => "type_mismatch",
            Error::ContractViolation(_) => "contract_violation",
            Error::CertificateRejected(_) => "certificate_rejected",
        }
    }
}
