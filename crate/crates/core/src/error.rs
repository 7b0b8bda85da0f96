use thiserror::Error;

use crate::template::SearchDiagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced anywhere in the generator, runtime or oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty support")]
    EmptySupport,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("invalid polynomial system: {0}")]
    InvalidSystem(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid displacement: {0}")]
    InvalidDisplacement(String),
    #[error("polytope too large: bounding box holds {volume} lattice points (cap {cap})")]
    PolytopeTooLarge { volume: u128, cap: u64 },
    #[error("variable index {index} out of range for {n_vars} variables")]
    VariableOutOfRange { index: usize, n_vars: usize },
    #[error("system has {m} polynomials in {n} variables; need m >= n")]
    Underdetermined { m: usize, n: usize },
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no favourable basis found ({} candidates rejected)", diagnostics.len())]
    NoFavourableBasis { diagnostics: Vec<SearchDiagnostic> },
    #[error("cannot square template: {0}")]
    CannotSquare(String),
    #[error("template invariant violated: {0}")]
    InvariantViolation(String),
    #[error("ill-conditioned Â12: condition estimate {condition:e} exceeds {max:e}")]
    IllConditioned { condition: f64, max: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("leading coefficient is numerically zero")]
    LeadingCoefficient,
    #[error("non-generic instance: {0}")]
    NonGeneric(String),
    #[error("no valid hidden-variable template found: {0}")]
    NoHiddenVariableTemplate(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("unsupported {kind} version {found} (this build reads version {expected})")]
    UnsupportedVersion {
        kind: &'static str,
        found: u64,
        expected: u64,
    },
    #[error("artifact mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
