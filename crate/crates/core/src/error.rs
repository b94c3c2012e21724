use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid cost function: {0}")]
    InvalidCost(String),

    #[error("absolute continuity violated at index {index}")]
    AbsoluteContinuityViolation { index: usize },

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("no convergence after {iterations} iterations (gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("cost-constrained feasible set is empty (min cost {min_cost}, cap {cap})")]
    EmptyFeasibleSet { min_cost: f64, cap: f64 },

    #[error(
        "input {input} has divergence gap {gap:e} between support_tol and 10*support_tol; \
         refine the solver tolerance or adjust support_tol"
    )]
    SupportAmbiguity { input: usize, gap: f64 },

    #[error("achiever polytope is empty")]
    EmptyPolytope,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("transition matrix is not irreducible")]
    NotIrreducible,

    #[error("variance {0:e} is degenerate; rate is infinite for eps != 1/2")]
    DegenerateVariance(f64),

    #[error("enumeration of {size} outcomes exceeds the limit {limit}")]
    EnumerationTooLarge { size: u128, limit: u128 },

    #[error("type enumeration of {size} components exceeds the limit {limit}")]
    TypeEnumerationTooLarge { size: u128, limit: u128 },

    #[error("parameter condition violated: {0}")]
    ConditionViolation(String),

    #[error("root bracketing failed: {0}")]
    RootBracketFailure(String),

    #[error("polytope vertices coincide")]
    DegenerateVertices,

    #[error("iterate lost support at {0}")]
    SupportLoss(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numerical,
    Enumeration,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonConvergence { .. }
            | Error::SupportAmbiguity { .. }
            | Error::EmptyPolytope
            | Error::LpUnbounded
            | Error::DegenerateVariance(_)
            | Error::RootBracketFailure(_)
            | Error::SupportLoss(_) => ErrorClass::Numerical,
            Error::EnumerationTooLarge { .. } | Error::TypeEnumerationTooLarge { .. } => {
                ErrorClass::Enumeration
            }
            _ => ErrorClass::Validation,
        }
    }
}
