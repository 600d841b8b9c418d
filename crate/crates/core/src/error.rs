use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComaxError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("numerically singular basis at row {row}, column {col} (pivot {pivot:e})")]
    SingularBasis { row: usize, col: usize, pivot: f64 },

    #[error("secular equation has no root above the top eigenvalue (hard case)")]
    HardCase,

    #[error("budget exceeded for {what}: estimate {estimate:.3e} > limit {limit:.3e}")]
    BudgetExceeded {
        what: String,
        estimate: f64,
        limit: f64,
    },

    #[error("active hyperplanes have linearly dependent normals")]
    DependentActiveSet,

    #[error("matroid oracle violates the {0}")]
    MatroidAxiomViolation(String),

    #[error("objective contract violated: {0}")]
    ObjectiveContractViolation(String),

    #[error("oracle contract violated: {0}")]
    OracleContractViolation(String),

    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("support of size {size} exceeds sparsity budget {cap}")]
    InfeasibleSupport { size: usize, cap: usize },

    #[error("no candidate support attained an optimum")]
    NoAttainedOptimum,
}

pub type Result<T> = std::result::Result<T, ComaxError>;
