use thiserror::Error;

/// Failures raised by the solvers, generators and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e} exceeds {tol:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64, tol: f64 },

    #[error("matrix must have dimension n >= 1")]
    EmptyMatrix,

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("row sums must equal 1: row {row} sums to {sum}")]
    RowSum { row: usize, sum: f64 },

    #[error("negative transition weight {value} at ({i}, {j})")]
    NegativeWeight { i: usize, j: usize, value: f64 },

    #[error("enumeration budget exceeded: {what} needs {needed:e} operations, budget is {budget:e} (raise with --budget or SPCA_BUDGET)")]
    BudgetExceeded { what: String, needed: f64, budget: f64 },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot truncate the all-zero vector")]
    ZeroVector,

    #[error("degree violation: variables {offending:?} do not occur in exactly {d} clauses")]
    DegreeViolation { d: usize, offending: Vec<usize> },

    #[error("JL sketch deviation {achieved:e} exceeds eps = {eps} after {attempts} attempts")]
    SketchFailed { achieved: f64, eps: f64, attempts: u32 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True for errors caused by an enumeration budget or size guard rather than bad input.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::SizeGuard(_))
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
