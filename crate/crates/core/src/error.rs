use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("generating set does not reach element {0}")]
    NotGenerating(usize),

    #[error("free group ball with {words} words exceeds the budget of {budget}")]
    BallTooLarge { words: usize, budget: usize },

    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<i32>),

    #[error("element lies outside the truncated ball")]
    OutsideBall,

    #[error("operation requires a finite group")]
    RequiresFiniteGroup,

    #[error("operation requires a free group ball")]
    RequiresFreeBall,

    #[error("invalid exponent p = {0}")]
    InvalidExponent(f64),

    #[error("invalid length function: {0}")]
    InvalidLength(String),

    #[error("length is not conditionally negative (min eigenvalue {min_eigenvalue:e})")]
    NotConditionallyNegative { min_eigenvalue: f64 },

    #[error("cocycle action is inconsistent: {0}")]
    InconsistentAction(String),

    #[error("cocycle action is only partially defined on the truncated ball")]
    PartialAction,

    #[error("symbol undefined at element {0}")]
    MissingSymbol(usize),

    #[error("element set is not a subgroup")]
    NotSubgroup,

    #[error("element has Fourier mass {0:e} on the zero set of the length")]
    NotMeanZero(f64),

    #[error("route disagreement in {what}: gap {gap:e} > tol {tol:e}")]
    RouteMismatch { what: String, gap: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not a branch partition: {0}")]
    NotPartition(String),

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::RouteMismatch { .. })
    }
}
