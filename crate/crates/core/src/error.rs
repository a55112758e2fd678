use thiserror::Error;

/// Errors raised by the Heun toolkit. Each variant belongs to one module;
/// [`HeunError::module`] names it for diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeunError {
    #[error("singular points coalesce: a = {0} (a must differ from 0 and 1)")]
    DegenerateParams(String),
    #[error("non-finite parameter `{0}`")]
    NonFinite(&'static str),
    #[error("logarithmic case: {0}")]
    LogarithmicCase(String),
    #[error("point lies outside 0.9 x radius of convergence (|z - z0| = {distance}, cap = {cap})")]
    OutsideDisc { distance: f64, cap: f64 },
    #[error("series did not reach tolerance {tol:e} within {n_terms} terms (tail bound {bound:e})")]
    NotConverged { tol: f64, n_terms: usize, bound: f64 },
    #[error("evaluation at the branch point of a non-analytic Frobenius solution")]
    AtBranchPoint,
    #[error("path comes within {distance} of singular point {point} (clearance {clearance})")]
    SingularityTooClose { point: String, distance: f64, clearance: f64 },
    #[error("step limit of {0} exceeded")]
    StepLimitExceeded(usize),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("degenerate basis: Wronskian {0:e} at base point")]
    DegenerateBasis(f64),
    #[error("states given at different points")]
    MismatchedPoints,
    #[error("ill-conditioned matching system (condition number {0:e})")]
    IllConditionedMatch(f64),
    #[error("asymptotic expansion did not reach tolerance {tol:e} for any R <= {r_max}")]
    AsymptoticNotConverged { tol: f64, r_max: f64 },
    #[error("transformed equation residual {0:e} exceeds bound")]
    DerivationInconsistent(f64),
    #[error("no roots found in region")]
    NoRootsFound,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("evaluation at a singular point")]
    AtSingularity,
    #[error("c = {0} is a non-positive integer")]
    PoleInC(String),
    #[error("|z| = {0} outside the series domain |z| <= 0.75")]
    OutsideSeriesDomain(f64),
    #[error("oracle did not converge: {0}")]
    OracleNotConverged(String),
}

impl HeunError {
    /// Name of the module that raises this error.
    pub fn module(&self) -> &'static str {
        use HeunError::*;
        match self {
            DegenerateParams(_) | NonFinite(_) => "heun-params",
            LogarithmicCase(_) | OutsideDisc { .. } | NotConverged { .. } | AtBranchPoint => "frobenius",
            SingularityTooClose { .. } | StepLimitExceeded(_) | InvalidPath(_) | DegenerateBasis(_) => {
                "continuation"
            }
            MismatchedPoints | IllConditionedMatch(_) => "connection",
            AsymptoticNotConverged { .. } | DerivationInconsistent(_) | NoRootsFound => "spectral",
            AtSingularity | PoleInC(_) | OutsideSeriesDomain(_) | OracleNotConverged(_) => "oracles",
            InvalidInput(_) => "input",
        }
    }

    /// True for errors caused by malformed input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            HeunError::DegenerateParams(_)
                | HeunError::NonFinite(_)
                | HeunError::InvalidInput(_)
                | HeunError::InvalidPath(_)
                | HeunError::MismatchedPoints
                | HeunError::PoleInC(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, HeunError>;
