use thiserror::Error;

/// Errors raised by model construction, solving and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {row} of the transition matrix sums to {sum}, expected 1")]
    RowNotStochastic { row: usize, sum: f64 },

    #[error("entry ({row}, {col}) is out of range")]
    EntryOutOfRange { row: usize, col: usize },

    #[error("discount factor of state {state} is outside [0, 1]")]
    DiscountOutOfRange { state: usize },

    #[error("payoff of state {state} is not finite")]
    NonFinitePayoff { state: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state {state} is undiscounted and does not reach the target set almost surely")]
    IllPosed { state: usize },

    #[error("target set is empty but some state is undiscounted")]
    EmptyTarget,

    #[error("linear system is singular or badly conditioned (residual {residual:e})")]
    SingularSystem { residual: f64 },

    #[error("iteration produced an empty stopping set at iteration {iteration}")]
    EmptyStoppingSet { iteration: usize },

    #[error("stopping rule ordering violated: {0}")]
    RuleOrderViolation(String),

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("{capped} of {paths} paths hit the horizon cap")]
    CapDominates { capped: usize, paths: usize },

    #[error("grid anchor ({x}, {y}) lies outside the {width}x{height} grid")]
    AnchorOutOfGrid {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. } | Error::NoConvergence { .. } | Error::EmptyStoppingSet { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
