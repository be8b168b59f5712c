//! Optimal stopping of discounted Markov chains by forward improvement
//! iteration with flexible look-ahead windows.
//!
//! A [`Model`] holds a row-stochastic transition matrix, per-state discount
//! factors and a stopping payoff. [`Fii::run`] shrinks a candidate stopping
//! set until no state can be improved by looking ahead; first entrance into
//! the resulting set is optimal among rules that stop inside the candidate.

pub mod entrance;
pub mod error;
pub mod fii;
pub mod fixtures;
pub mod gridworld;
pub mod model;
pub mod model_file;
pub mod oracle;
pub mod random;
pub mod rule;
pub mod sparse;
pub mod state_set;
pub mod window;

pub use entrance::{check_wellposed, entrance_value, lookahead_values, EntranceSolver, SolveOptions, SolverKind};
pub use error::{Error, Result};
pub use fii::{constrained_optimal, improve_set, run, Fii, Improvement, IterationRecord, IterationTrace, Termination};
pub use gridworld::{build_grid, scale_grid, GridSpec};
pub use model::{DiscountedKernel, Model, ValueVector};
pub use model_file::ModelFile;
pub use random::{random_model, RandomModelSpec};
pub use rule::{ImprovedRule, ImprovedTimes, StoppingRule, Time, Trajectory};
pub use sparse::CsrMatrix;
pub use state_set::StateSet;
pub use window::{LookAheadSet, WindowSchedule};
