//! Independent reference computations used to cross-check the solver.

pub mod bellman;
pub mod dense;
pub mod lemma;
pub mod simulate;

pub use bellman::{bellman_value, exhaustive_optimal, BellmanResult};
pub use lemma::{lemma_property_check, Lemma, LemmaCheck, LemmaReport};
pub use simulate::{simulate, Moments, SimulationReport};
