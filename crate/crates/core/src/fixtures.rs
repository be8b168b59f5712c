//! Small reference models.

use crate::model::Model;
use crate::state_set::StateSet;

/// Index of each state of [`five_state_chain`].
pub mod five {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const C: usize = 2;
    pub const D: usize = 3;
    pub const E: usize = 4;
}

/// Five-state chain on which the uncapped improvement rule fails.
///
/// From `a` the chain moves to `b`, `c` or `d` with probability 1/3 each;
/// `c -> b` and `d -> e` surely; `b` and `e` are absorbing. Payoffs are
/// `(3, 4, 1.5, 2.5, 2)` and there is no discounting.
pub fn five_state_chain() -> Model {
    use five::*;
    let third = 1.0 / 3.0;
    let transitions = [
        (A, B, third),
        (A, C, third),
        (A, D, third),
        (B, B, 1.0),
        (C, B, 1.0),
        (D, E, 1.0),
        (E, E, 1.0),
    ];
    Model::from_triplets(5, &transitions, vec![1.0; 5], vec![3.0, 4.0, 1.5, 2.5, 2.0])
        .and_then(|m| m.with_labels(["a", "b", "c", "d", "e"].map(String::from).to_vec()))
        .expect("fixture is valid")
}

/// Helper for writing sets of [`five_state_chain`] by state letters.
pub fn five_set(states: &[usize]) -> StateSet {
    StateSet::from_states(5, states.iter().copied()).expect("indices < 5")
}
