//! Shared inputs for the solver benchmarks.

use flexstop_core::{build_grid, GridSpec, Model, RandomModelSpec};

pub fn toy_grid() -> Model {
    build_grid(&GridSpec::toy()).expect("toy grid is valid")
}

pub fn large_grid() -> Model {
    build_grid(&GridSpec::large()).expect("large grid is valid")
}

pub fn random_chain(n: usize, seed: u64) -> Model {
    RandomModelSpec::new(n)
        .out_degree(8)
        .alpha(0.9, 0.99)
        .generate(seed)
        .expect("valid spec")
}
