//! Forward improvement iteration with flexible look-ahead windows.
//!
//! Starting from a candidate stopping set `B^0`, each iteration keeps only
//! the states where stopping beats every look-ahead value in the current
//! window:
//!
//! ```text
//! B^{*D} = { z in B : g(z) >= h_{B,p}(z) for all p in D }
//! ```
//!
//! The sets shrink until a window containing depth 1 leaves them unchanged.
//! First entrance into that final set is optimal among rules stopping in
//! `B^0`.

use std::time::{Duration, Instant};

use crate::entrance::{EntranceSolver, SolveOptions};
use crate::error::{Error, Result};
use crate::model::{Model, ValueVector};
use crate::rule::{ImprovedRule, StoppingRule};
use crate::state_set::StateSet;
use crate::window::{LookAheadSet, WindowSchedule};

/// States with `g(z) >= h(z) - TIE_TOL` count as ties and are kept.
pub const TIE_TOL: f64 = 1e-9;

/// One application of the improvement operator.
#[derive(Debug, Clone)]
pub struct Improvement {
    pub set: StateSet,
    /// `h_{B,0}` of the input set.
    pub entrance_values: ValueVector,
    pub matvecs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    pub window: LookAheadSet,
    /// Depth 1 had to be added before convergence could be declared.
    pub augmented: bool,
    pub size_before: usize,
    pub size_after: usize,
    pub removed: Vec<usize>,
    /// `h_{B,0}` of the set entering this iteration.
    pub values: ValueVector,
    pub matvecs: usize,
    pub wall: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// A window containing depth 1 left the set unchanged.
    Fixpoint,
    /// As `Fixpoint`, after depth 1 was added to a window lacking it.
    FixpointAfterAugmentation,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub initial: StateSet,
    pub records: Vec<IterationRecord>,
    pub final_set: StateSet,
    /// `h_{F,0}`.
    pub final_values: ValueVector,
    pub termination: Termination,
}

impl IterationTrace {
    /// Iterations, including the final confirming one.
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Iterations that removed at least one state.
    pub fn improving_iterations(&self) -> usize {
        self.records.iter().filter(|r| !r.removed.is_empty()).count()
    }

    pub fn total_matvecs(&self) -> usize {
        self.records.iter().map(|r| r.matvecs).sum()
    }

    /// One linear solve per iteration.
    pub fn total_solves(&self) -> usize {
        self.records.len()
    }

    pub fn total_wall(&self) -> Duration {
        self.records.iter().map(|r| r.wall).sum()
    }

    /// `B^0, B^1, ..., F`.
    pub fn sets(&self) -> Vec<StateSet> {
        let mut sets = vec![self.initial.clone()];
        for r in &self.records {
            let mut next = sets.last().expect("nonempty").clone();
            for &z in &r.removed {
                next.remove(z);
            }
            sets.push(next);
        }
        sets
    }
}

/// Runs improvement steps and full iterations on one model.
#[derive(Debug, Clone)]
pub struct Fii<'a> {
    solver: EntranceSolver<'a>,
}

impl<'a> Fii<'a> {
    pub fn new(model: &'a Model) -> Self {
        Self {
            solver: EntranceSolver::new(model),
        }
    }

    pub fn with_options(model: &'a Model, options: SolveOptions) -> Self {
        Self {
            solver: EntranceSolver::with_options(model, options),
        }
    }

    pub fn model(&self) -> &'a Model {
        self.solver.model()
    }

    pub fn solver(&self) -> &EntranceSolver<'a> {
        &self.solver
    }

    /// `B^{*D}`.
    pub fn improve(&self, set: &StateSet, depths: &LookAheadSet) -> Result<Improvement> {
        if set.is_empty() {
            return Err(Error::InvalidParameter("candidate stopping set is empty".into()));
        }
        let h0 = self.solver.entrance_value(set)?;
        let kept = self.improve_from(set, &h0, depths)?;
        Ok(Improvement {
            set: kept,
            entrance_values: h0,
            matvecs: depths.max(),
        })
    }

    fn improve_from(&self, set: &StateSet, h0: &ValueVector, depths: &LookAheadSet) -> Result<StateSet> {
        let g = self.model().payoff();
        let values = self.solver.lookahead_from(h0, depths.depths())?;
        let mut kept = set.clone();
        for z in set.iter() {
            if values.values().any(|h| g[z] < h[z] - TIE_TOL) {
                kept.remove(z);
            }
        }
        Ok(kept)
    }

    /// `(i, B^{*D_{<=i}})` for each `i` in `D`, ascending.
    pub fn improve_family(&self, set: &StateSet, depths: &LookAheadSet) -> Result<Vec<(usize, StateSet)>> {
        let g = self.model().payoff();
        let h0 = self.solver.entrance_value(set)?;
        let values = self.solver.lookahead_from(&h0, depths.depths())?;
        let mut current = set.clone();
        let mut family = Vec::with_capacity(values.len());
        for (&i, h) in &values {
            for z in set.iter() {
                if g[z] < h[z] - TIE_TOL {
                    current.remove(z);
                }
            }
            family.push((i, current.clone()));
        }
        Ok(family)
    }

    /// Iterates `B^k = (B^{k-1})^{*D_k}` until a window containing depth 1
    /// leaves the set unchanged.
    pub fn run(&self, initial: &StateSet, schedule: &WindowSchedule) -> Result<IterationTrace> {
        schedule.validate()?;
        let n = self.model().n_states();
        if initial.universe() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: initial.universe(),
            });
        }
        if initial.is_empty() {
            return Err(Error::InvalidParameter("initial stopping set is empty".into()));
        }

        let mut current = initial.clone();
        let mut records = Vec::new();
        // Every non-final iteration removes a state.
        for iteration in 1..=n + 1 {
            let started = Instant::now();
            let mut window = schedule.window(iteration);
            let Improvement {
                set: mut next,
                entrance_values,
                mut matvecs,
            } = self.improve(&current, &window)?;
            let mut augmented = false;
            if next == current && !window.contains(1) {
                window = window.with_one();
                augmented = true;
                next = self.improve_from(&current, &entrance_values, &window)?;
                matvecs += window.max();
            }
            let removed: Vec<usize> = current.difference(&next).iter().collect();
            records.push(IterationRecord {
                iteration,
                window,
                augmented,
                size_before: current.len(),
                size_after: next.len(),
                removed,
                values: entrance_values,
                matvecs,
                wall: started.elapsed(),
            });
            if next.is_empty() {
                return Err(Error::EmptyStoppingSet { iteration });
            }
            if next == current {
                let termination = if augmented {
                    Termination::FixpointAfterAugmentation
                } else {
                    Termination::Fixpoint
                };
                let final_values = records.last().expect("just pushed").values.clone();
                return Ok(IterationTrace {
                    initial: initial.clone(),
                    records,
                    final_set: next,
                    final_values,
                    termination,
                });
            }
            current = next;
        }
        unreachable!("stopping set cannot shrink more than n times")
    }

    /// The optimal stopping set within `initial` and its value `h_{F,0}`.
    pub fn constrained_optimal(
        &self,
        initial: &StateSet,
        schedule: &WindowSchedule,
    ) -> Result<(StateSet, ValueVector)> {
        let trace = self.run(initial, schedule)?;
        Ok((trace.final_set, trace.final_values))
    }

    /// Builds the improved rule of `rho` with respect to `(B, D, sigma)`.
    pub fn improved_rule(
        &self,
        base: &StateSet,
        depths: &LookAheadSet,
        sigma: StoppingRule,
        rho: StoppingRule,
    ) -> Result<ImprovedRule> {
        let family = self.improve_family(base, depths)?;
        let improved = family.last().expect("D is nonempty").1.clone();
        Ok(ImprovedRule {
            base: base.clone(),
            depths: depths.clone(),
            improved,
            family,
            sigma,
            rho,
            capped: true,
        })
    }

    /// The same construction without the cap at `tau_sigma(B^{*D})`.
    pub fn uncapped_rule(
        &self,
        base: &StateSet,
        depths: &LookAheadSet,
        sigma: StoppingRule,
        rho: StoppingRule,
    ) -> Result<ImprovedRule> {
        Ok(ImprovedRule {
            capped: false,
            ..self.improved_rule(base, depths, sigma, rho)?
        })
    }
}

/// `B^{*D}` with the default solver.
pub fn improve_set(model: &Model, set: &StateSet, depths: &LookAheadSet) -> Result<StateSet> {
    Fii::new(model).improve(set, depths).map(|imp| imp.set)
}

/// Full iteration with the default solver.
pub fn run(model: &Model, initial: &StateSet, schedule: &WindowSchedule) -> Result<IterationTrace> {
    Fii::new(model).run(initial, schedule)
}

/// Optimal stopping set within `initial` and its value vector.
pub fn constrained_optimal(
    model: &Model,
    initial: &StateSet,
    schedule: &WindowSchedule,
) -> Result<(StateSet, ValueVector)> {
    Fii::new(model).constrained_optimal(initial, schedule)
}
