//! Exact checks of the two partial-improvement inequalities behind the
//! improved stopping rule.
//!
//! Both compare `E[1_A X_n]` with `E[1_A X_{tau_{n+j}(B)}]` for events `A`
//! observable at time `n`. Such events are built here as "the path was in
//! `W` at time `m < n` (optional) and is in `Y` at time `n`", and both sides
//! are computed exactly by pushing the starting distribution forward
//! through dense `Psi` and contracting with `g` or with the dense
//! entrance-value vector.
//!
//! * Partial improving: for `Y` inside `B^{*D_{<j}} \ B^{*D_{<=j}}`,
//!   `E[1_A X_n] <= E[1_A X_{tau_{n+j}(B)}]`.
//! * Partial improving II: for `Y` inside `B^{*D}` and `t - s` in `D` (or 0),
//!   `E[1_A X_{tau_t(B)}] <= E[1_A X_s]`.

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense;
use crate::error::{Error, Result};
use crate::fii::Fii;
use crate::model::Model;
use crate::state_set::StateSet;
use crate::window::LookAheadSet;

pub const MAX_STATES: usize = 12;
const SAMPLED_EVENTS: usize = 24;
const MAX_EVENT_TIME: usize = 4;
const SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    PartialImproving,
    PartialImprovingII,
}

/// An event `{Z_m in W} ∩ {Z_n in Y}` (the first part optional).
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub history: Option<(usize, StateSet)>,
    pub time: usize,
    pub states: StateSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheck {
    pub lemma: Lemma,
    pub start: usize,
    pub event: Event,
    /// `j` for the first inequality, `t - s` for the second.
    pub offset: usize,
    /// The side claimed to be smaller.
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Default)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    /// Hypotheses no state can satisfy; reported, not failed.
    pub unsatisfiable: Vec<String>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LemmaCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Exact evaluation of the two sides for one configuration.
struct Exact<'a> {
    model: &'a Model,
    psi: dense::Dense,
    entrance: Vec<f64>,
}

impl Exact<'_> {
    /// `y -> E[1_A prod_{i<n} alpha(Z_i); Z_n = y]`.
    fn weights(&self, start: usize, event: &Event) -> Vec<f64> {
        let n = self.model.n_states();
        let mut mu = vec![0.0; n];
        mu[start] = 1.0;
        for t in 0..event.time {
            if let Some((m, w)) = &event.history {
                if *m == t {
                    mask(&mut mu, w);
                }
            }
            mu = dense::vecmat(&mu, &self.psi);
        }
        if let Some((m, w)) = &event.history {
            if *m == event.time {
                mask(&mut mu, w);
            }
        }
        mask(&mut mu, &event.states);
        mu
    }

    /// `E[1_A X_n]`.
    fn stop_now(&self, start: usize, event: &Event) -> f64 {
        dot(&self.weights(start, event), self.model.payoff())
    }

    /// `E[1_A X_{tau_{n+k}(B)}]`: push the measure `k` more steps, then
    /// contract with `h_{B,0}`.
    fn wait_then_enter(&self, start: usize, event: &Event, k: usize) -> f64 {
        let mut mu = self.weights(start, event);
        for _ in 0..k {
            mu = dense::vecmat(&mu, &self.psi);
        }
        dot(&mu, &self.entrance)
    }
}

fn mask(mu: &mut [f64], keep: &StateSet) {
    for (y, m) in mu.iter_mut().enumerate() {
        if !keep.contains(y) {
            *m = 0.0;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn holds(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + SLACK * (1.0 + lhs.abs().max(rhs.abs()))
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &StateSet) -> StateSet {
    let members: Vec<usize> = pool.iter().collect();
    let k = rng.random_range(1..=members.len());
    let chosen = members.into_iter().choose_multiple(rng, k);
    StateSet::from_states(pool.universe(), chosen).expect("members of pool")
}

fn random_event(rng: &mut ChaCha8Rng, eligible: &StateSet) -> Event {
    let n = eligible.universe();
    let time = rng.random_range(0..=MAX_EVENT_TIME);
    let history = if time > 0 && rng.random_bool(0.5) {
        let m = rng.random_range(0..time);
        Some((m, random_subset(rng, &StateSet::full(n))))
    } else {
        None
    };
    Event {
        history,
        time,
        states: random_subset(rng, eligible),
    }
}

/// Checks both inequalities on deterministic single-state events at time 0
/// and on randomly sampled events.
pub fn lemma_property_check(model: &Model, base: &StateSet, depths: &LookAheadSet, seed: u64) -> Result<LemmaReport> {
    let n = model.n_states();
    if n > MAX_STATES {
        return Err(Error::TooLarge(format!("{n} states (limit {MAX_STATES})")));
    }
    let family = Fii::new(model).improve_family(base, depths)?;
    let exact = Exact {
        model,
        psi: dense::psi(model),
        entrance: dense::entrance_value(model, base)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LemmaReport::default();

    // Partial improving: states first dropped at depth j.
    let mut previous = base.clone();
    for (j, set) in &family {
        let eligible = previous.difference(set);
        previous = set.clone();
        if eligible.is_empty() {
            report
                .unsatisfiable
                .push(format!("no state leaves B^{{*D}} at depth {j}"));
            continue;
        }
        let mut events: Vec<(usize, Event)> = eligible
            .iter()
            .map(|y| {
                let states = StateSet::from_states(n, [y]).expect("y < n");
                (y, Event { history: None, time: 0, states })
            })
            .collect();
        for _ in 0..SAMPLED_EVENTS {
            events.push((rng.random_range(0..n), random_event(&mut rng, &eligible)));
        }
        for (start, event) in events {
            let lhs = exact.stop_now(start, &event);
            let rhs = exact.wait_then_enter(start, &event, *j);
            report.checks.push(LemmaCheck {
                lemma: Lemma::PartialImproving,
                start,
                event,
                offset: *j,
                lhs,
                rhs,
                holds: holds(lhs, rhs),
            });
        }
    }

    // Partial improving II: states kept by the full window.
    let improved = &family.last().expect("D nonempty").1;
    if improved.is_empty() {
        report.unsatisfiable.push("B^{*D} is empty".into());
    } else {
        let offsets: Vec<usize> = std::iter::once(0).chain(depths.iter()).collect();
        let mut configs: Vec<(usize, usize, Event)> = Vec::new();
        for y in improved.iter() {
            for &k in &offsets {
                let states = StateSet::from_states(n, [y]).expect("y < n");
                configs.push((y, k, Event { history: None, time: 0, states }));
            }
        }
        for _ in 0..SAMPLED_EVENTS {
            let k = offsets[rng.random_range(0..offsets.len())];
            configs.push((rng.random_range(0..n), k, random_event(&mut rng, improved)));
        }
        for (start, k, event) in configs {
            let lhs = exact.wait_then_enter(start, &event, k);
            let rhs = exact.stop_now(start, &event);
            report.checks.push(LemmaCheck {
                lemma: Lemma::PartialImprovingII,
                start,
                event,
                offset: k,
                lhs,
                rhs,
                holds: holds(lhs, rhs),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{five::*, five_state_chain};

    #[test]
    fn five_state_chain_depths_one_two() {
        let m = five_state_chain();
        let d = LookAheadSet::initial_segment(2).unwrap();
        let report = lemma_property_check(&m, &StateSet::full(5), &d, 7).unwrap();
        assert!(report.all_hold(), "{:?}", report.failures().collect::<Vec<_>>());

        // A = {Z_0 = a}, j = 2: 3 <= 10/3.
        let check = report
            .checks
            .iter()
            .find(|c| c.lemma == Lemma::PartialImproving && c.start == A && c.event.time == 0 && c.offset == 2)
            .expect("a is dropped at depth 2");
        assert!((check.lhs - 3.0).abs() < 1e-12);
        assert!((check.rhs - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_offset_is_equality() {
        let m = five_state_chain();
        let d = LookAheadSet::initial_segment(2).unwrap();
        let report = lemma_property_check(&m, &StateSet::full(5), &d, 1).unwrap();
        for c in report.checks.iter().filter(|c| c.lemma == Lemma::PartialImprovingII && c.offset == 0) {
            assert!((c.lhs - c.rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn depth_one_removals_are_strict() {
        let m = five_state_chain();
        let d = LookAheadSet::initial_segment(1).unwrap();
        let report = lemma_property_check(&m, &StateSet::full(5), &d, 3).unwrap();
        let strict = report
            .checks
            .iter()
            .filter(|c| c.lemma == Lemma::PartialImproving && c.event.time == 0 && c.start == C)
            .all(|c| c.lhs < c.rhs);
        assert!(strict);
    }

    #[test]
    fn unsatisfiable_hypotheses_are_reported() {
        // Constant payoff: nothing is ever dropped.
        let m = Model::from_triplets(2, &[(0, 1, 1.0), (1, 0, 1.0)], vec![0.9; 2], vec![1.0; 2]).unwrap();
        let report = lemma_property_check(&m, &StateSet::full(2), &LookAheadSet::initial_segment(2).unwrap(), 0)
            .unwrap();
        assert_eq!(report.unsatisfiable.len(), 2);
        assert!(report.all_hold());
    }
}
