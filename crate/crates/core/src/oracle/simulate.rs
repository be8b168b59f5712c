//! Seeded Monte Carlo evaluation of stopping rules.
//!
//! Paths are generated in shards of [`SHARD_SIZE`]. Shard `s` draws from a
//! ChaCha8 generator seeded with the user seed and switched to stream `s`,
//! and shard summaries are merged in shard order, so results do not depend
//! on the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entrance::check_wellposed;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::rule::{discounted_payoff, StoppingRule, Time, Trajectory};

pub const SHARD_SIZE: usize = 1024;
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), stream = shard index";

/// Truncation bias targeted by the default horizon.
const HORIZON_BIAS: f64 = 1e-6;
const UNDISCOUNTED_HORIZON: usize = 1_000_000;

/// Cumulative transition probabilities, one row per state.
#[derive(Debug, Clone)]
pub struct TransitionSampler {
    targets: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
}

impl TransitionSampler {
    pub fn new(model: &Model) -> Self {
        let (targets, cumulative) = model
            .transitions()
            .rows()
            .map(|(_, cols, vals)| {
                let mut acc = 0.0;
                let cum = vals
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                (cols.to_vec(), cum)
            })
            .unzip();
        Self { targets, cumulative }
    }

    pub fn step<R: Rng>(&self, z: usize, rng: &mut R) -> usize {
        let cum = &self.cumulative[z];
        let u = rng.random::<f64>() * cum.last().copied().unwrap_or(1.0);
        let k = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
        self.targets[z][k]
    }
}

/// A trajectory sampled lazily, one step at a time, up to a horizon.
pub struct SamplePath<'a, R> {
    sampler: &'a TransitionSampler,
    rng: &'a mut R,
    states: Vec<usize>,
    horizon: usize,
}

impl<'a, R: Rng> SamplePath<'a, R> {
    pub fn new(sampler: &'a TransitionSampler, rng: &'a mut R, start: usize, horizon: usize) -> Self {
        Self {
            sampler,
            rng,
            states: vec![start],
            horizon,
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// States generated so far.
    pub fn generated(&self) -> &[usize] {
        &self.states
    }
}

impl<R: Rng> Trajectory for SamplePath<'_, R> {
    fn state(&mut self, t: usize) -> Option<usize> {
        if t > self.horizon {
            return None;
        }
        while self.states.len() <= t {
            let z = *self.states.last().expect("start state");
            self.states.push(self.sampler.step(z, self.rng));
        }
        Some(self.states[t])
    }
}

/// Horizon keeping `alpha_max^cap * |g|_inf` below 1e-6, or a fixed large
/// cap without discounting.
pub fn default_horizon(model: &Model) -> usize {
    let alpha_max = model.max_alpha();
    let g = model.payoff_sup_norm();
    if alpha_max >= 1.0 {
        return UNDISCOUNTED_HORIZON;
    }
    if g <= HORIZON_BIAS || alpha_max == 0.0 {
        return 1;
    }
    ((HORIZON_BIAS / g).ln() / alpha_max.ln()).ceil().max(1.0) as usize
}

/// Running mean and second central moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    /// Sample standard deviation (n - 1 denominator).
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.std_dev() / (self.count as f64).sqrt()
        }
    }
}

/// Runs `per_path` on `n_paths` seeded trajectories from `start` and merges
/// the per-shard accumulators in shard order.
pub fn for_each_path<A, F>(
    model: &Model,
    start: usize,
    n_paths: usize,
    seed: u64,
    horizon: usize,
    per_path: F,
) -> Result<A>
where
    A: Default + Send + Merge,
    F: Fn(&mut SamplePath<'_, ChaCha8Rng>, &mut A) -> Result<()> + Sync,
{
    if start >= model.n_states() {
        return Err(Error::InvalidParameter(format!("start state {start} out of range")));
    }
    let sampler = TransitionSampler::new(model);
    let shards = n_paths.div_ceil(SHARD_SIZE);
    let parts: Vec<Result<A>> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let mut acc = A::default();
            let count = SHARD_SIZE.min(n_paths - shard * SHARD_SIZE);
            for _ in 0..count {
                let mut path = SamplePath::new(&sampler, &mut rng, start, horizon);
                per_path(&mut path, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = A::default();
    for part in parts {
        total.merge(part?);
    }
    Ok(total)
}

/// Accumulators that combine shard results.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

impl Merge for Moments {
    fn merge(&mut self, other: Self) {
        Moments::merge(self, &other);
    }
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, other: Self) {
        if self.is_empty() {
            *self = other;
        } else {
            for (a, b) in self.iter_mut().zip(other) {
                a.merge(b);
            }
        }
    }
}

#[derive(Debug, Default)]
struct RuleAccumulator {
    payoff: Moments,
    capped: usize,
    histogram: BTreeMap<usize, u64>,
}

impl Merge for RuleAccumulator {
    fn merge(&mut self, other: Self) {
        self.payoff.merge(&other.payoff);
        self.capped += other.capped;
        for (t, c) in other.histogram {
            *self.histogram.entry(t).or_default() += c;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub start: usize,
    pub rule: String,
    pub n_paths: usize,
    pub mean: f64,
    pub std_error: f64,
    pub horizon: usize,
    /// Paths that reached the horizon without stopping.
    pub capped: usize,
    /// Stopping time -> number of paths.
    pub histogram: BTreeMap<usize, u64>,
    pub rng: &'static str,
}

fn check_targets_reachable(model: &Model, rule: &StoppingRule) -> Result<()> {
    match rule {
        StoppingRule::FirstEntrance { target, after } => {
            check_wellposed(model, target)?;
            check_targets_reachable(model, after)
        }
        StoppingRule::Improved(r) => {
            check_targets_reachable(model, &r.sigma)?;
            check_targets_reachable(model, &r.rho)
        }
        StoppingRule::Fixed(_) | StoppingRule::Never => Ok(()),
    }
}

/// Monte Carlo estimate of `E[X_tau | Z_0 = start]`.
///
/// `horizon` defaults to [`default_horizon`]. Paths still running at the
/// horizon are credited with the discounted payoff there.
pub fn simulate(
    model: &Model,
    rule: &StoppingRule,
    start: usize,
    n_paths: usize,
    seed: u64,
    horizon: Option<usize>,
) -> Result<SimulationReport> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter("need at least one path".into()));
    }
    let undiscounted = model.max_alpha() >= 1.0;
    if undiscounted {
        check_targets_reachable(model, rule)?;
    }
    let horizon = horizon.unwrap_or_else(|| default_horizon(model));
    let acc: RuleAccumulator = for_each_path(model, start, n_paths, seed, horizon, |path, acc: &mut RuleAccumulator| {
        let time = rule.evaluate(path)?;
        acc.payoff.push(discounted_payoff(model, path, time, horizon));
        match time {
            Time::At(t) => *acc.histogram.entry(t).or_default() += 1,
            Time::Never => acc.capped += 1,
        }
        Ok(())
    })?;
    if undiscounted && acc.capped * 100 > n_paths {
        return Err(Error::CapDominates {
            capped: acc.capped,
            paths: n_paths,
        });
    }
    Ok(SimulationReport {
        start,
        rule: rule.to_string(),
        n_paths,
        mean: acc.payoff.mean,
        std_error: acc.payoff.std_error(),
        horizon,
        capped: acc.capped,
        histogram: acc.histogram,
        rng: RNG_NAME,
    })
}
