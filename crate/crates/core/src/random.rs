//! Seeded random models for property tests and benchmarks.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq)]
pub struct RandomModelSpec {
    pub n_states: usize,
    /// Discount factors are drawn uniformly from this range.
    pub alpha: (f64, f64),
    /// Successors per state, capped at `n_states`.
    pub out_degree: usize,
    pub payoff: (f64, f64),
}

impl RandomModelSpec {
    pub fn new(n_states: usize) -> Self {
        Self {
            n_states,
            alpha: (0.5, 0.99),
            out_degree: 3,
            payoff: (0.0, 10.0),
        }
    }

    pub fn alpha(mut self, lo: f64, hi: f64) -> Self {
        self.alpha = (lo, hi);
        self
    }

    pub fn out_degree(mut self, k: usize) -> Self {
        self.out_degree = k;
        self
    }

    pub fn payoff(mut self, lo: f64, hi: f64) -> Self {
        self.payoff = (lo, hi);
        self
    }

    pub fn generate(&self, seed: u64) -> Result<Model> {
        random_model(self, seed)
    }
}

fn draw(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Draws a model with exactly stochastic rows: weights are normalised and
/// the last entry of each row absorbs the rounding remainder.
pub fn random_model(spec: &RandomModelSpec, seed: u64) -> Result<Model> {
    let n = spec.n_states;
    if n == 0 {
        return Err(Error::InvalidParameter("model needs at least one state".into()));
    }
    if spec.out_degree == 0 {
        return Err(Error::InvalidParameter("out-degree must be positive".into()));
    }
    let (alo, ahi) = spec.alpha;
    if !(0.0..=1.0).contains(&alo) || !(0.0..=1.0).contains(&ahi) || alo > ahi {
        return Err(Error::InvalidParameter(format!("bad discount range [{alo}, {ahi}]")));
    }
    if !(spec.payoff.0.is_finite() && spec.payoff.1.is_finite()) || spec.payoff.0 > spec.payoff.1 {
        return Err(Error::InvalidParameter("bad payoff range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.out_degree.min(n);
    let mut triplets = Vec::with_capacity(n * k);
    for z in 0..n {
        let mut targets = index::sample(&mut rng, n, k).into_vec();
        targets.sort_unstable();
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let head: f64 = probs[..k - 1].iter().sum();
        probs[k - 1] = 1.0 - head;
        triplets.extend(targets.into_iter().zip(probs).map(|(y, p)| (z, y, p)));
    }
    let alpha = (0..n).map(|_| draw(&mut rng, spec.alpha)).collect();
    let payoff = (0..n).map(|_| draw(&mut rng, spec.payoff)).collect();
    Model::from_triplets(n, &triplets, alpha, payoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_stochastic_and_seeded() {
        for seed in 0..20 {
            let m = RandomModelSpec::new(9).out_degree(4).generate(seed).unwrap();
            for s in m.transitions().row_sums() {
                assert!((s - 1.0).abs() <= 1e-12);
            }
            assert_eq!(m, RandomModelSpec::new(9).out_degree(4).generate(seed).unwrap());
        }
    }

    #[test]
    fn ranges_are_respected() {
        let m = RandomModelSpec::new(30).alpha(0.9, 0.9).payoff(-1.0, 1.0).generate(5).unwrap();
        assert!(m.alpha().iter().all(|&a| a == 0.9));
        assert!(m.payoff().iter().all(|g| (-1.0..=1.0).contains(g)));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(RandomModelSpec::new(0).generate(0).is_err());
        assert!(RandomModelSpec::new(3).alpha(0.5, 1.5).generate(0).is_err());
    }
}
