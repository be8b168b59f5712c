use crate::entrance::check_wellposed;
use crate::error::{Error, Result};
use crate::model::{Model, ValueVector};
use crate::state_set::StateSet;

/// Iteration cap for value iteration.
pub const MAX_ITERATIONS: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct BellmanResult {
    pub values: ValueVector,
    /// Sup-norm of `v - T v` at the returned iterate.
    pub residual: f64,
    pub iterations: usize,
}

fn continuation(model: &Model, v: &[f64], z: usize) -> f64 {
    let alpha = model.alpha()[z];
    if alpha == 0.0 {
        return 0.0;
    }
    let (cols, vals) = model.transitions().row(z);
    alpha * cols.iter().zip(vals).map(|(&y, &p)| p * v[y]).sum::<f64>()
}

/// Value iteration for `v = max(g, Psi v)` on `stoppable` and `v = Psi v`
/// elsewhere.
///
/// Needs `max alpha < 1`, or `stoppable` equal to the whole state space. Stops
/// once successive iterates differ by less than `tol (1 - max alpha)` (or
/// `tol` without discounting), floored at a few ulps of the iterate.
pub fn bellman_value(model: &Model, stoppable: &StateSet, tol: f64) -> Result<BellmanResult> {
    let n = model.n_states();
    if stoppable.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: stoppable.universe(),
        });
    }
    let alpha_max = model.max_alpha();
    if alpha_max >= 1.0 {
        if !stoppable.is_full() {
            return Err(Error::InvalidParameter(
                "value iteration without discounting needs every state stoppable".into(),
            ));
        }
        check_wellposed(model, stoppable)?;
    }
    let threshold = if alpha_max < 1.0 { tol * (1.0 - alpha_max) } else { tol };
    let g = model.payoff();
    let mut v: Vec<f64> = (0..n).map(|z| if stoppable.contains(z) { g[z] } else { 0.0 }).collect();
    let mut next = vec![0.0; n];
    for iteration in 1..=MAX_ITERATIONS {
        let mut step = 0.0f64;
        let mut scale = 0.0f64;
        for z in 0..n {
            let cont = continuation(model, &v, z);
            next[z] = if stoppable.contains(z) { g[z].max(cont) } else { cont };
            step = step.max((next[z] - v[z]).abs());
            scale = scale.max(next[z].abs());
        }
        std::mem::swap(&mut v, &mut next);
        if step <= threshold.max(4.0 * f64::EPSILON * scale) {
            let residual = (0..n)
                .map(|z| {
                    let cont = continuation(model, &v, z);
                    let tv = if stoppable.contains(z) { g[z].max(cont) } else { cont };
                    (tv - v[z]).abs()
                })
                .fold(0.0, f64::max);
            return Ok(BellmanResult {
                values: ValueVector(v),
                residual,
                iterations: iteration,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

/// Finite-horizon backward induction: the best value over rules that stop in
/// `stoppable` no later than `horizon`.
///
/// At the horizon a non-stoppable state is worth `-inf`, so the result is a
/// lower bound on the infinite-horizon constrained value and `-inf` where no
/// admissible rule exists within the horizon.
pub fn exhaustive_optimal(model: &Model, stoppable: &StateSet, horizon: usize) -> Result<ValueVector> {
    let n = model.n_states();
    if n > 12 {
        return Err(Error::TooLarge(format!("{n} states (limit 12)")));
    }
    if horizon > 20 {
        return Err(Error::TooLarge(format!("horizon {horizon} (limit 20)")));
    }
    let g = model.payoff();
    let mut v: Vec<f64> = (0..n)
        .map(|z| if stoppable.contains(z) { g[z] } else { f64::NEG_INFINITY })
        .collect();
    for _ in 0..horizon {
        v = (0..n)
            .map(|z| {
                let cont = continuation(model, &v, z);
                let cont = if cont.is_nan() { f64::NEG_INFINITY } else { cont };
                if stoppable.contains(z) {
                    g[z].max(cont)
                } else {
                    cont
                }
            })
            .collect();
    }
    Ok(ValueVector(v))
}
