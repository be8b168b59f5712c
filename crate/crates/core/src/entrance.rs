//! First-entrance values.
//!
//! For a target set `B`, `h_{B,0}(z)` is the expected discounted payoff of
//! stopping at the first visit to `B` (time 0 included), and
//! `h_{B,p} = Psi^p h_{B,0}` is the value of waiting `p` steps first. On a
//! finite chain `h_{B,0}` is the unique solution of `A h = d` with
//! `A = I - diag(1 - b) Psi` and `d = b * g`, provided every undiscounted
//! state reaches `B` almost surely.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::model::{DiscountedKernel, Model, ValueVector};
use crate::sparse::CsrMatrix;
use crate::state_set::StateSet;

/// Relative residual accepted from a linear solve: `|Ah - d| <= tol (1 + |d|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Checks that every state is either discounted (`alpha < 1`) or reaches
/// `target` with probability one.
///
/// Reachability is decided on the support of the transition matrix: a state
/// fails when, avoiding `target`, it can reach a state with no path into
/// `target` at all.
pub fn check_wellposed(model: &Model, target: &StateSet) -> Result<()> {
    let n = model.n_states();
    if target.universe() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: target.universe(),
        });
    }
    let undiscounted = |z: usize| model.alpha()[z] >= 1.0;
    if target.is_empty() {
        return match (0..n).find(|&z| undiscounted(z)) {
            Some(_) => Err(Error::EmptyTarget),
            None => Ok(()),
        };
    }
    if !(0..n).any(undiscounted) {
        return Ok(());
    }

    let pred = model.transitions().predecessors();

    // States with some path into the target.
    let mut reaches = vec![false; n];
    let mut queue: VecDeque<usize> = target.iter().collect();
    for z in target.iter() {
        reaches[z] = true;
    }
    while let Some(y) = queue.pop_front() {
        for &x in &pred[y] {
            if !reaches[x] {
                reaches[x] = true;
                queue.push_back(x);
            }
        }
    }

    // States that can wander, outside the target, into a trap.
    let mut doomed = vec![false; n];
    for z in 0..n {
        if !reaches[z] {
            doomed[z] = true;
            queue.push_back(z);
        }
    }
    while let Some(y) = queue.pop_front() {
        for &x in &pred[y] {
            if !doomed[x] && !target.contains(x) {
                doomed[x] = true;
                queue.push_back(x);
            }
        }
    }

    match (0..n).find(|&z| doomed[z] && undiscounted(z)) {
        Some(state) => Err(Error::IllPosed { state }),
        None => Ok(()),
    }
}

/// The linear system `A h = d` characterising `h_{B,0}`.
#[derive(Debug, Clone)]
pub struct EntranceSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub indicator: Vec<f64>,
}

impl EntranceSystem {
    pub fn new(model: &Model, kernel: &DiscountedKernel, target: &StateSet) -> Self {
        let n = model.n_states();
        let psi = kernel.matrix();
        let mut triplets = Vec::with_capacity(psi.nnz() + n);
        for i in 0..n {
            triplets.push((i, i, 1.0));
            if !target.contains(i) {
                let (cols, vals) = psi.row(i);
                triplets.extend(cols.iter().zip(vals).map(|(&j, &p)| (i, j, -p)));
            }
        }
        let matrix = CsrMatrix::from_triplets(n, n, &triplets).expect("indices in range");
        let indicator = target.indicator();
        let rhs = indicator.iter().zip(model.payoff()).map(|(b, g)| b * g).collect();
        Self {
            matrix,
            rhs,
            indicator,
        }
    }

    /// `|A h - d|_inf`.
    pub fn residual(&self, h: &[f64]) -> f64 {
        let ah = self.matrix.matvec(h).expect("dimension checked by caller");
        ah.iter().zip(&self.rhs).map(|(a, d)| (a - d).abs()).fold(0.0, f64::max)
    }

    pub fn residual_bound(&self) -> f64 {
        let d_norm = self.rhs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        RESIDUAL_TOL * (1.0 + d_norm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Sparse LU with partial pivoting.
    #[default]
    Lu,
    /// Jacobi sweeps `h <- d + (I - A) h`.
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub solver: SolverKind,
    /// Sup-norm step size at which fixed-point sweeps stop.
    pub fixed_point_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            solver: SolverKind::Lu,
            fixed_point_tol: 1e-12,
        }
    }
}

/// Computes entrance values for one model, reusing its discounted kernel.
#[derive(Debug, Clone)]
pub struct EntranceSolver<'a> {
    model: &'a Model,
    kernel: DiscountedKernel,
    options: SolveOptions,
}

impl<'a> EntranceSolver<'a> {
    pub fn new(model: &'a Model) -> Self {
        Self::with_options(model, SolveOptions::default())
    }

    pub fn with_options(model: &'a Model, options: SolveOptions) -> Self {
        Self {
            model,
            kernel: model.psi(),
            options,
        }
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn kernel(&self) -> &DiscountedKernel {
        &self.kernel
    }

    /// `h_{B,0}`, with `h = g` exactly on `B`.
    pub fn entrance_value(&self, target: &StateSet) -> Result<ValueVector> {
        check_wellposed(self.model, target)?;
        let system = EntranceSystem::new(self.model, &self.kernel, target);
        let mut h = match self.options.solver {
            SolverKind::Lu => solve_lu(&system)?,
            SolverKind::FixedPoint => self.solve_fixed_point(&system)?,
        };
        for z in target.iter() {
            h[z] = self.model.payoff()[z];
        }
        let residual = system.residual(&h);
        if !residual.is_finite() || residual > system.residual_bound() {
            return Err(Error::SingularSystem { residual });
        }
        Ok(ValueVector(h))
    }

    /// `h_{B,p}` for every `p` in `depths`, from one shared chain of
    /// kernel products starting at `h_{B,0}`.
    pub fn lookahead_values(
        &self,
        target: &StateSet,
        depths: &BTreeSet<usize>,
    ) -> Result<BTreeMap<usize, ValueVector>> {
        let h0 = self.entrance_value(target)?;
        self.lookahead_from(&h0, depths)
    }

    /// As [`Self::lookahead_values`] for an already computed `h_{B,0}`.
    pub fn lookahead_from(&self, h0: &ValueVector, depths: &BTreeSet<usize>) -> Result<BTreeMap<usize, ValueVector>> {
        let max = match depths.last() {
            Some(&m) => m,
            None => return Err(Error::InvalidParameter("empty look-ahead set".into())),
        };
        if depths.contains(&0) {
            return Err(Error::InvalidParameter("look-ahead depths must be positive".into()));
        }
        let mut out = BTreeMap::new();
        let mut h = h0.clone();
        for p in 1..=max {
            h = self.kernel.matvec(&h)?;
            if depths.contains(&p) {
                out.insert(p, h.clone());
            }
        }
        Ok(out)
    }

    fn solve_fixed_point(&self, system: &EntranceSystem) -> Result<Vec<f64>> {
        let n = self.model.n_states();
        let alpha_max = self.model.max_alpha();
        let cap = if alpha_max < 1.0 {
            (10.0 * n as f64 / (1.0 - alpha_max)).ceil() as usize
        } else {
            10_000_000
        };
        let psi = self.kernel.matrix();
        let mut h = system.rhs.clone();
        let mut next = vec![0.0; n];
        for _ in 0..cap {
            let mut step = 0.0f64;
            for i in 0..n {
                next[i] = if system.indicator[i] == 1.0 {
                    system.rhs[i]
                } else {
                    let (cols, vals) = psi.row(i);
                    cols.iter().zip(vals).map(|(&j, &p)| p * h[j]).sum()
                };
                step = step.max((next[i] - h[i]).abs());
            }
            std::mem::swap(&mut h, &mut next);
            if step < self.options.fixed_point_tol {
                return Ok(h);
            }
        }
        Err(Error::NoConvergence { iterations: cap })
    }
}

fn solve_lu(system: &EntranceSystem) -> Result<Vec<f64>> {
    let n = system.rhs.len();
    let triplets: Vec<Triplet<usize, usize, f64>> =
        system.matrix.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let singular = || Error::SingularSystem {
        residual: f64::INFINITY,
    };
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).map_err(|_| singular())?;
    let lu = a.sp_lu().map_err(|_| singular())?;

    let rhs = Col::from_fn(n, |i| system.rhs[i]);
    let x = lu.solve(&rhs);
    let mut h: Vec<f64> = (0..n).map(|i| x[i]).collect();

    // One step of iterative refinement.
    let ah = system.matrix.matvec(&h)?;
    let r = Col::from_fn(n, |i| system.rhs[i] - ah[i]);
    let dx = lu.solve(&r);
    for (i, hi) in h.iter_mut().enumerate() {
        *hi += dx[i];
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    Ok(h)
}

/// `h_{B,0}` with the default solver.
pub fn entrance_value(model: &Model, target: &StateSet) -> Result<ValueVector> {
    EntranceSolver::new(model).entrance_value(target)
}

/// `h_{B,p}` for `p` in `depths` with the default solver.
pub fn lookahead_values(
    model: &Model,
    target: &StateSet,
    depths: &BTreeSet<usize>,
) -> Result<BTreeMap<usize, ValueVector>> {
    EntranceSolver::new(model).lookahead_values(target, depths)
}
