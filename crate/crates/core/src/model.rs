//! The discounted Markov reward model: states, transition matrix, per-state
//! discount factors and payoffs.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Allowed deviation of a transition row sum from one.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Per-state expected rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueVector(pub Vec<f64>);

impl ValueVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Sup-norm distance to `other`.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for ValueVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ValueVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for ValueVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// A finite, time-homogeneous Markov chain with state-dependent discounting
/// and a stopping payoff.
///
/// Stopping at time `n` pays `alpha(Z_0) * ... * alpha(Z_{n-1}) * g(Z_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    labels: Option<Vec<String>>,
    transitions: CsrMatrix,
    alpha: Vec<f64>,
    payoff: Vec<f64>,
}

impl Model {
    /// Builds and validates a model.
    pub fn new(
        labels: Option<Vec<String>>,
        transitions: CsrMatrix,
        alpha: Vec<f64>,
        payoff: Vec<f64>,
    ) -> Result<Self> {
        let model = Self {
            labels,
            transitions,
            alpha,
            payoff,
        };
        model.validate()?;
        Ok(model)
    }

    /// Convenience constructor from `(from, to, probability)` triplets.
    pub fn from_triplets(
        n_states: usize,
        transitions: &[(usize, usize, f64)],
        alpha: Vec<f64>,
        payoff: Vec<f64>,
    ) -> Result<Self> {
        let pi = CsrMatrix::from_triplets(n_states, n_states, transitions)?;
        Self::new(None, pi, alpha, payoff)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_states() {
            return Err(Error::DimensionMismatch {
                expected: self.n_states(),
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Checks every model invariant, reporting the first violation found.
    pub fn validate(&self) -> Result<()> {
        let n = self.transitions.n_rows();
        if n == 0 {
            return Err(Error::InvalidParameter("model has no states".into()));
        }
        for (expected, actual) in [
            (n, self.transitions.n_cols()),
            (n, self.alpha.len()),
            (n, self.payoff.len()),
        ] {
            if expected != actual {
                return Err(Error::DimensionMismatch { expected, actual });
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: labels.len(),
                });
            }
        }
        for (row, cols, vals) in self.transitions.rows() {
            for (&col, &p) in cols.iter().zip(vals) {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::EntryOutOfRange { row, col });
                }
            }
            let sum: f64 = vals.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowNotStochastic { row, sum });
            }
        }
        if let Some(state) = self.alpha.iter().position(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::DiscountOutOfRange { state });
        }
        if let Some(state) = self.payoff.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinitePayoff { state });
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.payoff.len()
    }

    pub fn transitions(&self) -> &CsrMatrix {
        &self.transitions
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of state `z`: its label, or the index.
    pub fn label(&self, z: usize) -> String {
        match &self.labels {
            Some(labels) => labels[z].clone(),
            None => z.to_string(),
        }
    }

    /// Looks a state up by label, falling back to parsing an index.
    pub fn state_by_name(&self, name: &str) -> Option<usize> {
        if let Some(labels) = &self.labels {
            if let Some(z) = labels.iter().position(|l| l == name) {
                return Some(z);
            }
        }
        name.parse().ok().filter(|&z| z < self.n_states())
    }

    pub fn max_alpha(&self) -> f64 {
        self.alpha.iter().copied().fold(0.0, f64::max)
    }

    pub fn payoff_sup_norm(&self) -> f64 {
        self.payoff.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    /// The discount-weighted kernel `Psi[z][y] = alpha(z) * Pi[z][y]`.
    pub fn psi(&self) -> DiscountedKernel {
        DiscountedKernel {
            psi: self.transitions.scale_rows(&self.alpha),
        }
    }
}

/// Transition matrix with each row scaled by the discount factor of its state.
///
/// Powers of this kernel applied to a value vector give discounted
/// multi-step expectations.
#[derive(Debug, Clone)]
pub struct DiscountedKernel {
    psi: CsrMatrix,
}

impl DiscountedKernel {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.psi
    }

    pub fn n_states(&self) -> usize {
        self.psi.n_rows()
    }

    pub fn matvec(&self, v: &[f64]) -> Result<ValueVector> {
        self.psi.matvec(v).map(ValueVector)
    }
}
