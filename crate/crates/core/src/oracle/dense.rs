//! Dense reference linear algebra for small models.
//!
//! Deliberately naive: triple loops and Gaussian elimination, sharing no
//! code with the sparse solver path.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::state_set::StateSet;

pub type Dense = Vec<Vec<f64>>;

/// `Psi` as a dense matrix, built straight from the model.
pub fn psi(model: &Model) -> Dense {
    let n = model.n_states();
    let mut m = vec![vec![0.0; n]; n];
    for (z, row) in m.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = model.alpha()[z] * model.transitions().get(z, y);
        }
    }
    m
}

pub fn matvec(a: &Dense, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| {
            let mut s = 0.0;
            for j in 0..v.len() {
                s += row[j] * v[j];
            }
            s
        })
        .collect()
}

/// Row vector times matrix: `mu * a`.
pub fn vecmat(mu: &[f64], a: &Dense) -> Vec<f64> {
    let n = a.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (i, &m) in mu.iter().enumerate() {
        for j in 0..n {
            out[j] += m * a[i][j];
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            for j in 0..m {
                c[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    c
}

pub fn power(a: &Dense, p: usize) -> Dense {
    let n = a.len();
    let mut result: Dense = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..p {
        result = matmul(&result, a);
    }
    result
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &Dense, b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut m: Dense = a.iter().zip(b).map(|(row, &bi)| row.iter().copied().chain([bi]).collect()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("nonempty range");
        if m[pivot][col].abs() < 1e-300 {
            return Err(Error::SingularSystem {
                residual: f64::INFINITY,
            });
        }
        m.swap(col, pivot);
        let (upper, lower) = m.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let f = row[col] / pivot_row[col];
            if f != 0.0 {
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = m[r][n];
        for c in r + 1..n {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    Ok(x)
}

/// `h_{B,0}` by a dense solve of `(I - diag(1-b) Psi) h = b g`.
pub fn entrance_value(model: &Model, target: &StateSet) -> Result<Vec<f64>> {
    let n = model.n_states();
    let psi = psi(model);
    let mut a = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        a[i][i] = 1.0;
        if target.contains(i) {
            d[i] = model.payoff()[i];
        } else {
            for j in 0..n {
                a[i][j] -= psi[i][j];
            }
        }
    }
    solve(&a, &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = vec![vec![0.0, 2.0], vec![1.0, 1.0]];
        let x = solve(&a, &[4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve(&vec![vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn power_zero_is_identity() {
        let a = vec![vec![0.5, 0.5], vec![0.0, 1.0]];
        assert_eq!(power(&a, 0), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(power(&a, 2), matmul(&a, &a));
    }
}
