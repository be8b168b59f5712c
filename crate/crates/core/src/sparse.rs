//! Row-compressed sparse matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Below this many stored entries `matvec` runs on the calling thread.
const PAR_THRESHOLD: usize = 1 << 16;

/// Square or rectangular matrix in compressed sparse row layout.
///
/// Column indices are sorted within each row and unique; explicit zeros are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate positions are summed and zero entries dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::EntryOutOfRange { row: r, col: c });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut i = 0;
        while i < sorted.len() {
            let (r, c, mut v) = sorted[i];
            i += 1;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                v += sorted[i].2;
                i += 1;
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &[usize], &[f64])> + '_ {
        (0..self.n_rows).map(move |r| {
            let (c, v) = self.row(r);
            (r, c, v)
        })
    }

    /// Value at `(r, c)`, zero if not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    /// Multiplies row `r` by `factor[r]`, dropping rows whose factor is zero.
    pub fn scale_rows(&self, factor: &[f64]) -> Self {
        assert_eq!(factor.len(), self.n_rows, "one factor per row");
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_ptr.push(0);
        for (r, &f) in factor.iter().enumerate() {
            if f != 0.0 {
                let (cols, vals) = self.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    col_idx.push(c);
                    values.push(f * v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                actual: x.len(),
            });
        }
        let row_dot = |r: usize| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum::<f64>()
        };
        // Each row is an independent sequential sum, so the parallel and
        // serial paths produce identical bits.
        if self.nnz() >= PAR_THRESHOLD {
            Ok((0..self.n_rows).into_par_iter().map(row_dot).collect())
        } else {
            Ok((0..self.n_rows).map(row_dot).collect())
        }
    }

    /// Transposed sparsity pattern: for every column, the rows holding an entry.
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.n_cols];
        for (r, cols, _) in self.rows() {
            for &c in cols {
                pred[c].push(r);
            }
        }
        pred
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (r, cols, vals) in self.rows() {
            for (&c, &v) in cols.iter().zip(vals) {
                dense[r][c] = v;
            }
        }
        dense
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows()
            .flat_map(|(r, cols, vals)| cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 0.25), (0, 1, 0.25), (1, 0, 0.0), (0, 0, 0.5)]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 0.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.row(0).0, &[0, 1]);
    }

    #[test]
    fn out_of_range_triplet() {
        let err = CsrMatrix::from_triplets(2, 2, &[(0, 2, 1.0)]).unwrap_err();
        assert_eq!(err, Error::EntryOutOfRange { row: 0, col: 2 });
    }

    #[test]
    fn matvec_dimension_check() {
        let m = CsrMatrix::identity(3);
        assert!(matches!(m.matvec(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn scale_rows_drops_zero_rows() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let s = m.scale_rows(&[0.0, 0.5]);
        assert_eq!(s.nnz(), 1);
        assert_eq!(s.get(1, 0), 0.5);
    }
}
