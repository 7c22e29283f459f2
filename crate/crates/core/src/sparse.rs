//! Row-compressed sparse matrix with an on-demand column-compressed shadow.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest magnitude for which an integer survives an `f64` round trip.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    ExactInteger,
    Float,
}

#[derive(Debug, Clone)]
struct ColumnShadow {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    kind: ValueKind,
    shadow: OnceLock<ColumnShadow>,
}

impl PartialEq for SparseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
            && self.values == other.values
            && self.kind == other.kind
    }
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets (0-based).
    ///
    /// Explicit zeros are dropped. Duplicate positions and out-of-range
    /// indices are rejected. The value kind is `ExactInteger` when every
    /// value is an integer of magnitude at most 2^53.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!("non-finite entry at ({r}, {c})")));
            }
            entries.push((r, c, v));
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidMatrix(format!(
                    "duplicate entry ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        entries.retain(|e| e.2 != 0.0);

        let exact = entries
            .iter()
            .all(|e| e.2.fract() == 0.0 && e.2.abs() <= EXACT_LIMIT);
        let kind = if exact {
            ValueKind::ExactInteger
        } else {
            ValueKind::Float
        };

        let mut row_ptr = vec![0usize; n_rows + 1];
        for e in &entries {
            row_ptr[e.0 + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = entries.iter().map(|e| e.1).collect();
        let values = entries.iter().map(|e| e.2).collect();
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
            kind,
            shadow: OnceLock::new(),
        })
    }

    pub fn from_dense_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} columns, expected {n_cols}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    trip.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &trip)
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        Self::from_dense_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        let trip: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &trip).expect("identity is valid")
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

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn is_exact_integer(&self) -> bool {
        self.kind == ValueKind::ExactInteger
    }

    /// Same entries, marked as floating point.
    pub fn into_float(mut self) -> Self {
        self.kind = ValueKind::Float;
        self
    }

    /// Stored entries of row `i` as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn shadow(&self) -> &ColumnShadow {
        self.shadow.get_or_init(|| {
            let mut col_ptr = vec![0usize; self.n_cols + 1];
            for &c in &self.col_idx {
                col_ptr[c + 1] += 1;
            }
            for j in 0..self.n_cols {
                col_ptr[j + 1] += col_ptr[j];
            }
            let mut next = col_ptr.clone();
            let mut row_idx = vec![0usize; self.nnz()];
            let mut values = vec![0.0; self.nnz()];
            for i in 0..self.n_rows {
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    let c = self.col_idx[k];
                    row_idx[next[c]] = i;
                    values[next[c]] = self.values[k];
                    next[c] += 1;
                }
            }
            ColumnShadow {
                col_ptr,
                row_idx,
                values,
            }
        })
    }

    /// `out = A x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols, "mul_vec: x length");
        assert_eq!(out.len(), self.n_rows, "mul_vec: out length");
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `out = A^T y`, using the column shadow.
    pub fn tmul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.n_rows, "tmul_vec: y length");
        assert_eq!(out.len(), self.n_cols, "tmul_vec: out length");
        let s = self.shadow();
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in s.col_ptr[j]..s.col_ptr[j + 1] {
                acc += s.values[k] * y[s.row_idx[k]];
            }
            *o = acc;
        }
    }

    pub fn tmul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        self.tmul_vec_into(y, &mut out);
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        let trip: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &trip).expect("transpose of valid matrix")
    }

    /// Drops the rows listed in `drop` (0-based).
    pub fn without_rows(&self, drop: &[usize]) -> SparseMatrix {
        let keep: Vec<usize> = (0..self.n_rows).filter(|i| !drop.contains(i)).collect();
        let mut trip = Vec::new();
        for (new_i, &i) in keep.iter().enumerate() {
            trip.extend(self.row(i).map(|(j, v)| (new_i, j, v)));
        }
        Self::from_triplets(keep.len(), self.n_cols, &trip).expect("row subset of valid matrix")
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Dense integer rows; fails unless the matrix is in exact-integer mode.
    pub fn to_int_rows(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_exact_integer() {
            return Err(Error::NotInteger);
        }
        let mut rows = vec![vec![0i64; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            rows[i][j] = v as i64;
        }
        Ok(rows)
    }
}
