use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Inputs of the empirical-estimate sample-size bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComplexityParams {
    pub epsilon: f64,
    pub delta: f64,
    /// Transportation-cost-inequality constant.
    pub c: f64,
    /// Covering constant.
    pub k: f64,
}

impl SampleComplexityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("epsilon must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if !(self.c > 0.0 && self.k > 0.0) {
            return Err(Error::invalid("constants C and K must be positive"));
        }
        Ok(())
    }
}

/// Unrounded bound `(32 C / eps^2) ln(2K / delta)`.
pub fn n_wass_real(p: &SampleComplexityParams) -> Result<f64> {
    p.validate()?;
    Ok(32.0 * p.c / (p.epsilon * p.epsilon) * (2.0 * p.k / p.delta).ln())
}

/// Samples needed for the empirical Wasserstein estimate to be
/// `epsilon`-accurate with confidence `1 - delta`.
pub fn n_wass(p: &SampleComplexityParams) -> Result<u64> {
    let v = n_wass_real(p)?;
    Ok(ceil_count(v))
}

/// Ceiling that absorbs floating-point noise just above an integer.
pub(crate) fn ceil_count(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r.max(1.0) as u64
    } else {
        v.ceil().max(1.0) as u64
    }
}

/// Column-compressed binary matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Start of each column in `row_idx`; length `cols + 1`.
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
}

impl SparseMatrix {
    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.cols]; self.rows];
        for c in 0..self.cols {
            for &r in &self.row_idx[self.col_ptr[c]..self.col_ptr[c + 1]] {
                d[r][c] = 1;
            }
        }
        d
    }
}

/// Equality-constraint matrix `[e_n^T (x) I_m ; I_n (x) e_m^T]` of the
/// transportation LP with the coupling vectorized column-major
/// (`phi_ij` at index `j m + i`).
pub fn build_constraint_matrix(m: usize, n: usize) -> Result<SparseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("constraint matrix needs m, n >= 1"));
    }
    let cols = m * n;
    let mut col_ptr = Vec::with_capacity(cols + 1);
    let mut row_idx = Vec::with_capacity(2 * cols);
    col_ptr.push(0);
    for j in 0..n {
        for i in 0..m {
            row_idx.push(i);
            row_idx.push(m + j);
            col_ptr.push(row_idx.len());
        }
    }
    Ok(SparseMatrix {
        rows: m + n,
        cols,
        col_ptr,
        row_idx,
    })
}
