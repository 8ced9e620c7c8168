use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Symmetric matrix stored as a diagonal plus full (both-triangle) rows of
/// off-diagonal entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSparse {
    pub diag: Vec<f64>,
    pub off: Vec<Vec<(usize, f64)>>,
}

impl SymmetricSparse {
    pub fn zeros(n: usize) -> Self {
        SymmetricSparse { diag: vec![0.0; n], off: vec![Vec::new(); n] }
    }

    /// Assemble from upper or lower triplets; duplicates are summed and the
    /// transpose entry is implied.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut diag = vec![0.0; n];
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for (i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(invalid("triplet index out of range"));
            }
            if i == j {
                diag[i] += v;
            } else {
                *rows[i].entry(j).or_insert(0.0) += v;
                *rows[j].entry(i).or_insert(0.0) += v;
            }
        }
        Ok(SymmetricSparse { diag, off: rows.into_iter().map(|r| r.into_iter().collect()).collect() })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn nnz_offdiag(&self) -> usize {
        self.off.iter().map(Vec::len).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.diag
            .iter()
            .zip(&self.off)
            .enumerate()
            .map(|(i, (d, row))| d * x[i] + row.iter().map(|(j, v)| v * x[*j]).sum::<f64>())
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = self.diag[i];
            for &(j, v) in &self.off[i] {
                a[i * n + j] = v;
            }
        }
        a
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.off.iter().flatten().fold(d, |m, (_, v)| m.max(v.abs()))
    }
}
