//! Sorted eigenvalue lists.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::step::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Dense,
    Decimation,
    Analytic,
}

/// Eigenvalues in nondecreasing order, repeated according to multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Scale factor already applied to the raw eigenvalues.
    pub renormalization: f64,
    pub provenance: Provenance,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>, renormalization: f64, provenance: Provenance) -> Result<Self> {
        if eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(invalid("eigenvalues must be finite"));
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Spectrum { eigenvalues, renormalization, provenance })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of eigenvalues `≤ λ`.
    pub fn count(&self, lambda: f64) -> usize {
        self.eigenvalues.partition_point(|x| *x <= lambda)
    }

    /// Distinct values with multiplicities, merging neighbours closer than
    /// `rel_tol` relative to the larger magnitude (or `rel_tol` absolute
    /// near zero).
    pub fn grouped(&self, rel_tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &x in &self.eigenvalues {
            match out.last_mut() {
                Some((v, k)) if (x - *v).abs() <= rel_tol * x.abs().max(v.abs()).max(1.0) => *k += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    pub fn counting_function(&self) -> StepFunction {
        StepFunction::from_atoms(0.0, self.eigenvalues.iter().map(|x| (*x, 1.0)))
            .expect("finite eigenvalues")
    }

    /// `Σ e^{-tλ}`.
    pub fn heat_trace(&self, t: f64) -> f64 {
        self.eigenvalues.iter().map(|x| libm::exp(-t * x)).sum()
    }
}
