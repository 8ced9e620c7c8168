//! Right-continuous nondecreasing step functions.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// `f(x) = base + Σ_{x_i ≤ x} w_i`, stored as sorted breakpoints with the
/// cumulative value reached at each one.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    base: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn constant(base: f64) -> Self {
        StepFunction { base, breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Build from point masses `(x, w)` with `w ≥ 0`; coincident abscissae
    /// are merged.
    pub fn from_atoms(base: f64, atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(x, w) in &atoms {
            if x.is_nan() || !(w >= 0.0) {
                return Err(invalid("step atoms need a finite position and nonnegative weight"));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut values: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut acc = base;
        for (x, w) in atoms {
            acc += w;
            if breakpoints.last() == Some(&x) {
                *values.last_mut().unwrap() = acc;
            } else {
                breakpoints.push(x);
                values.push(acc);
            }
        }
        Ok(StepFunction { base, breakpoints, values })
    }

    /// Build from sorted breakpoints and the value taken from each one on.
    pub fn from_table(base: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(invalid("breakpoints and values differ in length"));
        }
        let mut prev_x = f64::NEG_INFINITY;
        let mut prev_v = base;
        for (x, v) in breakpoints.iter().zip(&values) {
            if !(*x > prev_x) || !(*v >= prev_v) {
                return Err(invalid("step table must be strictly increasing in x and nondecreasing in value"));
            }
            prev_x = *x;
            prev_v = *v;
        }
        Ok(StepFunction { base, breakpoints, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b <= x);
        if k == 0 {
            self.base
        } else {
            self.values[k - 1]
        }
    }

    /// Left limit `f(x-)`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| *b < x);
        if k == 0 {
            self.base
        } else {
            self.values[k - 1]
        }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value after the last breakpoint.
    pub fn sup(&self) -> f64 {
        self.values.last().copied().unwrap_or(self.base)
    }

    pub fn is_monotone(&self) -> bool {
        let mut prev = self.base;
        self.values.iter().all(|v| {
            let ok = *v >= prev;
            prev = *v;
            ok
        }) && self.breakpoints.windows(2).all(|w| w[0] < w[1])
    }

    /// Generalized inverse `inf { x : f(x) ≥ t }`; `None` if `t` exceeds
    /// the supremum. Returns `-∞` when `t ≤ base`.
    pub fn inverse(&self, t: f64) -> Option<f64> {
        if t <= self.base {
            return Some(f64::NEG_INFINITY);
        }
        let k = self.values.partition_point(|v| *v < t);
        self.breakpoints.get(k).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn right_continuity() {
        let f = StepFunction::from_atoms(0.0, [(1.0, 1.0), (2.0, 2.0), (1.0, 1.0)]).unwrap();
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.eval_left(1.0), 0.0);
        assert_eq!(f.eval(2.0), 4.0);
        assert_eq!(f.sup(), 4.0);
        assert_eq!(f.inverse(3.0), Some(2.0));
        assert_eq!(f.inverse(5.0), None);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(StepFunction::from_table(0.0, vec![1.0, 0.5], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::from_table(0.0, vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        assert!(StepFunction::from_atoms(0.0, [(1.0, -1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn monotone_and_counts(atoms in proptest::collection::vec((-100.0f64..100.0, 0.0f64..5.0), 0..50), x in -120.0f64..120.0) {
            let f = StepFunction::from_atoms(0.0, atoms.clone()).unwrap();
            prop_assert!(f.is_monotone());
            let direct: f64 = atoms.iter().filter(|a| a.0 <= x).map(|a| a.1).sum();
            prop_assert!((f.eval(x) - direct).abs() < 1e-9);
        }
    }
}
