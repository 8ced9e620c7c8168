//! Single-cell spectra (Dirichlet and Neumann) and the Weyl function `W`.
//!
//! A [`CellModel`] is a sorted list of eigenvalues with multiplicities and
//! a cap below which it is complete. Graph models reproduce exactly what
//! the decoupled level-`m` operators see, so their bracket sums are exact
//! integer bounds on graph counts; continuum models describe the compact
//! cell itself.

use alloc::vec::Vec;

use crate::decimation::{self, extract_g, graph_spectrum, sup_distance, GTable};
use crate::error::{invalid, Error, Result};
use crate::geometry::TemplateKind;
use crate::operator::Boundary;
use crate::step::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellSource {
    SgContinuum,
    SgGraph { level: u32 },
    IntervalContinuum,
    IntervalGraph { level: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellModel {
    pub bc: Boundary,
    pub source: CellSource,
    /// Distinct eigenvalues, ascending, with multiplicities.
    atoms: Vec<(f64, usize)>,
    /// `cumulative[i]` = number of eigenvalues `≤ atoms[i].0`.
    cumulative: Vec<usize>,
    /// The list is complete on `[0, cap]`.
    pub cap: f64,
}

impl CellModel {
    fn new(bc: Boundary, source: CellSource, mut atoms: Vec<(f64, usize)>, cap: f64) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, usize)> = Vec::with_capacity(atoms.len());
        for (v, k) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += k,
                _ => merged.push((v, k)),
            }
        }
        let mut total = 0;
        let cumulative = merged
            .iter()
            .map(|(_, k)| {
                total += k;
                total
            })
            .collect();
        CellModel { bc, source, atoms: merged, cumulative, cap }
    }

    /// Continuum SG cell, complete below `cap` (runs the decimation gate).
    pub fn sg_continuum(bc: Boundary, cap: f64) -> Result<Self> {
        let spec = decimation::enumerate_sg_spectrum(bc, cap)?;
        Ok(Self::from_decimation(&spec))
    }

    pub fn from_decimation(spec: &decimation::DecimationSpectrum) -> Self {
        let atoms = spec.entries.iter().map(|e| (e.value, e.multiplicity)).collect();
        Self::new(spec.bc, CellSource::SgContinuum, atoms, spec.lambda_cap)
    }

    /// Level-`m` SG graph cell in the units of the assembled operator.
    pub fn sg_graph(bc: Boundary, m: u32) -> Result<Self> {
        let scale = 1.5 * libm::pow(5.0, m as f64);
        let atoms = graph_spectrum(bc, m)?.into_iter().map(|(x, k)| (scale * x, k)).collect();
        Ok(Self::new(bc, CellSource::SgGraph { level: m }, atoms, f64::INFINITY))
    }

    /// Unit interval: `(kπ)²`, `k ≥ 1` (Dirichlet) or `k ≥ 0` (Neumann).
    pub fn interval_continuum(bc: Boundary, cap: f64) -> Result<Self> {
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(invalid("cap must be positive and finite"));
        }
        let first = if bc == Boundary::Dirichlet { 1 } else { 0 };
        let atoms = (first..)
            .map(|k| {
                let x = k as f64 * core::f64::consts::PI;
                (x * x, 1)
            })
            .take_while(|(v, _)| *v <= cap)
            .collect();
        Ok(Self::new(bc, CellSource::IntervalContinuum, atoms, cap))
    }

    /// Unit interval cut into `2^m` pieces: `(4/h²)·sin²(kπh/2)` with
    /// `1 ≤ k < 2^m` (Dirichlet) or `0 ≤ k ≤ 2^m` (Neumann).
    pub fn interval_graph(bc: Boundary, m: u32) -> Result<Self> {
        if m > 24 {
            return Err(invalid("interval level too deep"));
        }
        let n = 1usize << m;
        let h = 1.0 / n as f64;
        let range = if bc == Boundary::Dirichlet { 1..n } else { 0..n + 1 };
        let atoms = range
            .map(|k| {
                let s = libm::sin(k as f64 * core::f64::consts::PI * h / 2.0);
                (4.0 * s * s / (h * h), 1)
            })
            .collect();
        Ok(Self::new(bc, CellSource::IntervalGraph { level: m }, atoms, f64::INFINITY))
    }

    /// Number of eigenvalues `≤ λ` (0 for negative `λ`).
    pub fn count(&self, lambda: f64) -> Result<usize> {
        if lambda > self.cap {
            return Err(Error::OutOfRange { query: lambda, cap: self.cap });
        }
        let i = self.atoms.partition_point(|a| a.0 <= lambda);
        Ok(if i == 0 { 0 } else { self.cumulative[i - 1] })
    }

    pub fn atoms(&self) -> &[(f64, usize)] {
        &self.atoms
    }

    pub fn total(&self) -> usize {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn counting(&self) -> StepFunction {
        StepFunction::from_atoms(0.0, self.atoms.iter().map(|(v, k)| (*v, *k as f64))).expect("finite eigenvalues")
    }
}

/// Dirichlet and Neumann models of the same cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellPair {
    pub dirichlet: CellModel,
    pub neumann: CellModel,
}

impl CellPair {
    /// Graph models at level `m` (exact companions of the assembled
    /// operators) or continuum models capped at `cap`.
    pub fn new(kind: TemplateKind, level: Option<u32>, cap: f64) -> Result<Self> {
        let make = |bc| match (kind, level) {
            (TemplateKind::SierpinskiGasket, Some(m)) => CellModel::sg_graph(bc, m),
            (TemplateKind::SierpinskiGasket, None) => {
                decimation::enumerate_unchecked(bc, cap).map(|s| CellModel::from_decimation(&s))
            }
            (TemplateKind::Interval, Some(m)) => CellModel::interval_graph(bc, m),
            (TemplateKind::Interval, None) => CellModel::interval_continuum(bc, cap),
        };
        if kind == TemplateKind::SierpinskiGasket {
            decimation::gate(decimation::GATE_LEVEL)?;
        }
        Ok(CellPair { dirichlet: make(Boundary::Dirichlet)?, neumann: make(Boundary::Neumann)? })
    }

    pub fn cap(&self) -> f64 {
        self.dirichlet.cap.min(self.neumann.cap)
    }
}

/// `W(λ) = λ^{d_s/2}·G(½ log λ)`: nondecreasing, `W(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeylFunction {
    /// `c·λ^a`.
    Power { coefficient: f64, exponent: f64 },
    /// `W(scale^k·μ) = growth^k·w(μ)` with `w` a right-continuous step
    /// table on `[grid[0], scale·grid[0])`.
    LogPeriodic { scale: f64, growth: f64, grid: Vec<f64>, values: Vec<f64>, clamped: usize, clamp_size: f64 },
}

/// Folding report behind an empirical Weyl function.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylReport {
    pub dirichlet: GTable,
    pub neumann: GTable,
    /// Sup-distance between the Dirichlet and Neumann folds.
    pub boundary_distance: f64,
    /// Table values moved by more than rounding to keep `W` nondecreasing
    /// across the seam.
    pub clamped: usize,
    /// Largest relative change made by the clamp.
    pub clamp_size: f64,
}

impl WeylFunction {
    /// `√λ/π`, the classical one-dimensional Weyl term.
    pub fn interval() -> Self {
        WeylFunction::Power { coefficient: 1.0 / core::f64::consts::PI, exponent: 0.5 }
    }

    /// Empirical SG Weyl function: the Dirichlet and Neumann counting
    /// functions folded over the top `periods` periods below `cap` and
    /// averaged over the top `averaged` folds and both conditions.
    pub fn sg(cap: f64, periods: usize, averaged: usize, points: usize) -> Result<(Self, WeylReport)> {
        let pair = CellPair::new(TemplateKind::SierpinskiGasket, None, cap)?;
        let d_s = 2.0 * libm::log(3.0) / libm::log(5.0);
        let t = 0.5 * libm::log(5.0);
        let s1 = 0.5 * libm::log(cap);
        let s0 = s1 - periods as f64 * t;
        let (fd, fneu) = (pair.dirichlet.counting(), pair.neumann.counting());
        let gd = extract_g(|l| fd.eval(l), d_s, t, s0, s1, points, averaged)?;
        let gn = extract_g(|l| fneu.eval(l), d_s, t, s0, s1, points, averaged)?;
        let mean: Vec<f64> = gd.values.iter().zip(&gn.values).map(|(a, b)| 0.5 * (a + b)).collect();
        let w = Self::from_fold(d_s, t, s0, &gd.offsets, &mean)?;
        let (clamped, clamp_size) = match &w {
            WeylFunction::LogPeriodic { clamped, clamp_size, .. } => (*clamped, *clamp_size),
            WeylFunction::Power { .. } => (0, 0.0),
        };
        let boundary_distance = sup_distance(&gd.values, &gn.values);
        Ok((w, WeylReport { dirichlet: gd, neumann: gn, boundary_distance, clamped, clamp_size }))
    }

    /// Build `W` from a fold `G(s0 + o_i)` with period `T`.
    pub fn from_fold(d_s: f64, period: f64, s0: f64, offsets: &[f64], g: &[f64]) -> Result<Self> {
        if offsets.is_empty() || offsets.len() != g.len() || offsets[0] != 0.0 {
            return Err(invalid("fold offsets must start at 0 and match the values"));
        }
        let scale = libm::exp(2.0 * period);
        let growth = libm::exp(d_s * period);
        let grid: Vec<f64> = offsets.iter().map(|o| libm::exp(2.0 * (s0 + o))).collect();
        let mut values: Vec<f64> = offsets.iter().zip(g).map(|(o, v)| v * libm::exp(d_s * (s0 + o))).collect();
        if !(values[0] > 0.0) {
            return Err(invalid("Weyl table must start positive"));
        }
        let ceiling = growth * values[0];
        let mut clamped = 0;
        let mut clamp_size: f64 = 0.0;
        let mut running: f64 = 0.0;
        for v in values.iter_mut() {
            let target = v.max(running).min(ceiling);
            if target != *v {
                let size = (target - *v).abs() / v.abs();
                // plateaus of the counting function differ only by rounding
                if size > 1e-12 {
                    clamped += 1;
                }
                clamp_size = clamp_size.max(size);
                *v = target;
            }
            running = *v;
        }
        Ok(WeylFunction::LogPeriodic { scale, growth, grid, values, clamped, clamp_size })
    }

    /// Spectral dimension implied by the scaling.
    pub fn spectral_dimension(&self) -> f64 {
        match self {
            WeylFunction::Power { exponent, .. } => 2.0 * exponent,
            WeylFunction::LogPeriodic { scale, growth, .. } => 2.0 * libm::log(*growth) / libm::log(*scale),
        }
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        if !(lambda > 0.0) {
            return 0.0;
        }
        match self {
            WeylFunction::Power { coefficient, exponent } => coefficient * libm::pow(lambda, *exponent),
            WeylFunction::LogPeriodic { scale, growth, grid, values, .. } => {
                let (k, mu) = reduce(lambda, grid[0], *scale);
                let i = grid.partition_point(|g| *g <= mu).max(1) - 1;
                values[i] * libm::pow(*growth, k as f64)
            }
        }
    }

    /// Generalized inverse `inf{λ ≥ 0 : W(λ) ≥ t}`.
    pub fn inverse(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        match self {
            WeylFunction::Power { coefficient, exponent } => libm::pow(t / coefficient, 1.0 / exponent),
            WeylFunction::LogPeriodic { scale, growth, grid, values, .. } => {
                let (k, tau) = reduce(t, values[0], *growth);
                let i = values.partition_point(|v| *v < tau);
                let pk = libm::pow(*scale, k as f64);
                if i < values.len() {
                    grid[i] * pk
                } else {
                    grid[0] * pk * scale
                }
            }
        }
    }

    /// Monotonicity of the tabulated step function, seam included.
    pub fn is_monotone(&self) -> bool {
        match self {
            WeylFunction::Power { coefficient, exponent } => *coefficient > 0.0 && *exponent > 0.0,
            WeylFunction::LogPeriodic { growth, values, .. } => {
                values.windows(2).all(|w| w[0] <= w[1]) && values[values.len() - 1] <= growth * values[0]
            }
        }
    }
}

/// Write `x = base·q^k·μ` with `μ ∈ [1, q)`, returning `(k, base·μ)`.
fn reduce(x: f64, base: f64, q: f64) -> (i64, f64) {
    let mut k = libm::floor(libm::log(x / base) / libm::log(q)) as i64;
    let mut mu = x / libm::pow(q, k as f64);
    while mu < base {
        k -= 1;
        mu = x / libm::pow(q, k as f64);
    }
    while mu >= base * q {
        k += 1;
        mu = x / libm::pow(q, k as f64);
    }
    (k, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_models() {
        let d = CellModel::interval_continuum(Boundary::Dirichlet, 1e4).unwrap();
        let n = CellModel::interval_continuum(Boundary::Neumann, 1e4).unwrap();
        let pi = core::f64::consts::PI;
        for l in [1.0, 50.0, 400.0, 9000.0] {
            let k = libm::floor(libm::sqrt(l) / pi) as usize;
            assert_eq!(d.count(l).unwrap(), k);
            assert_eq!(n.count(l).unwrap(), k + 1);
        }
        assert!(d.count(2e4).is_err());
        let g = CellModel::interval_graph(Boundary::Neumann, 3).unwrap();
        assert_eq!(g.total(), 9);
        assert_eq!(g.count(0.0).unwrap(), 1);
    }

    #[test]
    fn sg_graph_model_has_full_dimension() {
        let d = CellModel::sg_graph(Boundary::Dirichlet, 3).unwrap();
        let n = CellModel::sg_graph(Boundary::Neumann, 3).unwrap();
        assert_eq!(d.total(), 39);
        assert_eq!(n.total(), 42);
    }

    #[test]
    fn power_weyl_function() {
        let w = WeylFunction::interval();
        assert!((w.eval(4.0 * core::f64::consts::PI * core::f64::consts::PI) - 2.0).abs() < 1e-12);
        assert!((w.inverse(2.0) - 4.0 * core::f64::consts::PI * core::f64::consts::PI).abs() < 1e-9);
        assert_eq!(w.eval(-1.0), 0.0);
        assert_eq!(w.spectral_dimension(), 1.0);
    }

    #[test]
    fn sg_weyl_function_scales_by_three() {
        let (w, report) = WeylFunction::sg(3.0 * libm::pow(5.0, 9.0), 3, 2, 512).unwrap();
        assert!(w.is_monotone());
        assert!((w.spectral_dimension() - 2.0 * libm::log(3.0) / libm::log(5.0)).abs() < 1e-12);
        for l in [0.3, 7.0, 123.0, 4567.0] {
            assert!((w.eval(5.0 * l) / w.eval(l) - 3.0).abs() < 1e-9);
        }
        assert!(report.boundary_distance < 0.05 * report.dirichlet.sup);
        // W tracks the Dirichlet count at large λ
        let d = CellModel::sg_continuum(Boundary::Dirichlet, 3e6).unwrap();
        let mut acc = 0.0;
        let grid = crate::fit::geometric_grid(1e5, 2.5e6, 200);
        for &l in &grid {
            acc += d.count(l).unwrap() as f64 / w.eval(l);
        }
        assert!((acc / grid.len() as f64 - 1.0).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn inverse_is_generalized(t in 1e-3f64..1e5) {
            let table = WeylFunction::from_fold(1.2, 0.7, 0.0, &[0.0, 0.2, 0.4, 0.6], &[1.0, 1.1, 1.0, 0.9]).unwrap();
            prop_assert!(table.is_monotone());
            let x = table.inverse(t);
            prop_assert!(table.eval(x) >= t * (1.0 - 1e-12));
            prop_assert!(table.eval(x * (1.0 - 1e-9)) < t * (1.0 + 1e-12));
        }
    }
}
