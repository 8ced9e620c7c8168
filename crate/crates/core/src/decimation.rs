//! Exact spectra of the compact SG(2) cell by spectral decimation.
//!
//! Level-`m` graph eigenvalues `x` are those of `4I - A` on the interior
//! vertices (Dirichlet) or of `4(I - P)` on all vertices (Neumann,
//! `P` the random-walk matrix). They satisfy `x_{m-1} = x_m(5 - x_m)`, so
//! every eigenvalue lifts along the branches `φ±(z) = (5 ± √(25 - 4z))/2`,
//! except that `0` lifts only to `0` and `6` only to `3` (the values
//! `2, 5, 6` are forbidden as lifts). The values `2, 5, 6` also appear as
//! newborns at each level; their multiplicities follow from the dimension,
//! the trace and the trace of the square, which are known in closed form,
//! by a 3×3 Vandermonde solve. The continuum eigenvalues are
//! `(3/2)·5^k·Φ(x_k)` with `Φ = lim 5^j φ-^j`.
//!
//! Nothing here is trusted: [`gate`] compares the enumerated graph spectra
//! with dense eigensolves of the assembled level-`m` operator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::approx::refine;
use crate::error::{invalid, Error, Result};
use crate::geometry::{build_blowup, build_sg2_template};
use crate::operator::{assemble, dense_spectrum, Boundary, Interface};
use crate::step::StepFunction;

/// Highest level checked by the dense gate.
pub const GATE_LEVEL: u32 = 4;

/// Relative tolerance of the dense gate.
pub const GATE_TOLERANCE: f64 = 1e-9;

/// One continuum eigenvalue family.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: f64,
    pub multiplicity: usize,
    /// Level at which the graph eigenvalue was born.
    pub generation: u32,
    /// Branch choices after birth, `+` or `-`, up to the last `+`.
    pub word: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecimationSpectrum {
    pub entries: Vec<Entry>,
    pub bc: Boundary,
    pub lambda_cap: f64,
}

/// Upper branch `φ+(z)`.
pub fn phi_plus(z: f64) -> f64 {
    0.5 * (5.0 + libm::sqrt(25.0 - 4.0 * z))
}

/// Lower branch `φ-(z)`, in the cancellation-free form `2z/(5 + √(25-4z))`.
pub fn phi_minus(z: f64) -> f64 {
    2.0 * z / (5.0 + libm::sqrt(25.0 - 4.0 * z))
}

/// `Φ(x) = lim_j 5^j φ-^j(x)`.
pub fn phi_limit(x: f64) -> f64 {
    let mut y = x;
    let mut scale = 1.0;
    while y > 1e-18 {
        y = phi_minus(y);
        scale *= 5.0;
    }
    // the remaining factor 1 + y/25 + ... is 1 to working precision
    scale * y
}

fn pow5(k: u32) -> f64 {
    libm::pow(5.0, k as f64)
}

fn pow3(k: u32) -> i128 {
    3i128.pow(k)
}

/// Aggregate statistics of the level-`m` graph spectrum.
#[derive(Clone, Copy, Debug)]
struct Moments {
    count: i128,
    trace: i128,
    zeros: i128,
    sixes: i128,
}

/// Closed-form dimension and trace of the square at level `m ≥ 1`.
fn dimension(bc: Boundary, m: u32) -> i128 {
    match bc {
        Boundary::Dirichlet => (pow3(m + 1) - 3) / 2,
        Boundary::Neumann => (pow3(m + 1) + 3) / 2,
    }
}

fn trace_of_square(bc: Boundary, m: u32) -> i128 {
    let n = dimension(bc, m);
    match bc {
        Boundary::Dirichlet => 16 * n + 2 * (pow3(m + 1) - 6),
        Boundary::Neumann => 16 * n + 2 * (pow3(m + 1) + 6),
    }
}

/// Level-0 spectrum.
fn seeds(bc: Boundary) -> Vec<(f64, usize)> {
    match bc {
        Boundary::Dirichlet => Vec::new(),
        Boundary::Neumann => vec![(0.0, 1), (6.0, 2)],
    }
}

/// Newborn multiplicities `[n2, n5, n6]` for levels `0..=m_max` (level 0
/// has none: its spectrum is the seed).
pub fn newborns(bc: Boundary, m_max: u32) -> Result<Vec<[usize; 3]>> {
    let mut out = vec![[0usize; 3]];
    let s = seeds(bc);
    let mut mo = Moments {
        count: s.iter().map(|x| x.1 as i128).sum(),
        trace: s.iter().map(|(v, k)| *v as i128 * *k as i128).sum(),
        zeros: s.iter().filter(|x| x.0 == 0.0).map(|x| x.1 as i128).sum(),
        sixes: s.iter().filter(|x| x.0 == 6.0).map(|x| x.1 as i128).sum(),
    };
    for m in 1..=m_max {
        if m > 60 {
            return Err(invalid("decimation level too deep"));
        }
        let split = mo.count - mo.zeros - mo.sixes;
        let count = 2 * split + mo.zeros + mo.sixes;
        let s1 = 5 * split + 3 * mo.sixes;
        // φ+² + φ-² = 25 - 2z for each split value z
        let s2 = 25 * split - 2 * (mo.trace - 6 * mo.sixes) + 9 * mo.sixes;
        let b0 = dimension(bc, m) - count;
        let b1 = 4 * dimension(bc, m) - s1;
        let b2 = trace_of_square(bc, m) - s2;
        // [1 1 1; 2 5 6; 4 25 36] n = b, determinant 12
        let n2 = 30 * b0 - 11 * b1 + b2;
        let n5 = -48 * b0 + 32 * b1 - 4 * b2;
        let n6 = 30 * b0 - 21 * b1 + 3 * b2;
        let n = [n2, n5, n6];
        if n.iter().any(|x| x % 12 != 0 || *x < 0) {
            return Err(Error::GateFailure(format!("level {m}: newborn multiplicities {n:?}/12 are not counts")));
        }
        let n = n.map(|x| x / 12);
        out.push(n.map(|x| x as usize));
        mo = Moments {
            count: dimension(bc, m),
            trace: 4 * dimension(bc, m),
            zeros: mo.zeros,
            sixes: n[2],
        };
    }
    Ok(out)
}

/// Level-`m` graph spectrum (eigenvalues `x` of the normalized operator)
/// as sorted `(value, multiplicity)` pairs.
pub fn graph_spectrum(bc: Boundary, m: u32) -> Result<Vec<(f64, usize)>> {
    let born = newborns(bc, m)?;
    let mut level = seeds(bc);
    for n in born.iter().skip(1) {
        let mut next = Vec::with_capacity(2 * level.len() + 3);
        for &(z, k) in &level {
            if z == 0.0 {
                next.push((0.0, k));
            } else if z == 6.0 {
                next.push((3.0, k));
            } else {
                next.push((phi_plus(z), k));
                next.push((phi_minus(z), k));
            }
        }
        for (v, k) in [2.0, 5.0, 6.0].into_iter().zip(n) {
            if *k > 0 {
                next.push((v, *k));
            }
        }
        level = next;
    }
    level.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(level)
}

/// Result of the dense comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    /// `(bc, level, dimension, max relative deviation)`.
    pub checks: Vec<(Boundary, u32, usize, f64)>,
}

/// Compare the enumerated level-`m` spectra with dense eigensolves of the
/// assembled single-cell operator for `1 ≤ m ≤ max_level`, both boundary
/// conditions, value by value with multiplicity.
pub fn gate(max_level: u32) -> Result<GateReport> {
    let template = build_sg2_template();
    let cell = build_blowup(&template, &[1], 0)?;
    let mut checks = Vec::new();
    for bc in [Boundary::Dirichlet, Boundary::Neumann] {
        for m in 1..=max_level {
            let g = refine(&cell, m)?;
            let op = assemble(&g, Interface::Glued, bc, None)?;
            let scale = 1.5 * pow5(m);
            let dense: Vec<f64> = dense_spectrum(&op)?.eigenvalues().iter().map(|x| x / scale).collect();
            let mut listed: Vec<f64> = Vec::with_capacity(dense.len());
            for (v, k) in graph_spectrum(bc, m)? {
                listed.extend(core::iter::repeat_n(v, k));
            }
            if listed.len() != dense.len() {
                return Err(Error::GateFailure(format!(
                    "{bc:?} level {m}: {} enumerated vs {} dense eigenvalues",
                    listed.len(),
                    dense.len()
                )));
            }
            let mut worst: f64 = 0.0;
            for (a, b) in listed.iter().zip(&dense) {
                let dev = (a - b).abs() / a.abs().max(1.0);
                worst = worst.max(dev);
                if dev > GATE_TOLERANCE {
                    return Err(Error::GateFailure(format!("{bc:?} level {m}: enumerated {a} vs dense {b}")));
                }
            }
            checks.push((bc, m, dense.len(), worst));
        }
    }
    Ok(GateReport { checks })
}

/// All continuum eigenvalues `≤ lambda_cap` with multiplicities, after the
/// dense gate has passed.
pub fn enumerate_sg_spectrum(bc: Boundary, lambda_cap: f64) -> Result<DecimationSpectrum> {
    gate(GATE_LEVEL)?;
    enumerate_unchecked(bc, lambda_cap)
}

pub(crate) fn enumerate_unchecked(bc: Boundary, lambda_cap: f64) -> Result<DecimationSpectrum> {
    if !(lambda_cap > 0.0) || !lambda_cap.is_finite() {
        return Err(invalid("lambda_cap must be positive and finite"));
    }
    // a newborn at level k is worth at least (3/2)·5^k·2; any `+` lift at
    // level j at least (3/2)·5^j·(5/2)
    let mut k_max = 0u32;
    while 3.0 * pow5(k_max + 1) <= lambda_cap {
        k_max += 1;
    }
    let born = newborns(bc, k_max)?;
    let mut entries = Vec::new();
    let mut stack: Vec<(f64, u32, u32, String, usize)> = Vec::new();
    for (v, k) in seeds(bc) {
        stack.push((v, 0, 0, String::new(), k));
    }
    for (level, n) in born.iter().enumerate().skip(1) {
        for (v, k) in [2.0, 5.0, 6.0].into_iter().zip(n) {
            if *k > 0 {
                stack.push((v, level as u32, level as u32, String::new(), *k));
            }
        }
    }
    while let Some((x, level, generation, word, mult)) = stack.pop() {
        let canonical = if word.is_empty() { x != 6.0 } else { word.ends_with('+') };
        if canonical {
            let value = 1.5 * pow5(level) * phi_limit(x);
            if value <= lambda_cap {
                entries.push(Entry { value, multiplicity: mult, generation, word: word.clone() });
            }
        }
        if x == 0.0 || 3.75 * pow5(level + 1) > lambda_cap {
            continue;
        }
        let mut plus = word.clone();
        plus.push('+');
        stack.push((phi_plus(x), level + 1, generation, plus, mult));
        if x != 6.0 {
            let mut minus = word;
            minus.push('-');
            stack.push((phi_minus(x), level + 1, generation, minus, mult));
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.generation.cmp(&b.generation)));
    Ok(DecimationSpectrum { entries, bc, lambda_cap })
}

impl DecimationSpectrum {
    /// Number of eigenvalues `≤ λ` with multiplicity.
    pub fn count(&self, lambda: f64) -> Result<usize> {
        if lambda > self.lambda_cap {
            return Err(Error::OutOfRange { query: lambda, cap: self.lambda_cap });
        }
        Ok(self.entries.iter().take_while(|e| e.value <= lambda).map(|e| e.multiplicity).sum())
    }

    /// Total number of eigenvalues below the cap.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Sorted values repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total());
        for e in &self.entries {
            out.extend(core::iter::repeat_n(e.value, e.multiplicity));
        }
        out
    }
}

/// Right-continuous counting function of an enumerated spectrum; it is
/// exact on `[0, lambda_cap]`.
pub fn single_cell_counting(spec: &DecimationSpectrum) -> StepFunction {
    StepFunction::from_atoms(0.0, spec.entries.iter().map(|e| (e.value, e.multiplicity as f64)))
        .expect("finite eigenvalues")
}

/// A fold of `λ^{-d_s/2}N(λ)` over one period `T` in `s = ½ log λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GTable {
    pub d_s: f64,
    pub period: f64,
    /// Start of the first folded period.
    pub s0: f64,
    /// Offsets in `[0, T)`.
    pub offsets: Vec<f64>,
    /// One row per period, lowest first.
    pub folds: Vec<Vec<f64>>,
    /// Mean of the topmost `averaged` folds.
    pub values: Vec<f64>,
    pub averaged: usize,
    pub inf: f64,
    pub sup: f64,
    /// Sup-distance between the last two folds.
    pub fold_distance: f64,
}

/// Fold `λ^{-d_s/2}·counting(λ)` over the periods `[s0 + jT, s0 + (j+1)T)`
/// contained in `[s0, s1]`, sampling `points` offsets per period, and
/// average the topmost `averaged` folds.
pub fn extract_g(
    counting: impl Fn(f64) -> f64,
    d_s: f64,
    period: f64,
    s0: f64,
    s1: f64,
    points: usize,
    averaged: usize,
) -> Result<GTable> {
    if !(period > 0.0) || points == 0 || averaged == 0 {
        return Err(invalid("period, points and averaged must be positive"));
    }
    let periods = libm::floor((s1 - s0) / period + 1e-9) as usize;
    if periods < 3 || periods < averaged {
        return Err(Error::InsufficientData(format!("{periods} periods in the counting span, need 3")));
    }
    let offsets: Vec<f64> = (0..points).map(|i| period * i as f64 / points as f64).collect();
    let folds: Vec<Vec<f64>> = (0..periods)
        .map(|j| {
            offsets
                .iter()
                .map(|o| {
                    let s = s0 + j as f64 * period + o;
                    let lambda = libm::exp(2.0 * s);
                    counting(lambda) * libm::exp(-d_s * s)
                })
                .collect()
        })
        .collect();
    let top = &folds[periods - averaged..];
    let values: Vec<f64> = (0..points).map(|i| top.iter().map(|f| f[i]).sum::<f64>() / averaged as f64).collect();
    let inf = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let sup = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fold_distance = sup_distance(&folds[periods - 1], &folds[periods - 2]);
    Ok(GTable { d_s, period, s0, offsets, folds, values, averaged, inf, sup, fold_distance })
}

/// `max |a_i - b_i|`.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d_s() -> f64 {
        2.0 * libm::log(3.0) / libm::log(5.0)
    }

    #[test]
    fn branches_invert_the_map() {
        for z in [0.3, 2.0, 5.0, 6.0] {
            for x in [phi_plus(z), phi_minus(z)] {
                assert!((x * (5.0 - x) - z).abs() < 1e-12);
            }
        }
        assert_eq!(phi_minus(0.0), 0.0);
        assert!((phi_limit(1e-6) / 1e-6 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn level_one_newborns() {
        assert_eq!(newborns(Boundary::Dirichlet, 1).unwrap()[1], [1, 2, 0]);
        assert_eq!(graph_spectrum(Boundary::Dirichlet, 1).unwrap(), vec![(2.0, 1), (5.0, 2)]);
        let n = graph_spectrum(Boundary::Neumann, 2).unwrap();
        assert_eq!(n.iter().map(|x| x.1).sum::<usize>(), 15);
    }

    #[test]
    fn gate_passes() {
        let r = gate(GATE_LEVEL).unwrap();
        assert_eq!(r.checks.len(), 2 * GATE_LEVEL as usize);
        assert!(r.checks.iter().all(|c| c.3 <= GATE_TOLERANCE));
    }

    #[test]
    fn first_eigenvalues() {
        let n = enumerate_sg_spectrum(Boundary::Neumann, 500.0).unwrap();
        assert_eq!(n.entries[0].value, 0.0);
        assert_eq!(n.entries[0].multiplicity, 1);
        let d = enumerate_sg_spectrum(Boundary::Dirichlet, 500.0).unwrap();
        assert_eq!(d.count(0.0).unwrap(), 0);
        // first Dirichlet eigenvalue (3/2)·5·Φ(2)
        assert!((d.entries[0].value - 7.5 * phi_limit(2.0)).abs() < 1e-9);
        assert!(d.count(1000.0).is_err());
    }

    #[test]
    fn neumann_dominates_dirichlet_by_at_most_three() {
        let d = enumerate_unchecked(Boundary::Dirichlet, 2e5).unwrap();
        let n = enumerate_unchecked(Boundary::Neumann, 2e5).unwrap();
        for lambda in crate::fit::geometric_grid(1.0, 2e5, 400) {
            let (a, b) = (d.count(lambda).unwrap(), n.count(lambda).unwrap());
            assert!(a <= b && b <= a + 3, "{lambda}: {a} {b}");
        }
    }

    #[test]
    fn weyl_ratio_is_bounded_and_self_similar() {
        let d = enumerate_unchecked(Boundary::Dirichlet, 2e6).unwrap();
        let f = single_cell_counting(&d);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut ratio = 0.0;
        let grid = crate::fit::geometric_grid(1000.0, 125000.0, 300);
        for &l in &grid {
            let w = f.eval(l) / libm::pow(l, d_s() / 2.0);
            lo = lo.min(w);
            hi = hi.max(w);
            ratio += f.eval(5.0 * l) / f.eval(l);
        }
        assert!(lo > 0.0 && hi / lo < 2.5, "{lo} {hi}");
        assert!((ratio / grid.len() as f64 / 3.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn fold_of_a_pure_power_is_one() {
        let g = extract_g(|l| libm::pow(l, 0.7), 1.4, 0.8, 0.0, 4.0, 64, 2).unwrap();
        assert!(g.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(g.fold_distance < 1e-12);
        assert!(extract_g(|l| l, 2.0, 1.0, 0.0, 2.5, 8, 1).is_err());
    }

    #[test]
    fn folds_agree_across_boundary_conditions() {
        let t = 0.5 * libm::log(5.0);
        let d = enumerate_unchecked(Boundary::Dirichlet, 2e7).unwrap();
        let n = enumerate_unchecked(Boundary::Neumann, 2e7).unwrap();
        let (fd, fneu) = (single_cell_counting(&d), single_cell_counting(&n));
        let s1 = 0.5 * libm::log(2e7);
        let s0 = s1 - 5.0 * t;
        let gd = extract_g(|l| fd.eval(l), d_s(), t, s0, s1, 256, 2).unwrap();
        let gn = extract_g(|l| fneu.eval(l), d_s(), t, s0, s1, 256, 2).unwrap();
        assert!(sup_distance(&gd.values, &gn.values) < 0.05 * gd.sup);
        assert!(gd.fold_distance < 0.05 * gd.sup);
        assert!(gd.inf > 0.0);
    }
}
