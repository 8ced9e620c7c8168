//! Bracketed eigenvalue counts, Bohr's asymptotic function `g`, its
//! envelope versions and remainders, error bounds, and spectral-dimension
//! fits.
//!
//! With `N^b_K` the single-cell counts and `V^∧`, `V^∨` the cell sup and
//! inf of the potential,
//!
//! ```text
//! N^∧(λ) = Σ_α N^D_K(λ - V^∧_α)  ≤  N(λ)  ≤  N^∨(λ) = Σ_α N^N_K(λ - V^∨_α)
//! g(λ)   = ∫ W((λ - V)_+) dμ,      g^b(λ) = Σ_α μ_α W((λ - V^b_α)_+)
//! N^b    = g^b + R^b
//! ```

use alloc::format;
use alloc::vec::Vec;

use crate::approx::GraphApprox;
use crate::cell::{CellModel, CellPair, WeylFunction};
use crate::error::{invalid, Error, Result};
use crate::fit::line_fit;
use crate::operator::{assemble, count_below, Boundary, Interface, OperatorInstance};
use crate::potential::PotentialField;
use crate::step::StepFunction;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BracketedCount {
    pub lambda: f64,
    /// `N^∧`.
    pub lower: usize,
    /// `N^∨`.
    pub upper: usize,
    /// Glued count with a Dirichlet rim.
    pub direct_dirichlet: Option<usize>,
    /// Glued count with a Neumann rim.
    pub direct_neumann: Option<usize>,
    /// Largest shift used by the direct counts.
    pub epsilon: f64,
    /// `Some(agree)` when the rim lies where `V ≥ 2λ`.
    pub rim_check: Option<bool>,
}

impl BracketedCount {
    /// The direct count: the Dirichlet-rim one when both are present.
    pub fn direct(&self) -> Option<usize> {
        self.direct_dirichlet.or(self.direct_neumann)
    }

    /// Every available count lies in `[lower, upper]`.
    pub fn is_consistent(&self) -> bool {
        let inside = |n: Option<usize>| n.is_none_or(|n| self.lower <= n && n <= self.upper);
        self.lower <= self.upper && inside(self.direct_dirichlet) && inside(self.direct_neumann)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper) as f64
    }
}

/// Cell envelopes with masses, ready for bracket sums.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelopes {
    pub sup: Vec<f64>,
    pub inf: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Envelopes {
    pub fn new(graph: &GraphApprox, field: &PotentialField) -> Self {
        let mass = graph.incidence.iter().map(|inc| inc.iter().map(|(_, m)| m).sum()).collect();
        Envelopes { sup: field.cell_sup.clone(), inf: field.cell_inf.clone(), mass }
    }
}

fn cell_sum(model: &CellModel, envelope: &[f64], lambda: f64) -> Result<usize> {
    let mut n = 0;
    for v in envelope {
        if *v <= lambda {
            n += model.count(lambda - v)?;
        }
    }
    Ok(n)
}

/// `(N^∧(λ), N^∨(λ))` from the cell sums.
pub fn bracket_sums(cells: &CellPair, env: &Envelopes, lambda: f64) -> Result<(usize, usize)> {
    Ok((cell_sum(&cells.dirichlet, &env.sup, lambda)?, cell_sum(&cells.neumann, &env.inf, lambda)?))
}

/// The glued operator with both rim conditions, for direct counts.
#[derive(Clone, Debug)]
pub struct DirectCounter {
    pub dirichlet: OperatorInstance,
    pub neumann: OperatorInstance,
    /// Smallest potential value on the truncation rim.
    pub rim_min: f64,
}

impl DirectCounter {
    pub fn new(graph: &GraphApprox, field: &PotentialField) -> Result<Self> {
        let rim_min = graph
            .tags
            .iter()
            .zip(&field.vertex_values)
            .filter(|(t, _)| **t == crate::approx::VertexTag::TruncationBoundary)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min);
        Ok(DirectCounter {
            dirichlet: assemble(graph, Interface::Glued, Boundary::Dirichlet, Some(field))?,
            neumann: assemble(graph, Interface::Glued, Boundary::Neumann, Some(field))?,
            rim_min,
        })
    }

    /// `(Dirichlet-rim count, Neumann-rim count, shift)`.
    pub fn counts(&self, lambda: f64) -> Result<(usize, usize, f64)> {
        let d = count_below(&self.dirichlet, lambda)?;
        let n = count_below(&self.neumann, lambda)?;
        Ok((d.count, n.count, d.epsilon.max(n.epsilon)))
    }
}

/// Bracket sums at `λ`, plus the direct counts when `direct` is given.
pub fn bracketed_count(
    cells: &CellPair,
    env: &Envelopes,
    direct: Option<&DirectCounter>,
    lambda: f64,
) -> Result<BracketedCount> {
    let (lower, upper) = bracket_sums(cells, env, lambda)?;
    let mut out = BracketedCount {
        lambda,
        lower,
        upper,
        direct_dirichlet: None,
        direct_neumann: None,
        epsilon: 0.0,
        rim_check: None,
    };
    if let Some(dc) = direct {
        let (d, n, eps) = dc.counts(lambda)?;
        out.direct_dirichlet = Some(d);
        out.direct_neumann = Some(n);
        out.epsilon = eps;
        if dc.rim_min >= 2.0 * lambda {
            out.rim_check = Some(d == n);
        }
    }
    Ok(out)
}

/// One grid point of Bohr's function and its envelope versions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BohrRow {
    pub lambda: f64,
    pub g: f64,
    /// `g^∧`, from `V^∧`.
    pub g_sup: f64,
    /// `g^∨`, from `V^∨`.
    pub g_inf: f64,
    /// `R^∧ = N^∧ - g^∧`.
    pub r_sup: f64,
    /// `R^∨ = N^∨ - g^∨`.
    pub r_inf: f64,
    pub lower: usize,
    pub upper: usize,
}

impl BohrRow {
    /// `g^b + R^b` reproduce the bracket sums.
    pub fn identity_defect(&self) -> f64 {
        let a = (self.g_sup + self.r_sup - self.lower as f64).abs() / (self.lower as f64).max(1.0);
        let b = (self.g_inf + self.r_inf - self.upper as f64).abs() / (self.upper as f64).max(1.0);
        a.max(b)
    }
}

/// `g(λ) = Σ m·W((λ - V)_+)` over all (cell, vertex) incidences.
pub fn g_direct(graph: &GraphApprox, field: &PotentialField, w: &WeylFunction, lambda: f64) -> f64 {
    let mut g = 0.0;
    for (inc, vals) in graph.incidence.iter().zip(&field.incidence_values) {
        for ((_, m), v) in inc.iter().zip(vals) {
            if *v < lambda {
                g += m * w.eval(lambda - v);
            }
        }
    }
    g
}

/// `Σ_α μ_α W((λ - V^b_α)_+)` and `Σ_α [N_K(λ - V^b_α) - μ_α W(λ - V^b_α)]`.
fn envelope_sum(model: &CellModel, envelope: &[f64], mass: &[f64], w: &WeylFunction, lambda: f64) -> Result<(f64, f64, usize)> {
    let mut g = 0.0;
    let mut r = 0.0;
    let mut n = 0;
    for (v, m) in envelope.iter().zip(mass) {
        if *v <= lambda {
            let wv = m * w.eval(lambda - v);
            let k = model.count(lambda - v)?;
            g += wv;
            r += k as f64 - wv;
            n += k;
        }
    }
    Ok((g, r, n))
}

pub fn bohr_row(
    graph: &GraphApprox,
    field: &PotentialField,
    env: &Envelopes,
    cells: &CellPair,
    w: &WeylFunction,
    lambda: f64,
) -> Result<BohrRow> {
    let (g_sup, r_sup, lower) = envelope_sum(&cells.dirichlet, &env.sup, &env.mass, w, lambda)?;
    let (g_inf, r_inf, upper) = envelope_sum(&cells.neumann, &env.inf, &env.mass, w, lambda)?;
    Ok(BohrRow { lambda, g: g_direct(graph, field, w, lambda), g_sup, g_inf, r_sup, r_inf, lower, upper })
}

pub fn bohr_g(
    graph: &GraphApprox,
    field: &PotentialField,
    cells: &CellPair,
    w: &WeylFunction,
    grid: &[f64],
) -> Result<Vec<BohrRow>> {
    if !w.is_monotone() {
        return Err(invalid("the Weyl function table is not nondecreasing"));
    }
    let env = Envelopes::new(graph, field);
    grid.iter().map(|l| bohr_row(graph, field, &env, cells, w, *l)).collect()
}

/// `max_b |g^{b̃}/g^b - 1 + R^{b̃}/g^b|`, which bounds `|N/g - 1|`.
pub fn bohr_error_bound(row: &BohrRow) -> Result<f64> {
    if !(row.g_sup > 0.0 && row.g_inf > 0.0) {
        return Err(Error::InsufficientData(format!("g^b vanishes at λ = {}", row.lambda)));
    }
    let a = (row.g_inf / row.g_sup - 1.0 + row.r_inf / row.g_sup).abs();
    let b = (row.g_sup / row.g_inf - 1.0 + row.r_sup / row.g_inf).abs();
    Ok(a.max(b))
}

/// Layer-cake form `g(λ) = ∫_0^{W(λ)} F(λ - W⁻¹(t)) dt`, by adaptive
/// bisection of the nonincreasing integrand: an interval is accepted when
/// the integrand varies by at most a share of the budget proportional to
/// its width, or when it is narrow enough that an unresolved jump cannot
/// exceed that share.
pub fn bohr_g_layercake(f: &StepFunction, w: &WeylFunction, lambda: f64, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0) {
        return Err(invalid("rel_tol must be positive"));
    }
    let top = w.eval(lambda);
    let f0 = f.eval(lambda);
    if !(top > 0.0) || f0 == 0.0 {
        return Ok(0.0);
    }
    let integrand = |t: f64| f.eval(lambda - w.inverse(t));
    // coarse lower estimate fixes the absolute budget
    let coarse_n = 256;
    let coarse: f64 = (1..=coarse_n).map(|i| integrand(top * i as f64 / coarse_n as f64)).sum::<f64>() * top / coarse_n as f64;
    let budget = rel_tol * 0.1 * coarse.max(f64::MIN_POSITIVE);
    let min_width = budget / f0;
    let mut total = 0.0;
    let mut stack = alloc::vec![(0.0, top, integrand(0.0), integrand(top))];
    while let Some((a, b, fa, fb)) = stack.pop() {
        let width = b - a;
        if (fa - fb) * width <= budget * width / top || width <= min_width {
            total += 0.5 * (fa + fb) * width;
            continue;
        }
        let mid = 0.5 * (a + b);
        let fm = integrand(mid);
        stack.push((a, mid, fa, fm));
        stack.push((mid, b, fm, fb));
    }
    Ok(total)
}

/// The shipped `λ* = λ(1 + λ^{-1/2})`.
pub fn lambda_star(lambda: f64) -> f64 {
    lambda * (1.0 + 1.0 / libm::sqrt(lambda))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakBohrReport {
    /// `(λ, λ*, F^∨(λ)/F^∧(λ*), F^∧(λ)/F^∨(λ*))`.
    pub table: Vec<(f64, f64, f64, f64)>,
    /// `|ratio - 1|` averaged over the first and last quarter of the top
    /// decade, for both ratios.
    pub trend: [(f64, f64); 2],
    pub pass: bool,
}

/// Both ratios of the weak-Bohr hypothesis on `grid` for the rule `star`.
/// The check passes when both move toward 1 over the top decade (or sit
/// within `1e-12` of it).
pub fn weak_bohr_check(
    f_sup: &StepFunction,
    f_inf: &StepFunction,
    star: impl Fn(f64) -> f64,
    grid: &[f64],
) -> Result<WeakBohrReport> {
    let table: Vec<(f64, f64, f64, f64)> = grid
        .iter()
        .filter(|l| f_sup.eval(**l) > 0.0)
        .map(|&l| {
            let s = star(l);
            (l, s, f_inf.eval(l) / f_sup.eval(s), f_sup.eval(l) / f_inf.eval(s))
        })
        .collect();
    let hi = grid.iter().cloned().fold(0.0, f64::max);
    let top: Vec<_> = table.iter().filter(|r| r.0 >= hi / 10.0).collect();
    if top.len() < 4 {
        return Err(Error::InsufficientData("weak-Bohr check needs four points in the top decade".into()));
    }
    let q = top.len() / 4;
    let mean = |rows: &[&(f64, f64, f64, f64)], pick: fn(&(f64, f64, f64, f64)) -> f64| {
        rows.iter().map(|r| (pick(r) - 1.0).abs()).sum::<f64>() / rows.len() as f64
    };
    let first = &top[..q.max(1)];
    let last = &top[top.len() - q.max(1)..];
    let trend = [(mean(first, |r| r.2), mean(last, |r| r.2)), (mean(first, |r| r.3), mean(last, |r| r.3))];
    let pass = trend.iter().all(|(a, b)| b <= a || *b < 1e-12);
    Ok(WeakBohrReport { table, trend, pass })
}

/// Trailing means of `(λ, y)` samples (sorted by `λ`) over one period
/// `(λ/factor, λ]`, for every `λ` whose whole period lies in the table.
pub fn period_average(samples: &[(f64, f64)], factor: f64) -> Vec<(f64, f64)> {
    let Some(first) = samples.first().map(|s| s.0) else {
        return Vec::new();
    };
    samples
        .iter()
        .filter(|(l, _)| *l / factor >= first * (1.0 - 1e-12))
        .map(|(l, _)| {
            let window: Vec<f64> = samples.iter().filter(|(m, _)| *m > *l / factor && *m <= *l).map(|s| s.1).collect();
            (*l, window.iter().sum::<f64>() / window.len() as f64)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralFit {
    /// `2 × slope` of `log N` against `log λ`, `N` the bracket midpoint.
    pub d_s: f64,
    /// Half the spread between the fits of the lower and upper counts.
    pub confidence: f64,
    pub rms: f64,
}

/// Fit `log N = (d_s(V)/2) log λ + c` over a table spanning a decade.
pub fn fit_spectral_dimension(counts: &[BracketedCount]) -> Result<SpectralFit> {
    let rows: Vec<&BracketedCount> = counts.iter().filter(|c| c.lower > 0).collect();
    if rows.len() < 2 {
        return Err(Error::InsufficientData("need counts with N^∧ > 0".into()));
    }
    let lo = rows.iter().map(|c| c.lambda).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|c| c.lambda).fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!("λ spans {lo}..{hi}, less than a decade")));
    }
    let xs: Vec<f64> = rows.iter().map(|c| libm::log(c.lambda)).collect();
    let fit = |f: &dyn Fn(&BracketedCount) -> f64| -> Result<crate::fit::LineFit> {
        let ys: Vec<f64> = rows.iter().map(|c| libm::log(f(c))).collect();
        line_fit(&xs, &ys)
    };
    let mid = fit(&|c| c.midpoint())?;
    let lower = fit(&|c| c.lower as f64)?;
    let upper = fit(&|c| c.upper as f64)?;
    Ok(SpectralFit { d_s: 2.0 * mid.slope, confidence: (upper.slope - lower.slope).abs(), rms: mid.rms })
}

/// Fit of `log N` against `log λ` for plain counts (e.g. single-cell
/// counting functions), returning `d_s = 2 × slope`.
pub fn fit_counts(lambdas: &[f64], counts: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = lambdas
        .iter()
        .zip(counts)
        .filter(|(_, n)| **n > 0.0)
        .map(|(l, n)| (libm::log(*l), libm::log(*n)))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    Ok(2.0 * line_fit(&xs, &ys)?.slope)
}
