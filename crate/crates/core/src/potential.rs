//! Potentials on graph approximations, their cell envelopes, distribution
//! functions, and checks of the growth / regularity hypotheses behind
//! Bohr's formula.
//!
//! A potential is stored per (cell, vertex) incidence, so a junction vertex
//! can carry a different value in each cell it belongs to. Point potentials
//! simply repeat the vertex value; cell-constant potentials use this to make
//! `V^∧ = V^∨` exact.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::approx::{refine, DistanceField, GraphApprox, MetricKind, VertexTag};
use crate::error::{invalid, Error, Result};
use crate::fit::{geometric_grid, least_squares_slope};
use crate::geometry::CellComplex;
use crate::linalg::{Ldlt, SymmetricSparse};
use crate::step::StepFunction;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    /// `V(x) = c·d(0,x)^β`.
    PowerDistance { c: f64, beta: f64, metric: MetricKind },
    /// `V ≡ c·(D·h_α)^β` on cell `α`, where `h_α` is its Γ-hop distance from
    /// the origin cells and `D` the template diameter.
    CellConstant { c: f64, beta: f64 },
    /// Discrete solution of `ΔV = 1`, shifted to minimum 0.
    GraphHarmonic,
    /// Explicit per-vertex values.
    Table(Vec<f64>),
}

impl PotentialSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::PowerDistance { c, beta, .. } | PotentialSpec::CellConstant { c, beta } => {
                if !(*c > 0.0 && *beta > 0.0) {
                    return Err(invalid("power potentials need c > 0 and β > 0"));
                }
            }
            PotentialSpec::Table(v) => {
                if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                    return Err(invalid("tabulated potential must be finite and ≥ 0"));
                }
            }
            PotentialSpec::GraphHarmonic => {}
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialField {
    /// Mass-weighted mean of the incidence values at each vertex.
    pub vertex_values: Vec<f64>,
    /// Per cell, aligned with [`GraphApprox::incidence`].
    pub incidence_values: Vec<Vec<f64>>,
    /// `V^∧|_{K_α}`.
    pub cell_sup: Vec<f64>,
    /// `V^∨|_{K_α}`.
    pub cell_inf: Vec<f64>,
}

impl PotentialField {
    pub fn zero(graph: &GraphApprox) -> Self {
        Self::from_vertex_values(graph, vec![0.0; graph.vertex_count()])
    }

    pub fn from_vertex_values(graph: &GraphApprox, values: Vec<f64>) -> Self {
        let incidence_values = graph.incidence.iter().map(|inc| inc.iter().map(|(v, _)| values[*v]).collect()).collect();
        Self::from_incidence(graph, incidence_values)
    }

    pub fn from_incidence(graph: &GraphApprox, incidence_values: Vec<Vec<f64>>) -> Self {
        let mut num = vec![0.0; graph.vertex_count()];
        let mut den = vec![0.0; graph.vertex_count()];
        for (inc, vals) in graph.incidence.iter().zip(&incidence_values) {
            for ((v, m), x) in inc.iter().zip(vals) {
                num[*v] += m * x;
                den[*v] += m;
            }
        }
        let vertex_values = num.iter().zip(&den).map(|(n, d)| n / d).collect();
        let cell_sup = incidence_values.iter().map(|v| v.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b))).collect();
        let cell_inf = incidence_values.iter().map(|v| v.iter().fold(f64::INFINITY, |a, b| a.min(*b))).collect();
        PotentialField { vertex_values, incidence_values, cell_sup, cell_inf }
    }

    /// `V^∧ = V^∨` on every cell.
    pub fn is_cell_constant(&self) -> bool {
        self.cell_sup.iter().zip(&self.cell_inf).all(|(a, b)| a == b)
    }

    pub fn min(&self) -> f64 {
        self.cell_inf.iter().fold(f64::INFINITY, |a, b| a.min(*b))
    }
}

pub fn evaluate(
    spec: &PotentialSpec,
    complex: &CellComplex,
    graph: &GraphApprox,
    distances: Option<&DistanceField>,
) -> Result<PotentialField> {
    spec.validate()?;
    match spec {
        PotentialSpec::PowerDistance { c, beta, metric } => {
            let d = distances.ok_or_else(|| invalid("power potential needs a distance field"))?;
            if d.kind != *metric {
                return Err(invalid("distance field metric does not match the potential"));
            }
            if d.values.len() != graph.vertex_count() {
                return Err(invalid("distance field does not cover the graph"));
            }
            let values = d.values.iter().map(|x| c * libm::pow(*x, *beta)).collect();
            Ok(PotentialField::from_vertex_values(graph, values))
        }
        PotentialSpec::CellConstant { c, beta } => {
            let hops = complex.origin_hops();
            let diam = complex.template.diameter();
            let inc = graph
                .incidence
                .iter()
                .enumerate()
                .map(|(cell, inc)| vec![c * libm::pow(hops[cell] as f64 * diam, *beta); inc.len()])
                .collect();
            Ok(PotentialField::from_incidence(graph, inc))
        }
        PotentialSpec::GraphHarmonic => {
            let values = graph_harmonic(complex, graph)?;
            Ok(PotentialField::from_vertex_values(graph, values))
        }
        PotentialSpec::Table(values) => {
            if values.len() != graph.vertex_count() {
                return Err(invalid("tabulated potential does not cover the graph"));
            }
            Ok(PotentialField::from_vertex_values(graph, values.clone()))
        }
    }
}

/// Solve `ΔV = 1` (`Δ = -M⁻¹E`) on a Γ-ball around the origin of twice
/// the eccentricity of `complex`, cut from a padded truncation: `V` is the
/// torsion function of the ball (`-ΔU = 1`, `U = 0` on the rim, the origin
/// excepted) reflected as `max U - U`, restricted to `graph` and shifted to
/// minimum 0.
pub fn graph_harmonic(complex: &CellComplex, graph: &GraphApprox) -> Result<Vec<f64>> {
    let inner = complex.origin_hops().into_iter().max().unwrap_or(0);
    let radius = 2 * inner.max(1);
    let mut padded = complex.padded()?;
    while padded.truncation_radius().is_some_and(|r| r <= radius) {
        let next = padded.padded()?;
        if next.cell_count() > 64 * complex.cell_count().max(64) {
            return Err(Error::Unsolvable("padding needed for the harmonic solve is too large".into()));
        }
        padded = next;
    }
    let hops = padded.origin_hops();
    let keep: Vec<usize> = (0..padded.cell_count()).filter(|c| hops[*c] <= radius).collect();
    let ball = padded.restrict(&keep)?;
    let big = refine(&ball, graph.level)?;
    let rim: Vec<usize> = (0..big.vertex_count())
        .filter(|v| big.tags[*v] == VertexTag::TruncationBoundary && *v != big.origin_vertex)
        .collect();
    if rim.is_empty() {
        return Err(Error::Unsolvable("padded truncation has no rim to carry the outflux".into()));
    }
    // torsion function: E U = M 1 with U = 0 on the rim, then V = max U - U
    let mut fixed = vec![false; big.vertex_count()];
    for &r in &rim {
        fixed[r] = true;
    }
    let free: Vec<usize> = (0..big.vertex_count()).filter(|v| !fixed[*v]).collect();
    let mut slot = vec![usize::MAX; big.vertex_count()];
    for (i, v) in free.iter().enumerate() {
        slot[*v] = i;
    }
    let lap = big.laplacian();
    let mut system = SymmetricSparse::zeros(free.len());
    for (i, v) in free.iter().enumerate() {
        system.diag[i] = lap.diag[*v];
        system.off[i] = lap.off[*v].iter().filter(|(j, _)| !fixed[*j]).map(|(j, x)| (slot[*j], *x)).collect();
    }
    let factor = Ldlt::factor(&system, 1e-14 * system.max_abs())
        .map_err(|_| Error::Unsolvable("Dirichlet Laplacian is singular".into()))?;
    let rhs: Vec<f64> = free.iter().map(|v| big.measure[*v]).collect();
    let sol = factor.solve(&rhs);
    let mut full = vec![0.0; big.vertex_count()];
    for (i, v) in free.iter().enumerate() {
        full[*v] = sol[i];
    }
    let top = full.iter().fold(0.0f64, |a, b| a.max(*b));
    for x in full.iter_mut() {
        *x = top - *x;
    }
    let lookup: BTreeMap<_, _> = big.coords.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut values = Vec::with_capacity(graph.vertex_count());
    for p in &graph.coords {
        let i = lookup.get(p).ok_or_else(|| invalid("padded truncation does not contain the graph"))?;
        values.push(full[*i]);
    }
    let min = values.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    Ok(values.into_iter().map(|v| v - min).collect())
}

/// `max |ΔV - 1|` over vertices whose full neighbourhood lies in `graph`
/// (everything except the truncation rim and its cell-boundary ring).
pub fn harmonic_residual(graph: &GraphApprox, values: &[f64]) -> f64 {
    let lap = graph.laplacian();
    let ev = lap.mul_vec(values);
    // a junction vertex is complete only if its owners cover the full arity;
    // interior vertices are always complete
    let owners = graph.owners();
    let arity = owners.iter().map(Vec::len).max().unwrap_or(1);
    (0..graph.vertex_count())
        .filter(|v| graph.tags[*v] == VertexTag::Interior || owners[*v].len() == arity)
        .map(|v| (-ev[v] / graph.measure[v] - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    Exact,
    SupEnvelope,
    InfEnvelope,
}

/// `F(λ) = μ{V ≤ λ}` for the field itself or one of its envelopes.
pub fn distribution(graph: &GraphApprox, field: &PotentialField, which: Distribution) -> StepFunction {
    let atoms: Vec<(f64, f64)> = match which {
        Distribution::Exact => graph
            .incidence
            .iter()
            .zip(&field.incidence_values)
            .flat_map(|(inc, vals)| inc.iter().zip(vals).map(|((_, m), v)| (*v, *m)))
            .collect(),
        Distribution::SupEnvelope | Distribution::InfEnvelope => graph
            .incidence
            .iter()
            .enumerate()
            .map(|(c, inc)| {
                let mass: f64 = inc.iter().map(|(_, m)| m).sum();
                let v = if which == Distribution::SupEnvelope { field.cell_sup[c] } else { field.cell_inf[c] };
                (v, mass)
            })
            .collect(),
    };
    StepFunction::from_atoms(0.0, atoms).expect("potential values are finite")
}

/// Largest λ for which `{V^∨ ≤ λ}` stays inside the cells within half the
/// truncation radius of the origin, so distribution functions below it
/// are unaffected by the truncation. Infinite when the complex has no rim.
pub fn reliable_lambda_max(complex: &CellComplex, field: &PotentialField) -> f64 {
    let Some(radius) = complex.truncation_radius() else {
        return f64::INFINITY;
    };
    let hops = complex.origin_hops();
    let half = radius.div_ceil(2);
    hops.iter()
        .zip(&field.cell_inf)
        .filter(|(h, _)| **h >= half)
        .map(|(_, v)| *v)
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoublingReport {
    /// `max F^∨(2λ) / F^∧(λ)` over the grid.
    pub c_hat: f64,
    /// The same maximum on the lower and upper halves of the grid.
    pub subrange_max: [f64; 2],
    pub stable: bool,
    pub points: usize,
}

/// Empirical doubling constant of `F^∨(2λ) ≤ C F^∧(λ)` on
/// `λ ∈ [lo, hi/2]`, so that `2λ` stays in the window.
pub fn check_doubling(f_sup: &StepFunction, f_inf: &StepFunction, lo: f64, hi: f64, n: usize) -> Result<DoublingReport> {
    let top = hi / 2.0;
    if !(lo > 0.0 && top > lo) || n < 4 {
        return Err(Error::InsufficientData("doubling window is empty".into()));
    }
    let grid = geometric_grid(lo, top, n);
    let ratios: Vec<f64> = grid
        .iter()
        .filter(|l| f_sup.eval(**l) > 0.0)
        .map(|l| f_inf.eval(2.0 * l) / f_sup.eval(*l))
        .collect();
    if ratios.len() < 2 {
        return Err(Error::InsufficientData("no grid point has F^∧(λ) > 0".into()));
    }
    let half = ratios.len() / 2;
    let m0 = ratios[..half].iter().fold(0.0f64, |a, b| a.max(*b));
    let m1 = ratios[half..].iter().fold(0.0f64, |a, b| a.max(*b));
    let c_hat = m0.max(m1);
    let stable = c_hat.is_finite() && m0.max(m1) <= 2.0 * m0.min(m1);
    Ok(DoublingReport { c_hat, subrange_max: [m0, m1], stable, points: ratios.len() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport {
    /// `(λ, F^∨(λ)/F^∧(λ) - 1)`.
    pub table: Vec<(f64, f64)>,
    /// Slope of `log h` against `log λ` over the top decade.
    pub slope: Option<f64>,
    pub identically_zero: bool,
    pub decreasing: bool,
}

pub fn check_envelope_ratio(
    f_sup: &StepFunction,
    f_inf: &StepFunction,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<EnvelopeReport> {
    if !(lo > 0.0 && hi > lo) || n < 4 {
        return Err(Error::InsufficientData("envelope window is empty".into()));
    }
    let table: Vec<(f64, f64)> = geometric_grid(lo, hi, n)
        .into_iter()
        .filter(|l| f_sup.eval(*l) > 0.0)
        .map(|l| (l, f_inf.eval(l) / f_sup.eval(l) - 1.0))
        .collect();
    if table.is_empty() {
        return Err(Error::InsufficientData("F^∧ vanishes on the whole window".into()));
    }
    let identically_zero = table.iter().all(|(_, h)| *h == 0.0);
    let top: Vec<(f64, f64)> = table.iter().filter(|(l, h)| *l >= hi / 10.0 && *h > 0.0).copied().collect();
    let slope = if top.len() >= 2 {
        let xs: Vec<f64> = top.iter().map(|(l, _)| libm::log(*l)).collect();
        let ys: Vec<f64> = top.iter().map(|(_, h)| libm::log(*h)).collect();
        least_squares_slope(&xs, &ys).ok()
    } else {
        None
    };
    let decreasing = identically_zero || slope.is_some_and(|s| s < 0.0);
    Ok(EnvelopeReport { table, slope, identically_zero, decreasing })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthReport {
    /// `min V/d^β` over vertices with `d ≥ 1`.
    pub c3: f64,
    /// `max V/d^β` over vertices with `d ≥ 1`.
    pub c4: f64,
    /// Hölder constant over graph edges, in Euclidean pair distance.
    pub c5: f64,
    /// `max (V^∧ - V^∨) / (diam^γ d_α^{β-γ})` over cells with `d_α ≥ 1`.
    pub c8: f64,
    /// `(cell, d_α, V^∧ - V^∨)` for every cell, `d_α` the largest distance
    /// of a vertex of the cell from the origin.
    pub gaps: Vec<(usize, f64, f64)>,
}

pub fn check_growth_and_hoelder(
    complex: &CellComplex,
    graph: &GraphApprox,
    field: &PotentialField,
    distances: &DistanceField,
    beta: f64,
    gamma: f64,
) -> Result<GrowthReport> {
    if !(beta > 0.0 && gamma > 0.0 && gamma <= 1.0) {
        return Err(invalid("need β > 0 and γ ∈ (0, 1]"));
    }
    let d = &distances.values;
    let v = &field.vertex_values;
    let (mut c3, mut c4) = (f64::INFINITY, 0.0f64);
    for (x, dx) in d.iter().enumerate() {
        if *dx >= 1.0 {
            let r = v[x] / libm::pow(*dx, beta);
            c3 = c3.min(r);
            c4 = c4.max(r);
        }
    }
    let mut c5 = 0.0f64;
    for e in &graph.edges {
        let scale = d[e.u].max(d[e.v]);
        if scale < 1.0 {
            continue;
        }
        let dxy = (graph.coords[e.u] - graph.coords[e.v]).norm();
        let r = (v[e.u] - v[e.v]).abs() / (libm::pow(dxy, gamma) * libm::pow(scale, beta - gamma));
        c5 = c5.max(r);
    }
    let diam = complex.template.diameter();
    let mut c8 = 0.0f64;
    let mut gaps = Vec::with_capacity(graph.cell_count());
    for (c, inc) in graph.incidence.iter().enumerate() {
        let dc = inc.iter().map(|(x, _)| d[*x]).fold(0.0, f64::max);
        let gap = field.cell_sup[c] - field.cell_inf[c];
        if dc >= 1.0 {
            c8 = c8.max(gap / (libm::pow(diam, gamma) * libm::pow(dc, beta - gamma)));
        }
        gaps.push((c, dc, gap));
    }
    Ok(GrowthReport { c3, c4, c5, c8, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::distance_field;
    use crate::geometry::*;

    fn interval(cells: usize, m: u32) -> (CellComplex, GraphApprox, DistanceField) {
        let c = build_interval_lattice(cells).unwrap();
        let g = refine(&c, m).unwrap();
        let d = distance_field(&c, &g, MetricKind::EuclideanCoordinate).unwrap();
        (c, g, d)
    }

    fn square(c: &CellComplex, g: &GraphApprox, d: &DistanceField) -> PotentialField {
        let spec = PotentialSpec::PowerDistance { c: 1.0, beta: 2.0, metric: MetricKind::EuclideanCoordinate };
        evaluate(&spec, c, g, Some(d)).unwrap()
    }

    #[test]
    fn power_potential_values() {
        let (c, g, d) = interval(10, 3);
        let f = square(&c, &g, &d);
        assert_eq!(f.vertex_values[g.origin_vertex], 0.0);
        for k in 0..=10 {
            let v = g.find(crate::dyadic::Point::int(k, 0)).unwrap();
            assert!((f.vertex_values[v] - (k * k) as f64).abs() < 1e-12);
        }
        for (c, (s, i)) in f.cell_sup.iter().zip(&f.cell_inf).enumerate() {
            assert!((s - ((c + 1) * (c + 1)) as f64).abs() < 1e-12);
            assert!((i - (c * c) as f64).abs() < 1e-12);
        }
        assert!(evaluate(&PotentialSpec::PowerDistance { c: 0.0, beta: 2.0, metric: MetricKind::EuclideanCoordinate }, &c, &g, Some(&d)).is_err());
    }

    #[test]
    fn distribution_ordering_and_total() {
        let (c, g, d) = interval(20, 3);
        let f = square(&c, &g, &d);
        let fe = distribution(&g, &f, Distribution::Exact);
        let fs = distribution(&g, &f, Distribution::SupEnvelope);
        let fi = distribution(&g, &f, Distribution::InfEnvelope);
        for k in 0..500 {
            let l = k as f64;
            assert!(fs.eval(l) <= fe.eval(l) + 1e-12 && fe.eval(l) <= fi.eval(l) + 1e-12);
        }
        assert!((fe.eval(1e6) - 20.0).abs() < 1e-10);
        // F(λ) ≈ √λ on the half-line
        let xs: Vec<f64> = (0..20).map(|i| libm::log(4.0 * libm::pow(1.2, i as f64))).collect();
        let ys: Vec<f64> = xs.iter().map(|x| libm::log(fe.eval(libm::exp(*x)))).collect();
        let slope = least_squares_slope(&xs, &ys).unwrap();
        assert!((slope - 0.5).abs() < 0.025, "slope {slope}");
    }

    #[test]
    fn zero_potential_doubles_trivially() {
        let (c, g, _) = interval(5, 2);
        let f = PotentialField::zero(&g);
        let fs = distribution(&g, &f, Distribution::SupEnvelope);
        let fi = distribution(&g, &f, Distribution::InfEnvelope);
        let r = check_doubling(&fs, &fi, 1.0, 100.0, 10).unwrap();
        assert!((r.c_hat - 1.0).abs() < 1e-12 && r.stable);
        let _ = c;
    }

    #[test]
    fn cell_constant_has_no_envelope_gap() {
        let c = build_blowup(&build_sg2_template(), &[1, 2, 3, 1, 2], 4).unwrap();
        let g = refine(&c, 1).unwrap();
        let f = evaluate(&PotentialSpec::CellConstant { c: 1.0, beta: 2.0 }, &c, &g, None).unwrap();
        assert!(f.is_cell_constant());
        let fs = distribution(&g, &f, Distribution::SupEnvelope);
        let fi = distribution(&g, &f, Distribution::InfEnvelope);
        let r = check_envelope_ratio(&fs, &fi, 1.0, 100.0, 30).unwrap();
        assert!(r.identically_zero && r.decreasing);
    }

    #[test]
    fn exponential_ladder_potential_doubles_stably() {
        let c = build_ladder(&build_sg2_template(), 40).unwrap();
        let g = refine(&c, 0).unwrap();
        let hops = c.origin_hops();
        let inc = g
            .incidence
            .iter()
            .enumerate()
            .map(|(cell, inc)| vec![libm::exp(hops[cell] as f64); inc.len()])
            .collect();
        let f = PotentialField::from_incidence(&g, inc);
        let fs = distribution(&g, &f, Distribution::SupEnvelope);
        let fi = distribution(&g, &f, Distribution::InfEnvelope);
        let top = reliable_lambda_max(&c, &f);
        let r = check_doubling(&fs, &fi, 50.0, top, 40).unwrap();
        assert!(r.stable, "{r:?}");
    }

    #[test]
    fn growth_constants() {
        let (c, g, d) = interval(30, 2);
        let f = square(&c, &g, &d);
        let r = check_growth_and_hoelder(&c, &g, &f, &d, 2.0, 1.0).unwrap();
        assert!((r.c3 - 1.0).abs() < 1e-12 && (r.c4 - 1.0).abs() < 1e-12);
        for (cell, _, gap) in &r.gaps {
            assert!(*gap <= 2.0 * *cell as f64 + 1.0 + 1e-9);
        }
        assert!(r.c8 <= 2.0 + 1e-12);
    }

    #[test]
    fn hexagonal_gap_bounded() {
        let c = build_hexagonal(&build_sg2_template(), 6).unwrap();
        let g = refine(&c, 2).unwrap();
        let d = distance_field(&c, &g, MetricKind::EuclideanCoordinate).unwrap();
        let f = square(&c, &g, &d);
        let r = check_growth_and_hoelder(&c, &g, &f, &d, 2.0, 1.0).unwrap();
        assert!(r.c8.is_finite() && r.c8 < 4.0, "{}", r.c8);
    }

    #[test]
    fn harmonic_on_half_line_is_parabola() {
        let (c, g, _) = interval(20, 3);
        let v = graph_harmonic(&c, &g).unwrap();
        // V'' = 1 with V'(0) = 0: V = x²/2 exactly at the nodes
        for (x, p) in g.coords.iter().enumerate() {
            let t = p.cartesian().0;
            assert!((v[x] - 0.5 * t * t).abs() < 1e-8, "{t}: {}", v[x]);
        }
    }

    #[test]
    fn harmonic_on_blowup() {
        let c = build_blowup(&build_sg2_template(), &[1, 2, 3, 1, 2, 3, 1, 2, 3, 1], 4).unwrap();
        let g = refine(&c, 2).unwrap();
        let v = graph_harmonic(&c, &g).unwrap();
        assert!(v.iter().all(|x| *x >= 0.0));
        assert!(harmonic_residual(&g, &v) < 1e-8, "{}", harmonic_residual(&g, &v));
        // the minimum sits near the origin, the outer rim well above it
        let top = v.iter().cloned().fold(0.0, f64::max);
        assert!(v[g.origin_vertex] < 0.05 * top);
        let rim_min = (0..g.vertex_count())
            .filter(|x| g.tags[*x] == VertexTag::TruncationBoundary)
            .map(|x| v[x])
            .fold(f64::INFINITY, f64::min);
        assert!(rim_min > v[g.origin_vertex]);
    }

    #[test]
    fn reliable_window_is_finite_on_truncations() {
        let c = build_ladder(&build_sg2_template(), 20).unwrap();
        let g = refine(&c, 0).unwrap();
        let f = evaluate(&PotentialSpec::CellConstant { c: 1.0, beta: 2.0 }, &c, &g, None).unwrap();
        let l = reliable_lambda_max(&c, &f);
        assert!(l.is_finite() && l > 0.0);
    }
}
