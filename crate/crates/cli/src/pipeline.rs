//! Scenario pipelines behind the subcommands. Every step returns tables;
//! writing them is left to the caller so that runs stay comparable.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use bohr_core::approx::{distance_field, refine, DistanceField, GraphApprox, MetricKind, VertexTag};
use bohr_core::bohr::{
    bohr_error_bound, bohr_g_layercake, bohr_row, bracketed_count, fit_spectral_dimension, lambda_star,
    period_average, weak_bohr_check, BohrRow, BracketedCount, DirectCounter, Envelopes,
};
use bohr_core::cell::{CellPair, WeylFunction, WeylReport};
use bohr_core::decimation::{self, enumerate_sg_spectrum, graph_spectrum};
use bohr_core::geometry::{
    build_blowup, build_hexagonal, build_interval_lattice, build_ladder, build_sg2_template, build_trifield,
    estimate_mass_dimension, CellComplex, ComplexKind, TemplateKind,
};
use bohr_core::operator::{assemble, dense_spectrum_capped, Boundary, Interface, OperatorInstance};
use bohr_core::potential::{
    check_doubling, check_envelope_ratio, check_growth_and_hoelder, distribution, evaluate, reliable_lambda_max,
    Distribution, DoublingReport, EnvelopeReport, GrowthReport, PotentialField, PotentialSpec,
};
use bohr_core::trace::{bracketed_trace, fit_spectral_dimension_t, TraceRow, MIN_T_CAP};
use bohr_core::StepFunction;

use crate::config::{Builder, CellKind, Metric, PotentialKind, Scenario};
use crate::output::{Stamp, Table, Value};

/// Everything a subcommand needs, built once per scenario.
pub struct Prepared {
    pub scenario: Scenario,
    pub stamp: Stamp,
    pub complex: CellComplex,
    pub graph: GraphApprox,
    pub distances: Option<DistanceField>,
    pub field: PotentialField,
    pub envelopes: Envelopes,
    pub cells: CellPair,
    pub weyl: WeylFunction,
    pub weyl_report: Option<WeylReport>,
}

fn metric_kind(m: Metric) -> MetricKind {
    match m {
        Metric::Euclidean => MetricKind::EuclideanCoordinate,
        Metric::CellGraph => MetricKind::CellGraphScaled,
        Metric::Resistance => MetricKind::EffectiveResistance,
    }
}

pub fn build_complex(s: &Scenario) -> Result<CellComplex> {
    let sg = build_sg2_template();
    let size = s.space.size;
    let complex = match s.space.builder {
        Builder::Blowup => {
            let word: Vec<u8> = s.space.word.iter().cycle().take(size.max(1) + 8).copied().collect();
            build_blowup(&sg, &word, size as u32)
        }
        Builder::Ladder => build_ladder(&sg, size),
        Builder::Hexagonal => build_hexagonal(&sg, size),
        Builder::Trifield => build_trifield(&sg, size),
        Builder::Interval => build_interval_lattice(size),
    };
    complex.context("building the cell complex")
}

pub fn prepare(scenario: &Scenario) -> Result<Prepared> {
    let s = scenario.clone();
    let stamp = Stamp { scenario: s.name.clone(), hash: s.hash() };
    let complex = build_complex(&s)?;
    let graph = refine(&complex, s.space.level).context("refining the complex")?;
    let p = &s.potential;
    let (spec, distances) = match p.kind {
        PotentialKind::Power => {
            let metric = metric_kind(p.metric);
            let d = distance_field(&complex, &graph, metric).context("distance field")?;
            (PotentialSpec::PowerDistance { c: p.c, beta: p.beta, metric }, Some(d))
        }
        PotentialKind::CellConstant => (PotentialSpec::CellConstant { c: p.c, beta: p.beta }, None),
        PotentialKind::Harmonic => (PotentialSpec::GraphHarmonic, None),
    };
    let field = evaluate(&spec, &complex, &graph, distances.as_ref()).context("evaluating the potential")?;
    let envelopes = Envelopes::new(&graph, &field);
    let kind = complex.template.kind;
    let cells = match s.cells.model {
        CellKind::Graph => CellPair::new(kind, Some(s.space.level), f64::INFINITY),
        CellKind::Continuum => CellPair::new(kind, None, s.continuum_cap()),
    }
    .context("cell spectra")?;
    let (weyl, weyl_report) = match kind {
        TemplateKind::Interval => (WeylFunction::interval(), None),
        TemplateKind::SierpinskiGasket => {
            let w = &s.weyl;
            let (f, r) = WeylFunction::sg(w.cap, w.periods, w.averaged, w.points).context("Weyl function")?;
            (f, Some(r))
        }
    };
    Ok(Prepared { scenario: s, stamp, complex, graph, distances, field, envelopes, cells, weyl, weyl_report })
}

impl Prepared {
    pub fn lambdas(&self) -> Vec<f64> {
        self.scenario.lambda.grid().values()
    }

    pub fn direct_counter(&self) -> Result<Option<DirectCounter>> {
        if !self.scenario.lambda.direct {
            return Ok(None);
        }
        Ok(Some(DirectCounter::new(&self.graph, &self.field).context("assembling the glued operators")?))
    }

    /// Mass dimension of the cell graph around the origin cell, over radii
    /// up to half the truncation radius.
    pub fn mass_dimension(&self) -> Option<f64> {
        let radius = self.complex.truncation_radius()?;
        let r_max = radius / 2;
        let r_min = (r_max / 8).max(1);
        if r_max <= r_min {
            return None;
        }
        estimate_mass_dimension(&self.complex, self.complex.origin_cell, r_min, r_max).ok()
    }

    /// `d_s + 2·d_h/β` for power potentials.
    pub fn predicted_dimension(&self) -> Option<f64> {
        let p = &self.scenario.potential;
        if p.kind == PotentialKind::Harmonic {
            return None;
        }
        Some(self.complex.template.spectral_dimension() + 2.0 * self.mass_dimension()? / p.beta)
    }
}

fn kind_json(kind: &ComplexKind) -> Json {
    match kind {
        ComplexKind::Blowup { word, generations } => json!({"builder": "blowup", "word": word, "generations": generations}),
        ComplexKind::Ladder { length } => json!({"builder": "ladder", "length": length}),
        ComplexKind::Hexagonal { radius } => json!({"builder": "hexagonal", "radius": radius}),
        ComplexKind::TriangularField { radius } => json!({"builder": "trifield", "radius": radius}),
        ComplexKind::IntervalLattice { cells } => json!({"builder": "interval", "cells": cells}),
    }
}

/// `build`: complex summary as JSON plus vertex and edge tables of the
/// graph approximation.
pub fn build(p: &Prepared) -> (Json, Table, Table) {
    let c = &p.complex;
    let g = &p.graph;
    let cells: Vec<Json> = c
        .placements
        .iter()
        .zip(&c.cell_vertices)
        .map(|(phi, ids)| {
            let corners: Vec<(f64, f64)> = ids.iter().map(|v| c.vertices[*v].cartesian()).collect();
            json!({"corners": corners, "lattice_linear": [
                [phi.linear[0][0].to_f64(), phi.linear[0][1].to_f64()],
                [phi.linear[1][0].to_f64(), phi.linear[1][1].to_f64()]]})
        })
        .collect();
    let summary = json!({
        "scenario": p.scenario.name,
        "sha256": p.stamp.hash,
        "template": c.template.name,
        "kind": kind_json(&c.kind),
        "cells": c.cell_count(),
        "junctions": c.vertices.len(),
        "identifications": c.identification_count(),
        "rim": c.rim.len(),
        "truncation_radius": c.truncation_radius(),
        "origin_cell": c.origin_cell,
        "total_measure": c.total_measure(),
        "spectral_dimension": c.template.spectral_dimension(),
        "mass_dimension": p.mass_dimension(),
        "warnings": c.warnings,
        "level": g.level,
        "graph_vertices": g.vertex_count(),
        "graph_edges": g.edges.len(),
        "cell_placements": cells,
    });
    let mut vertices = Table::new("vertices", &["id", "x", "y", "measure", "tag", "potential"]);
    for v in 0..g.vertex_count() {
        let (x, y) = g.coords[v].cartesian();
        let tag = match g.tags[v] {
            VertexTag::Interior => "interior",
            VertexTag::CellBoundary => "cell_boundary",
            VertexTag::TruncationBoundary => "truncation_boundary",
        };
        vertices.push(vec![v.into(), x.into(), y.into(), g.measure[v].into(), tag.into(), p.field.vertex_values[v].into()]);
    }
    let mut edges = Table::new("edges", &["u", "v", "conductance", "cell"]);
    for e in &g.edges {
        edges.push(vec![e.u.into(), e.v.into(), e.conductance.into(), e.cell.into()]);
    }
    (summary, vertices, edges)
}

/// The glued Dirichlet-rim operator, `None` when the rim takes every
/// vertex (a single level-0 cell).
pub fn glued_operator(p: &Prepared) -> Result<Option<OperatorInstance>> {
    if p.graph.tags.iter().all(|t| *t == VertexTag::TruncationBoundary) {
        return Ok(None);
    }
    Ok(Some(assemble(&p.graph, Interface::Glued, Boundary::Dirichlet, Some(&p.field))?))
}

/// Matrix Market coordinate export of `E + M·V` (symmetric, lower
/// triangle) and the diagonal mass, for the glued Dirichlet-rim operator.
pub fn matrix_market(p: &Prepared) -> Result<Option<(String, String)>> {
    let Some(op) = glued_operator(p)? else {
        return Ok(None);
    };
    let lower: Vec<(usize, usize, f64)> = op.triplets().into_iter().filter(|(i, j, _)| j <= i).collect();
    let mut a = format!(
        "%%MatrixMarket matrix coordinate real symmetric\n{}\n{} {} {}\n",
        p.stamp.comment().replacen('#', "%", 1),
        op.dim(),
        op.dim(),
        lower.len()
    );
    for (i, j, v) in lower {
        a.push_str(&format!("{} {} {v:e}\n", i + 1, j + 1));
    }
    let mut m = format!(
        "%%MatrixMarket matrix array real general\n{}\n{} 1\n",
        p.stamp.comment().replacen('#', "%", 1),
        op.dim()
    );
    for x in &op.mass {
        m.push_str(&format!("{x:e}\n"));
    }
    Ok(Some((a, m)))
}

/// `spectrum`: cell spectra (decimation or analytic), the decimation gate
/// for SG, and the dense spectrum of the glued operator when it is small.
pub fn spectrum(p: &Prepared) -> Result<Vec<Table>> {
    let s = &p.scenario;
    let mut out = Vec::new();
    for (bc, name) in [(Boundary::Dirichlet, "spectrum_dirichlet"), (Boundary::Neumann, "spectrum_neumann")] {
        let mut t = Table::new(name, &["eigenvalue", "multiplicity", "generation"]);
        match (s.is_sg(), s.cells.model) {
            (true, CellKind::Continuum) => {
                for e in enumerate_sg_spectrum(bc, s.continuum_cap())?.entries {
                    t.push(vec![e.value.into(), e.multiplicity.into(), e.generation.into()]);
                }
            }
            (true, CellKind::Graph) => {
                let scale = 1.5 * 5f64.powi(s.space.level as i32);
                for (x, k) in graph_spectrum(bc, s.space.level)? {
                    t.push(vec![(scale * x).into(), k.into(), s.space.level.into()]);
                }
            }
            (false, _) => {
                let model = if bc == Boundary::Dirichlet { &p.cells.dirichlet } else { &p.cells.neumann };
                for (x, k) in model.atoms() {
                    t.push(vec![(*x).into(), (*k).into(), s.space.level.into()]);
                }
            }
        }
        out.push(t);
    }
    if s.is_sg() {
        let mut t = Table::new("gate", &["boundary", "level", "dimension", "max_relative_deviation"]);
        for (bc, m, dim, dev) in decimation::gate(decimation::GATE_LEVEL)?.checks {
            t.push(vec![format!("{bc:?}").to_lowercase().as_str().into(), m.into(), dim.into(), dev.into()]);
        }
        out.push(t);
    }
    if let Some(op) = glued_operator(p)?.filter(|op| op.dim() <= s.tolerances.dense_cap) {
        let mut t = Table::new("dense", &["index", "eigenvalue"]);
        for (i, x) in dense_spectrum_capped(&op, s.tolerances.dense_cap)?.eigenvalues().iter().enumerate() {
            t.push(vec![i.into(), (*x).into()]);
        }
        out.push(t);
    }
    Ok(out)
}

/// `count`: bracketed counts on the λ grid, with direct counts if asked.
pub fn count(p: &Prepared) -> Result<Vec<BracketedCount>> {
    let direct = p.direct_counter()?;
    let rows: Vec<BracketedCount> = p
        .lambdas()
        .par_iter()
        .map(|l| bracketed_count(&p.cells, &p.envelopes, direct.as_ref(), *l))
        .collect::<bohr_core::Result<_>>()?;
    if let Some(bad) = rows.iter().find(|r| !r.is_consistent()) {
        bail!("bracketing violated at λ = {}: {:?}", bad.lambda, bad);
    }
    Ok(rows)
}

pub fn count_table(rows: &[BracketedCount]) -> Table {
    let mut t = Table::new(
        "counts",
        &["lambda", "N_lower", "N_upper", "N_direct", "N_direct_neumann", "shift_epsilon", "rim_check"],
    );
    for r in rows {
        t.push(vec![
            r.lambda.into(),
            r.lower.into(),
            r.upper.into(),
            r.direct_dirichlet.into(),
            r.direct_neumann.into(),
            r.epsilon.into(),
            r.rim_check.into(),
        ]);
    }
    t
}

pub fn count_summary(p: &Prepared, rows: &[BracketedCount]) -> Json {
    let fit = fit_spectral_dimension(rows).ok();
    json!({
        "points": rows.len(),
        "bracketing_violations": rows.iter().filter(|r| !r.is_consistent()).count(),
        "direct": p.scenario.lambda.direct,
        "rim_mismatches": rows.iter().filter(|r| r.rim_check == Some(false)).count(),
        "fit_d_s": fit.map(|f| f.d_s),
        "fit_confidence": fit.map(|f| f.confidence),
        "predicted_d_s": p.predicted_dimension(),
        "mass_dimension": p.mass_dimension(),
        "cell_cap": p.cells.cap(),
    })
}

/// One λ of the `bohr` report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BohrLine {
    pub row: BohrRow,
    pub count: BracketedCount,
    pub error_bound: Option<f64>,
    pub g_layercake: f64,
}

impl BohrLine {
    /// `N/g`, with the direct count when available and the bracket
    /// midpoint otherwise.
    pub fn ratio(&self) -> f64 {
        self.count.direct().map_or(self.count.midpoint(), |n| n as f64) / self.row.g
    }

    /// `|N/g - 1| ≤ bound`, up to rounding in the three sums behind `g`.
    pub fn bound_contains_ratio(&self) -> bool {
        self.error_bound.is_some_and(|b| (self.ratio() - 1.0).abs() <= b + 1e-12)
    }

    pub fn layercake_deviation(&self) -> f64 {
        (self.g_layercake - self.row.g).abs() / self.row.g.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn distributions(p: &Prepared) -> [StepFunction; 3] {
    [
        distribution(&p.graph, &p.field, Distribution::Exact),
        distribution(&p.graph, &p.field, Distribution::SupEnvelope),
        distribution(&p.graph, &p.field, Distribution::InfEnvelope),
    ]
}

pub fn bohr(p: &Prepared, counts: &[BracketedCount]) -> Result<Vec<BohrLine>> {
    if !p.weyl.is_monotone() {
        bail!("Weyl function table is not nondecreasing");
    }
    let [f, _, _] = distributions(p);
    let tol = p.scenario.tolerances.layercake;
    counts
        .par_iter()
        .map(|c| {
            let row = bohr_row(&p.graph, &p.field, &p.envelopes, &p.cells, &p.weyl, c.lambda)?;
            let g_layercake = bohr_g_layercake(&f, &p.weyl, c.lambda, tol)?;
            Ok(BohrLine { row, count: *c, error_bound: bohr_error_bound(&row).ok(), g_layercake })
        })
        .collect()
}

pub fn bohr_table(lines: &[BohrLine]) -> Table {
    let mut t = Table::new(
        "bohr",
        &[
            "lambda", "N_lower", "N_upper", "N_direct", "g", "g_sup", "g_inf", "error_bound", "ratio", "g_layercake",
            "R_sup", "R_inf",
        ],
    );
    for l in lines {
        t.push(vec![
            l.row.lambda.into(),
            l.count.lower.into(),
            l.count.upper.into(),
            l.count.direct().into(),
            l.row.g.into(),
            l.row.g_sup.into(),
            l.row.g_inf.into(),
            l.error_bound.into(),
            l.ratio().into(),
            l.g_layercake.into(),
            l.row.r_sup.into(),
            l.row.r_inf.into(),
        ]);
    }
    t
}

/// Weak-Bohr ratios for `λ* = λ(1 + λ^{-1/2})`.
pub fn weak_bohr_table(p: &Prepared) -> (Table, Json) {
    let [_, f_sup, f_inf] = distributions(p);
    let mut t = Table::new("weak_bohr", &["lambda", "lambda_star", "ratio_inf_sup", "ratio_sup_inf"]);
    let summary = match weak_bohr_check(&f_sup, &f_inf, lambda_star, &p.lambdas()) {
        Ok(r) => {
            for (l, s, a, b) in &r.table {
                t.push(vec![(*l).into(), (*s).into(), (*a).into(), (*b).into()]);
            }
            json!({"pass": r.pass, "trend": r.trend})
        }
        Err(e) => json!({"pass": null, "reason": e.to_string()}),
    };
    (t, summary)
}

pub fn bohr_summary(p: &Prepared, lines: &[BohrLine]) -> Json {
    let bounds: Vec<(f64, f64)> = lines.iter().filter_map(|l| l.error_bound.map(|b| (l.row.lambda, b))).collect();
    let averaged = period_average(&bounds, 5.0);
    let contained = lines
        .iter()
        .filter(|l| l.count.direct().is_some())
        .all(BohrLine::bound_contains_ratio);
    json!({
        "final_ratio": lines.last().map(|l| l.ratio()),
        "max_layercake_deviation": lines.iter().map(|l| l.layercake_deviation()).fold(0.0, f64::max),
        "bound_contains_direct": contained,
        "max_identity_defect": lines.iter().map(|l| l.row.identity_defect()).fold(0.0, f64::max),
        "period_averaged_bound": averaged,
        "weyl_clamped": p.weyl_report.as_ref().map(|r| r.clamped),
        "weyl_clamp_size": p.weyl_report.as_ref().map(|r| r.clamp_size),
        "weyl_boundary_distance": p.weyl_report.as_ref().map(|r| r.boundary_distance),
    })
}

/// `trace`: the Laplace-transform bracket on the t grid, restricted to
/// `tΛ ≥ 40` for capped cell spectra.
pub fn trace(p: &Prepared) -> Result<Vec<TraceRow>> {
    let Some(grid) = &p.scenario.t else {
        bail!("scenario has no [t] grid");
    };
    let cap = p.cells.cap();
    let ts: Vec<f64> = grid.values().into_iter().filter(|t| t * cap >= MIN_T_CAP).collect();
    if ts.is_empty() {
        bail!("no t in the grid satisfies t·cap ≥ {MIN_T_CAP} (cap {cap})");
    }
    let rows: Vec<Vec<TraceRow>> = ts
        .par_iter()
        .map(|t| bracketed_trace(&p.graph, &p.field, &p.cells, &[*t]))
        .collect::<bohr_core::Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn trace_table(rows: &[TraceRow]) -> Table {
    let mut t = Table::new(
        "trace",
        &["t", "L_sup", "L_inf", "F_t", "ratio", "tail_bound", "ratio_lo", "ratio_hi", "H", "rim", "reliable"],
    );
    for r in rows {
        t.push(vec![
            r.t.into(),
            r.l_sup.into(),
            r.l_inf.into(),
            r.f.into(),
            (0.5 * (r.ratio_lo + r.ratio_hi)).into(),
            r.tail.into(),
            r.ratio_lo.into(),
            r.ratio_hi.into(),
            r.h.into(),
            r.rim.into(),
            r.reliable.into(),
        ]);
    }
    t
}

pub fn trace_summary(p: &Prepared, rows: &[TraceRow]) -> Json {
    let reliable: Vec<&TraceRow> = rows.iter().filter(|r| r.reliable).collect();
    let t_min = reliable.iter().map(|r| r.t).fold(f64::INFINITY, f64::min);
    let first = reliable.iter().find(|r| r.t == t_min);
    json!({
        "t_min": reliable.first().map(|_| t_min),
        "t_max": reliable.iter().map(|r| r.t).reduce(f64::max),
        "cap_t_min": MIN_T_CAP / p.cells.cap(),
        "reliable_rows": reliable.len(),
        "all_contain_one": reliable.iter().all(|r| r.contains_one()),
        "width_at_t_min": first.map(|r| r.ratio_width()),
        "fit_d_s": fit_spectral_dimension_t(rows).ok(),
    })
}

/// Validator outcomes on the window `[λ_min, min(λ_max, reliable λ)]`.
pub struct Validation {
    pub window: (f64, f64),
    pub reliable_lambda_max: f64,
    pub doubling: bohr_core::Result<DoublingReport>,
    pub envelope: bohr_core::Result<EnvelopeReport>,
    pub growth: Option<GrowthReport>,
}

impl Validation {
    pub fn decades(&self) -> f64 {
        let (lo, hi) = self.window;
        if hi > lo {
            (hi / lo).log10()
        } else {
            0.0
        }
    }
}

/// Doubling and envelope-ratio checks, plus growth constants for power
/// potentials.
pub fn validation(p: &Prepared) -> Validation {
    let [_, f_sup, f_inf] = distributions(p);
    let lo = p.scenario.lambda.min;
    let reliable = reliable_lambda_max(&p.complex, &p.field);
    let hi = p.scenario.lambda.max.min(reliable);
    let n = p.scenario.lambda.points.max(8);
    let growth = match (&p.distances, p.scenario.potential.kind) {
        (Some(d), PotentialKind::Power) => {
            let beta = p.scenario.potential.beta;
            check_growth_and_hoelder(&p.complex, &p.graph, &p.field, d, beta, beta.min(1.0)).ok()
        }
        _ => None,
    };
    Validation {
        window: (lo, hi),
        reliable_lambda_max: reliable,
        doubling: check_doubling(&f_sup, &f_inf, lo, hi, n),
        envelope: check_envelope_ratio(&f_sup, &f_inf, lo, hi, n),
        growth,
    }
}

/// `validate`: distribution functions on the λ grid, the envelope ratio
/// table and a summary of [`validation`].
pub fn validate(p: &Prepared) -> Result<(Vec<Table>, Json)> {
    let [f, f_sup, f_inf] = distributions(p);
    let mut dist = Table::new("distribution", &["lambda", "F", "F_sup", "F_inf"]);
    for l in p.lambdas() {
        dist.push(vec![l.into(), f.eval(l).into(), f_sup.eval(l).into(), f_inf.eval(l).into()]);
    }
    let v = validation(p);
    let mut env = Table::new("envelope_ratio", &["lambda", "h"]);
    if let Ok(e) = &v.envelope {
        for (l, h) in &e.table {
            env.push(vec![(*l).into(), (*h).into()]);
        }
    }
    let summary = json!({
        "window": [v.window.0, v.window.1],
        "window_decades": v.decades(),
        "reliable_lambda_max": if v.reliable_lambda_max.is_finite() { Some(v.reliable_lambda_max) } else { None },
        "cell_constant": p.field.is_cell_constant(),
        "doubling": match &v.doubling {
            Ok(d) => json!({"c_hat": d.c_hat, "subrange_max": d.subrange_max, "stable": d.stable, "points": d.points}),
            Err(e) => json!({"error": e.to_string()}),
        },
        "envelope": match &v.envelope {
            Ok(e) => json!({"slope": e.slope, "identically_zero": e.identically_zero, "decreasing": e.decreasing}),
            Err(e) => json!({"error": e.to_string()}),
        },
        "growth": v.growth.as_ref().map(|g| json!({"c3": g.c3, "c4": g.c4, "c5": g.c5, "c8": g.c8})),
    });
    Ok((vec![dist, env], summary))
}

/// Numeric value of a table cell, `None` when missing or textual.
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(x) => Some(*x),
        Value::Int(n) => Some(*n as f64),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(builder: &str, extra: &str) -> Prepared {
        let text = format!(
            r#"
name = "small"
[space]
builder = "{builder}"
size = 6
level = 2
word = [1, 2, 3]
[potential]
kind = "power"
metric = "{}"
[cells]
model = "graph"
[lambda]
min = 4.0
max = 80.0
points = 9
direct = true
{extra}
"#,
            if builder == "interval" { "euclidean" } else { "cell_graph" }
        );
        prepare(&Scenario::from_toml(&text).unwrap()).unwrap()
    }

    #[test]
    fn counts_bracket_the_direct_count() {
        for b in ["interval", "blowup", "ladder", "hexagonal", "trifield"] {
            let p = small(b, "");
            let rows = count(&p).unwrap();
            assert_eq!(rows.len(), 9);
            assert!(rows.iter().all(|r| r.is_consistent() && r.direct().is_some()), "{b}");
            assert!(rows.windows(2).all(|w| w[0].lower <= w[1].lower && w[0].upper <= w[1].upper));
        }
    }

    #[test]
    fn bohr_lines_match_layer_cake_and_contain_ratio() {
        let p = small("blowup", "");
        let rows = count(&p).unwrap();
        for l in bohr(&p, &rows).unwrap() {
            assert!(l.layercake_deviation() < 1e-6);
            assert!(l.bound_contains_ratio());
            assert!(l.row.g_sup <= l.row.g * (1.0 + 1e-12) && l.row.g <= l.row.g_inf * (1.0 + 1e-12));
        }
    }

    #[test]
    fn build_tables_cover_the_graph() {
        let p = small("ladder", "");
        let (summary, vertices, edges) = build(&p);
        assert_eq!(vertices.rows.len(), p.graph.vertex_count());
        assert_eq!(edges.rows.len(), p.graph.edges.len());
        assert_eq!(summary["cells"], json!(p.complex.cell_count()));
        let mass: f64 = vertices.column("measure").unwrap().iter().filter_map(|v| as_f64(v)).sum();
        assert!((mass - p.graph.total_measure()).abs() < 1e-9);
    }

    #[test]
    fn trace_needs_a_grid_and_respects_the_cap() {
        let p = small("interval", "");
        assert!(trace(&p).is_err());
        let p = small("interval", "[t]\nmin = 0.01\nmax = 1.0\npoints = 5");
        let rows = trace(&p).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.l_sup <= r.l_inf));
    }

    #[test]
    fn matrix_export_is_lower_triangle() {
        let p = small("interval", "");
        let (a, m) = matrix_market(&p).unwrap().unwrap();
        let dims: Vec<usize> = a.lines().nth(2).unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(dims[0], dims[1]);
        assert_eq!(a.lines().count(), 3 + dims[2]);
        for line in a.lines().skip(3) {
            let ij: Vec<usize> = line.split(' ').take(2).map(|x| x.parse().unwrap()).collect();
            assert!(ij[1] <= ij[0]);
        }
        assert_eq!(m.lines().count(), 3 + dims[0]);
    }
}
