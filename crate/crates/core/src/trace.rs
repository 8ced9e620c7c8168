//! Heat-kernel traces: per-cell traces with tail bounds, bracketed traces
//! of `e^{-t(-Δ+V)}`, the factorization ratio against
//! `Tr e^{tΔ}·∫e^{-tV}dμ`, and spectral-dimension fits in `t`.
//!
//! Per unit of mass `Tr e^{tΔ}` is the cell trace, written
//! `t^{-d_s/2}·H(t)` with `H` the mean of the Dirichlet and Neumann
//! versions, so the ratio interval is
//! `[L^∧, L^∨] / (t^{-d_s/2}·H(t)·F(t))`.

use alloc::format;
use alloc::vec::Vec;

use crate::approx::{GraphApprox, VertexTag};
use crate::cell::{CellModel, CellPair};
use crate::decimation::{extract_g, GTable};
use crate::error::{invalid, Error, Result};
use crate::fit::line_fit;
use crate::potential::PotentialField;

/// Required `t·Λ` for a capped spectrum.
pub const MIN_T_CAP: f64 = 40.0;

/// Allowed rim contribution relative to `F(t)`.
pub const RIM_TOLERANCE: f64 = 1e-6;

/// Spectral dimension behind a cell model's tail bound.
pub fn model_dimension(model: &CellModel) -> f64 {
    match model.source {
        crate::cell::CellSource::SgContinuum | crate::cell::CellSource::SgGraph { .. } => {
            2.0 * libm::log(3.0) / libm::log(5.0)
        }
        _ => 1.0,
    }
}

/// `Σ mult·e^{-λt}` and a bound on the part of the spectrum above the cap:
/// with `N(λ) ≤ Cλ^a` (`a = d_s/2`, `C` the largest Weyl ratio on the top
/// fifth of the list), the tail is at most `C·e^{-tΛ}(Λ^a + aΛ^{a-1}/t)`.
pub fn cell_trace(model: &CellModel, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(invalid("t must be positive"));
    }
    let value = model.atoms().iter().map(|(l, k)| *k as f64 * libm::exp(-l * t)).sum();
    if !model.cap.is_finite() {
        return Ok((value, 0.0));
    }
    let cap = model.cap;
    if t * cap < MIN_T_CAP {
        return Err(Error::OutOfRange { query: MIN_T_CAP / t, cap });
    }
    let a = 0.5 * model_dimension(model);
    let mut n = 0usize;
    let mut c: f64 = 0.0;
    for (l, k) in model.atoms() {
        n += k;
        if *l >= cap / 5.0 {
            c = c.max(n as f64 / libm::pow(*l, a));
        }
    }
    let tail = c * libm::exp(-t * cap) * (libm::pow(cap, a) + a * libm::pow(cap, a - 1.0) / t);
    Ok((value, tail))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    /// `L^∧`: Dirichlet cells with `V^∧`.
    pub l_sup: f64,
    /// `L^∨`: Neumann cells with `V^∨`.
    pub l_inf: f64,
    /// `F(t) = ∫ e^{-tV} dμ`.
    pub f: f64,
    pub f_sup: f64,
    pub f_inf: f64,
    /// `H(t) = t^{d_s/2}·(L^D_K + L^N_K)/2`.
    pub h: f64,
    pub ratio_lo: f64,
    pub ratio_hi: f64,
    /// Bound on the spectrum above the cell cap, summed over cells.
    pub tail: f64,
    /// `Σ μ_α e^{-tV^∨_α}` over cells touching the truncation rim away from
    /// the origin (an origin on the rim is a boundary of the space itself).
    pub rim: f64,
    pub reliable: bool,
}

impl TraceRow {
    pub fn ratio_width(&self) -> f64 {
        self.ratio_hi - self.ratio_lo
    }

    pub fn contains_one(&self) -> bool {
        self.ratio_lo <= 1.0 && 1.0 <= self.ratio_hi
    }
}

pub fn bracketed_trace(graph: &GraphApprox, field: &PotentialField, cells: &CellPair, ts: &[f64]) -> Result<Vec<TraceRow>> {
    let d_s = model_dimension(&cells.dirichlet);
    let mass: Vec<f64> = graph.incidence.iter().map(|inc| inc.iter().map(|(_, m)| m).sum()).collect();
    let rim_cells: Vec<bool> = graph
        .incidence
        .iter()
        .map(|inc| inc.iter().any(|(v, _)| *v != graph.origin_vertex && graph.tags[*v] == VertexTag::TruncationBoundary))
        .collect();
    ts.iter()
        .map(|&t| {
            let (ld, td) = cell_trace(&cells.dirichlet, t)?;
            let (ln, tn) = cell_trace(&cells.neumann, t)?;
            let mut row = TraceRow {
                t,
                l_sup: 0.0,
                l_inf: 0.0,
                f: 0.0,
                f_sup: 0.0,
                f_inf: 0.0,
                h: libm::pow(t, 0.5 * d_s) * 0.5 * (ld + ln),
                ratio_lo: 0.0,
                ratio_hi: 0.0,
                tail: 0.0,
                rim: 0.0,
                reliable: false,
            };
            for c in 0..mass.len() {
                let es = libm::exp(-t * field.cell_sup[c]);
                let ei = libm::exp(-t * field.cell_inf[c]);
                row.l_sup += ld * es;
                row.l_inf += ln * ei;
                row.f_sup += mass[c] * es;
                row.f_inf += mass[c] * ei;
                row.tail += td.max(tn) * ei;
                if rim_cells[c] {
                    row.rim += mass[c] * ei;
                }
                for ((_, m), v) in graph.incidence[c].iter().zip(&field.incidence_values[c]) {
                    row.f += m * libm::exp(-t * v);
                }
            }
            let denominator = 0.5 * (ld + ln) * row.f;
            row.ratio_lo = row.l_sup / denominator;
            row.ratio_hi = (row.l_inf + row.tail) / denominator;
            row.reliable = row.rim <= RIM_TOLERANCE * row.f;
            Ok(row)
        })
        .collect()
}

/// `-2 ×` slope of `log L` against `log t` on the reliable rows, `L` the
/// midpoint of the bracket.
pub fn fit_spectral_dimension_t(rows: &[TraceRow]) -> Result<f64> {
    let good: Vec<&TraceRow> = rows.iter().filter(|r| r.reliable).collect();
    if good.len() < 2 {
        return Err(Error::InsufficientData("fewer than two reliable t".into()));
    }
    let lo = good.iter().map(|r| r.t).fold(f64::INFINITY, f64::min);
    let hi = good.iter().map(|r| r.t).fold(0.0, f64::max);
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!("reliable t spans {lo}..{hi}, less than a decade")));
    }
    let xs: Vec<f64> = good.iter().map(|r| libm::log(r.t)).collect();
    let ys: Vec<f64> = good.iter().map(|r| libm::log(0.5 * (r.l_sup + r.l_inf))).collect();
    Ok(-2.0 * line_fit(&xs, &ys)?.slope)
}

/// Fold `t^{d_s/2}·L_K(t)` over periods `log 5` in `log t` on `[t_lo, t_hi]`.
pub fn h_fold(model: &CellModel, t_lo: f64, t_hi: f64, points: usize, averaged: usize) -> Result<GTable> {
    let d_s = model_dimension(model);
    let period = 0.5 * libm::log(5.0);
    // λ = 1/t turns the fold in log t into the fold of extract_g
    let trace = |lambda: f64| cell_trace(model, 1.0 / lambda).map(|x| x.0).unwrap_or(f64::NAN);
    let g = extract_g(trace, d_s, period, 0.5 * libm::log(1.0 / t_hi), 0.5 * libm::log(1.0 / t_lo), points, averaged)?;
    if g.values.iter().any(|v| v.is_nan()) {
        return Err(Error::OutOfRange { query: MIN_T_CAP / t_lo, cap: model.cap });
    }
    Ok(g)
}
