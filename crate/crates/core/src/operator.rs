//! Assembly of `E + M·V - λM` on a graph approximation, eigenvalue counting
//! by `LDLᵀ` inertia and dense spectra for small instances.
//!
//! Three interface treatments are supported. `Glued` is the operator on the
//! whole complex with the chosen rim condition. `Dirichlet` decouples the
//! cells by eliminating every junction vertex and uses the cell supremum of
//! the potential; `Neumann` decouples them by giving every cell its own copy
//! of each junction vertex (with that cell's local mass) and uses the cell
//! infimum. In quadratic-form order the three satisfy
//! `Dirichlet ≥ Glued ≥ Neumann`, so their counts bracket each other.

use alloc::vec;
use alloc::vec::Vec;

use crate::approx::{GraphApprox, VertexTag};
use crate::error::{invalid, Error, Result};
use crate::linalg::dense::generalized_eigenvalues;
use crate::linalg::{Ldlt, SymmetricSparse};
use crate::potential::PotentialField;
use crate::spectrum::{Provenance, Spectrum};

pub use crate::approx::DEFAULT_DENSE_CAP;

/// Relative shift applied when `λ` hits an eigenvalue to working precision.
pub const SHIFT_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interface {
    Glued,
    Dirichlet,
    Neumann,
}

/// The generalized problem `(E + M·diag(V)) u = λ M u` on the free degrees
/// of freedom.
#[derive(Clone, Debug)]
pub struct OperatorInstance {
    pub stiffness: SymmetricSparse,
    pub mass: Vec<f64>,
    pub potential_diag: Vec<f64>,
    pub interface: Interface,
    pub rim: Boundary,
    /// Graph vertex behind every degree of freedom.
    pub dof_vertex: Vec<usize>,
}

/// Outcome of an inertia count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Count {
    pub count: usize,
    /// Relative shift that was needed to avoid a breakdown (0 if none).
    pub epsilon: f64,
}

pub fn assemble(
    graph: &GraphApprox,
    interface: Interface,
    rim: Boundary,
    potential: Option<&PotentialField>,
) -> Result<OperatorInstance> {
    let n = graph.vertex_count();
    if let Some(p) = potential {
        if p.vertex_values.len() != n || p.cell_sup.len() != graph.cell_count() {
            return Err(invalid("potential does not match the graph"));
        }
    }
    let cell_value = |c: usize, upper: bool| match potential {
        None => 0.0,
        Some(p) if upper => p.cell_sup[c],
        Some(p) => p.cell_inf[c],
    };
    match interface {
        Interface::Glued => {
            let free: Vec<bool> = graph
                .tags
                .iter()
                .map(|t| !(rim == Boundary::Dirichlet && *t == VertexTag::TruncationBoundary))
                .collect();
            let (slot, dof_vertex) = enumerate(&free);
            let mut stiffness = SymmetricSparse::zeros(dof_vertex.len());
            for e in &graph.edges {
                add_edge(&mut stiffness, slot[e.u], slot[e.v], e.conductance);
            }
            let mass = dof_vertex.iter().map(|v| graph.measure[*v]).collect();
            let potential_diag = dof_vertex
                .iter()
                .map(|v| potential.map_or(0.0, |p| p.vertex_values[*v]))
                .collect();
            finish(stiffness, mass, potential_diag, interface, rim, dof_vertex)
        }
        Interface::Dirichlet => {
            let free: Vec<bool> = graph.tags.iter().map(|t| *t == VertexTag::Interior).collect();
            let (slot, dof_vertex) = enumerate(&free);
            let mut stiffness = SymmetricSparse::zeros(dof_vertex.len());
            let mut potential_diag = vec![0.0; dof_vertex.len()];
            for e in &graph.edges {
                add_edge(&mut stiffness, slot[e.u], slot[e.v], e.conductance);
            }
            for (c, inc) in graph.incidence.iter().enumerate() {
                for &(v, _) in inc {
                    if slot[v] != usize::MAX {
                        potential_diag[slot[v]] = cell_value(c, true);
                    }
                }
            }
            let mass = dof_vertex.iter().map(|v| graph.measure[*v]).collect();
            finish(stiffness, mass, potential_diag, interface, rim, dof_vertex)
        }
        Interface::Neumann => {
            // one dof per (cell, vertex) incidence
            let mut local: Vec<Vec<(usize, usize)>> = Vec::with_capacity(graph.cell_count());
            let mut dof_vertex = Vec::new();
            let mut mass = Vec::new();
            let mut potential_diag = Vec::new();
            for (c, inc) in graph.incidence.iter().enumerate() {
                let mut map: Vec<(usize, usize)> = Vec::with_capacity(inc.len());
                for &(v, m) in inc {
                    map.push((v, dof_vertex.len()));
                    dof_vertex.push(v);
                    mass.push(m);
                    potential_diag.push(cell_value(c, false));
                }
                map.sort_unstable();
                local.push(map);
            }
            let mut stiffness = SymmetricSparse::zeros(dof_vertex.len());
            for e in &graph.edges {
                let map = &local[e.cell];
                let find = |v: usize| map[map.binary_search_by_key(&v, |x| x.0).expect("edge within its cell")].1;
                add_edge(&mut stiffness, find(e.u), find(e.v), e.conductance);
            }
            finish(stiffness, mass, potential_diag, interface, rim, dof_vertex)
        }
    }
}

fn enumerate(free: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut slot = vec![usize::MAX; free.len()];
    let mut dofs = Vec::new();
    for (v, f) in free.iter().enumerate() {
        if *f {
            slot[v] = dofs.len();
            dofs.push(v);
        }
    }
    (slot, dofs)
}

/// Add a conductance between two slots; an eliminated end (`usize::MAX`)
/// keeps only the diagonal contribution of the other.
fn add_edge(a: &mut SymmetricSparse, i: usize, j: usize, c: f64) {
    let free_i = i != usize::MAX;
    let free_j = j != usize::MAX;
    if free_i {
        a.diag[i] += c;
    }
    if free_j {
        a.diag[j] += c;
    }
    if free_i && free_j {
        for (row, col) in [(i, j), (j, i)] {
            match a.off[row].iter_mut().find(|(k, _)| *k == col) {
                Some(entry) => entry.1 -= c,
                None => a.off[row].push((col, -c)),
            }
        }
    }
}

fn finish(
    stiffness: SymmetricSparse,
    mass: Vec<f64>,
    potential_diag: Vec<f64>,
    interface: Interface,
    rim: Boundary,
    dof_vertex: Vec<usize>,
) -> Result<OperatorInstance> {
    if dof_vertex.is_empty() {
        return Err(invalid("no free vertices"));
    }
    Ok(OperatorInstance { stiffness, mass, potential_diag, interface, rim, dof_vertex })
}

impl OperatorInstance {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// `E + M·diag(V) - λM`.
    pub fn shifted(&self, lambda: f64) -> SymmetricSparse {
        let mut a = self.stiffness.clone();
        for i in 0..a.dim() {
            a.diag[i] += self.mass[i] * (self.potential_diag[i] - lambda);
        }
        a
    }

    /// Stiffness plus potential as `(row, col, value)` triplets, both
    /// triangles, rows ascending.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.dim() + self.stiffness.nnz_offdiag());
        for i in 0..self.dim() {
            let mut row: Vec<(usize, f64)> = self.stiffness.off[i].clone();
            row.push((i, self.stiffness.diag[i] + self.mass[i] * self.potential_diag[i]));
            row.sort_by_key(|x| x.0);
            out.extend(row.into_iter().map(|(j, v)| (i, j, v)));
        }
        out
    }

    /// Spectral scale used for tolerances and shifts.
    fn scale(&self) -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..self.dim() {
            s = s.max((self.stiffness.diag[i] / self.mass[i]).abs()).max(self.potential_diag[i].abs());
        }
        s.max(1.0)
    }
}

/// Number of eigenvalues `≤ λ`, from the inertia of `E + M·V - λM`. A pivot
/// that vanishes to working precision means `λ` sits on an eigenvalue; the
/// count is then retried at `λ + ε·max(|λ|, scale)`, doubling `ε` from
/// [`SHIFT_EPSILON`] until the factorization goes through.
pub fn count_below(op: &OperatorInstance, lambda: f64) -> Result<Count> {
    if !lambda.is_finite() {
        return Err(invalid("lambda must be finite"));
    }
    let scale = op.scale();
    let mut epsilon = 0.0;
    for _ in 0..40 {
        let shift = lambda + epsilon * lambda.abs().max(scale);
        let a = op.shifted(shift);
        let tol = 1e-12 * a.max_abs().max(1e-300);
        match Ldlt::factor(&a, tol) {
            Ok(f) => {
                let i = f.inertia();
                return Ok(Count { count: i.negative + i.zero, epsilon });
            }
            Err(Error::Breakdown { .. }) => {
                epsilon = if epsilon == 0.0 { SHIFT_EPSILON } else { 2.0 * epsilon };
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Breakdown { lambda })
}

pub fn dense_spectrum(op: &OperatorInstance) -> Result<Spectrum> {
    dense_spectrum_capped(op, DEFAULT_DENSE_CAP)
}

pub fn dense_spectrum_capped(op: &OperatorInstance, cap: usize) -> Result<Spectrum> {
    let n = op.dim();
    if n > cap {
        return Err(Error::CapExceeded { what: "dense dimension", requested: n, cap });
    }
    let a = op.shifted(0.0).to_dense();
    Spectrum::new(generalized_eigenvalues(a, &op.mass)?, 1.0, Provenance::Dense)
}
