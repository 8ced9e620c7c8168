//! Level-`m` graph approximations of a cell complex and distance fields on
//! them.
//!
//! Every level-`m` sub-cell of every cell becomes a complete graph on its
//! boundary vertices with conductance `r^{-m}`, and its measure is split
//! equally among those vertices. For SG(2) this makes the generalized
//! problem `E u = λ M u` carry the Kigami normalization directly: its
//! eigenvalues are `(3/2)·5^m` times those of the combinatorial level-`m`
//! operator.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::Point;
use crate::error::{invalid, Error, Result};
use crate::geometry::{CellComplex, TemplateKind};
use crate::linalg::{Ldlt, SymmetricSparse};

/// Default ceiling on the number of graph vertices.
pub const DEFAULT_VERTEX_CAP: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum VertexTag {
    Interior,
    CellBoundary,
    TruncationBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
    pub cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphApprox {
    pub level: u32,
    pub coords: Vec<Point>,
    pub tags: Vec<VertexTag>,
    /// Glued vertex measure (sum of the local masses over owning cells).
    pub measure: Vec<f64>,
    pub edges: Vec<Edge>,
    /// Per cell: `(vertex, local mass)` for every vertex of the cell.
    pub incidence: Vec<Vec<(usize, f64)>>,
    pub origin_vertex: usize,
    pub template_kind: TemplateKind,
}

impl GraphApprox {
    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn cell_count(&self) -> usize {
        self.incidence.len()
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    /// Cells owning each vertex.
    pub fn owners(&self) -> Vec<Vec<usize>> {
        let mut owners = vec![Vec::new(); self.vertex_count()];
        for (c, inc) in self.incidence.iter().enumerate() {
            for &(v, _) in inc {
                owners[v].push(c);
            }
        }
        owners
    }

    /// Look up a vertex by exact coordinates.
    pub fn find(&self, p: Point) -> Option<usize> {
        // coordinates are unique; a linear scan keeps the struct plain
        self.coords.iter().position(|q| *q == p)
    }

    /// Weighted graph Laplacian (the energy form) on all vertices.
    pub fn laplacian(&self) -> SymmetricSparse {
        let trip = self.edges.iter().flat_map(|e| {
            [(e.u, e.u, e.conductance), (e.v, e.v, e.conductance), (e.u, e.v, -e.conductance)]
        });
        SymmetricSparse::from_triplets(self.vertex_count(), trip).expect("edge indices are in range")
    }
}

/// Upper bound on the vertex count of a level-`m` refinement.
pub fn vertex_estimate(complex: &CellComplex, m: u32) -> usize {
    let per_cell = match complex.template.kind {
        TemplateKind::SierpinskiGasket => 3usize.saturating_mul(3usize.saturating_pow(m).saturating_add(1)) / 2,
        TemplateKind::Interval => (1usize << m.min(62)) + 1,
    };
    per_cell.saturating_mul(complex.cell_count())
}

pub fn refine(complex: &CellComplex, m: u32) -> Result<GraphApprox> {
    refine_capped(complex, m, DEFAULT_VERTEX_CAP)
}

pub fn refine_capped(complex: &CellComplex, m: u32, cap: usize) -> Result<GraphApprox> {
    let estimate = vertex_estimate(complex, m);
    if estimate > cap || m > 20 {
        return Err(Error::CapExceeded { what: "graph vertex", requested: estimate, cap });
    }
    let template = &complex.template;
    let subcells = template.subcells(m);
    let weights = template.subcell_weights(m);
    let conductance = libm::pow(template.uniform_resistance(), -(m as f64));
    let k = template.boundary_vertex_count() as f64;

    // local vertex list of one cell, with local masses
    let mut local_index: BTreeMap<Point, usize> = BTreeMap::new();
    let mut local_points: Vec<Point> = Vec::new();
    let mut local_mass: Vec<f64> = Vec::new();
    let mut local_edges: Vec<(usize, usize)> = Vec::new();
    for (sub, w) in subcells.iter().zip(&weights) {
        let ids: Vec<usize> = sub
            .iter()
            .map(|p| {
                *local_index.entry(*p).or_insert_with(|| {
                    local_points.push(*p);
                    local_mass.push(0.0);
                    local_points.len() - 1
                })
            })
            .collect();
        for &i in &ids {
            local_mass[i] += w / k;
        }
        for a in 0..ids.len() {
            for b in (a + 1)..ids.len() {
                local_edges.push((ids[a], ids[b]));
            }
        }
    }

    let mut junction: BTreeMap<Point, usize> = BTreeMap::new();
    for (i, p) in complex.vertices.iter().enumerate() {
        junction.insert(*p, i);
    }
    let rim: alloc::collections::BTreeSet<usize> = complex.rim.iter().copied().collect();

    let mut global: BTreeMap<Point, usize> = BTreeMap::new();
    let mut coords = Vec::with_capacity(estimate);
    let mut tags = Vec::with_capacity(estimate);
    let mut measure = Vec::with_capacity(estimate);
    let mut edges = Vec::with_capacity(local_edges.len() * complex.cell_count());
    let mut incidence = Vec::with_capacity(complex.cell_count());
    let mut map = vec![0usize; local_points.len()];
    for (c, phi) in complex.placements.iter().enumerate() {
        let mut inc = Vec::with_capacity(local_points.len());
        for (i, p) in local_points.iter().enumerate() {
            let q = phi.apply(*p);
            let id = *global.entry(q).or_insert_with(|| {
                coords.push(q);
                tags.push(match junction.get(&q) {
                    Some(j) if rim.contains(j) => VertexTag::TruncationBoundary,
                    Some(_) => VertexTag::CellBoundary,
                    None => VertexTag::Interior,
                });
                measure.push(0.0);
                coords.len() - 1
            });
            measure[id] += local_mass[i];
            map[i] = id;
            inc.push((id, local_mass[i]));
        }
        for &(a, b) in &local_edges {
            edges.push(Edge { u: map[a], v: map[b], conductance, cell: c });
        }
        incidence.push(inc);
    }
    let origin_vertex = *global
        .get(&complex.origin)
        .ok_or_else(|| invalid("origin missing from refinement"))?;
    Ok(GraphApprox {
        level: m,
        coords,
        tags,
        measure,
        edges,
        incidence,
        origin_vertex,
        template_kind: template.kind,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    EuclideanCoordinate,
    CellGraphScaled,
    EffectiveResistance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    pub kind: MetricKind,
    pub values: Vec<f64>,
}

/// Default ceiling on the vertex count for effective-resistance fields.
pub const DEFAULT_DENSE_CAP: usize = 4000;

pub fn distance_field(complex: &CellComplex, graph: &GraphApprox, kind: MetricKind) -> Result<DistanceField> {
    distance_field_capped(complex, graph, kind, DEFAULT_DENSE_CAP)
}

pub fn distance_field_capped(
    complex: &CellComplex,
    graph: &GraphApprox,
    kind: MetricKind,
    cap: usize,
) -> Result<DistanceField> {
    if graph.cell_count() != complex.cell_count() {
        return Err(invalid("graph and complex disagree on the cell count"));
    }
    let values = match kind {
        MetricKind::EuclideanCoordinate => {
            let o = graph.coords[graph.origin_vertex];
            graph.coords.iter().map(|p| (*p - o).norm()).collect()
        }
        MetricKind::CellGraphScaled => {
            let hops = complex.origin_hops();
            let diam = complex.template.diameter();
            let mut d = vec![f64::INFINITY; graph.vertex_count()];
            for (c, inc) in graph.incidence.iter().enumerate() {
                for &(v, _) in inc {
                    d[v] = d[v].min(hops[c] as f64 * diam);
                }
            }
            d
        }
        MetricKind::EffectiveResistance => {
            let n = graph.vertex_count();
            if n > cap {
                return Err(Error::CapExceeded { what: "effective-resistance vertex", requested: n, cap });
            }
            resistance_from(graph, graph.origin_vertex)?
        }
    };
    Ok(DistanceField { kind, values })
}

/// `R(s, x)` for every vertex `x`: the diagonal of the inverse of the
/// Laplacian grounded at `s`, which equals
/// `L⁺_ss + L⁺_xx - 2 L⁺_sx` for the pseudoinverse `L⁺`.
pub fn resistance_from(graph: &GraphApprox, source: usize) -> Result<Vec<f64>> {
    let lap = graph.laplacian();
    let n = lap.dim();
    let grounded = ground(&lap, source);
    let factor = Ldlt::factor(&grounded, 1e-14 * grounded.max_abs().max(1.0))
        .map_err(|_| Error::Unsolvable("grounded Laplacian is singular (disconnected graph?)".into()))?;
    let mut out = vec![0.0; n];
    let mut rhs = vec![0.0; n - 1];
    for (x, o) in out.iter_mut().enumerate() {
        if x == source {
            continue;
        }
        let ix = if x < source { x } else { x - 1 };
        rhs[ix] = 1.0;
        *o = factor.solve(&rhs)[ix];
        rhs[ix] = 0.0;
    }
    Ok(out)
}

/// Remove row and column `s`.
pub(crate) fn ground(lap: &SymmetricSparse, s: usize) -> SymmetricSparse {
    let shift = |j: usize| if j < s { j } else { j - 1 };
    let mut out = SymmetricSparse::zeros(lap.dim() - 1);
    for i in 0..lap.dim() {
        if i == s {
            continue;
        }
        out.diag[shift(i)] = lap.diag[i];
        out.off[shift(i)] = lap.off[i].iter().filter(|(j, _)| *j != s).map(|(j, v)| (shift(*j), *v)).collect();
    }
    out
}

/// Check the triangle inequality of `d(0, ·)` against a pairwise metric on
/// a sample of vertex pairs: `|d(0,x) - d(0,y)| ≤ d(x,y)`.
pub fn check_triangle(field: &DistanceField, pairs: &[(usize, usize, f64)]) -> Result<()> {
    for &(x, y, dxy) in pairs {
        let gap = (field.values[x] - field.values[y]).abs();
        if gap > dxy * (1.0 + 1e-12) + 1e-12 {
            return Err(invalid(format!("triangle inequality fails at ({x}, {y}): {gap} > {dxy}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::*;

    fn single_sg(m: u32) -> (CellComplex, GraphApprox) {
        let c = build_blowup(&build_sg2_template(), &[1], 0).unwrap();
        let g = refine(&c, m).unwrap();
        (c, g)
    }

    #[test]
    fn level_zero_and_one() {
        let (_, g0) = single_sg(0);
        assert_eq!(g0.vertex_count(), 3);
        assert_eq!(g0.edges.len(), 3);
        assert!(g0.edges.iter().all(|e| (e.conductance - 1.0).abs() < 1e-15));
        assert!(g0.measure.iter().all(|m| (m - 1.0 / 3.0).abs() < 1e-15));
        let (_, g1) = single_sg(1);
        assert_eq!(g1.vertex_count(), 6);
        assert_eq!(g1.edges.len(), 9);
        assert!(g1.edges.iter().all(|e| (e.conductance - 5.0 / 3.0).abs() < 1e-14));
    }

    #[test]
    fn mass_and_vertex_counts() {
        for m in 0..6 {
            let (_, g) = single_sg(m);
            assert!((g.total_measure() - 1.0).abs() < 1e-12);
            assert_eq!(g.vertex_count(), 3 * (3usize.pow(m) + 1) / 2);
        }
        let c = build_blowup(&build_sg2_template(), &[1, 2, 3], 3).unwrap();
        let g = refine(&c, 2).unwrap();
        assert!((g.total_measure() - 27.0).abs() < 1e-10);
        // every rim vertex is a cell-boundary vertex, and there are 3 of them
        assert_eq!(g.tags.iter().filter(|t| **t == VertexTag::TruncationBoundary).count(), 3);
        let junctions = g.tags.iter().filter(|t| **t != VertexTag::Interior).count();
        assert_eq!(junctions, c.vertices.len());
    }

    #[test]
    fn cap_is_enforced() {
        let (c, _) = single_sg(0);
        assert!(matches!(refine_capped(&c, 8, 100), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn interval_refinement() {
        let c = build_interval_lattice(3).unwrap();
        let g = refine(&c, 4).unwrap();
        assert_eq!(g.vertex_count(), 3 * 16 + 1);
        assert!((g.total_measure() - 3.0).abs() < 1e-12);
        assert!(g.edges.iter().all(|e| (e.conductance - 16.0).abs() < 1e-12));
        let d = distance_field(&c, &g, MetricKind::EuclideanCoordinate).unwrap();
        for k in 0..=3 {
            let v = g.find(crate::dyadic::Point::int(k, 0)).unwrap();
            assert!((d.values[v] - k as f64).abs() < 1e-15);
        }
    }

    /// Reduce the level-`m` gasket network with edge resistance `rho` to an
    /// equivalent triangle by Kron reduction of the 6-node level-1 network,
    /// one level at a time.
    fn reduced_triangle_resistance(m: u32, rho: f64) -> f64 {
        let mut r = rho;
        for _ in 0..m {
            // nodes: corners 0,1,2; midpoints 3 (01), 4 (02), 5 (12)
            let tri = [[0, 3, 4], [3, 1, 5], [4, 5, 2]];
            let mut l = [[0.0f64; 6]; 6];
            for t in tri {
                for a in 0..3 {
                    for b in 0..3 {
                        if a != b {
                            l[t[a]][t[b]] -= 1.0 / r;
                            l[t[a]][t[a]] += 1.0 / r;
                        }
                    }
                }
            }
            // Schur complement onto the corners
            let mut a = [[0.0f64; 3]; 3];
            let mut inner = [[0.0f64; 3]; 3];
            for i in 0..3 {
                a[i].copy_from_slice(&l[i][..3]);
                inner[i].copy_from_slice(&l[3 + i][3..6]);
            }
            let det = inner[0][0] * (inner[1][1] * inner[2][2] - inner[1][2] * inner[2][1])
                - inner[0][1] * (inner[1][0] * inner[2][2] - inner[1][2] * inner[2][0])
                + inner[0][2] * (inner[1][0] * inner[2][1] - inner[1][1] * inner[2][0]);
            let mut inv = [[0.0f64; 3]; 3];
            for (i, row) in inv.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    *x = (inner[r0][c0] * inner[r1][c1] - inner[r0][c1] * inner[r1][c0]) / det;
                }
            }
            let mut s = a;
            for i in 0..3 {
                for j in 0..3 {
                    for p in 0..3 {
                        for q in 0..3 {
                            s[i][j] -= l[i][3 + p] * inv[p][q] * l[3 + q][j];
                        }
                    }
                }
            }
            r = -1.0 / s[0][1];
        }
        // triangle of equal resistors r: R(p1, p2) = r ∥ 2r
        2.0 * r / 3.0
    }

    #[test]
    fn resistance_two_ways() {
        let (c, g) = single_sg(2);
        let d = distance_field(&c, &g, MetricKind::EffectiveResistance).unwrap();
        let p2 = g.find(crate::dyadic::Point::int(1, 0)).unwrap();
        let reduced = reduced_triangle_resistance(2, libm::pow(0.6, 2.0));
        assert!((d.values[p2] - reduced).abs() < 1e-10, "{} vs {reduced}", d.values[p2]);
        assert!((reduced - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(d.values[g.origin_vertex], 0.0);
    }

    #[test]
    fn distance_fields_vanish_at_origin_and_satisfy_triangle() {
        let c = build_hexagonal(&build_sg2_template(), 2).unwrap();
        let g = refine(&c, 1).unwrap();
        for kind in [MetricKind::EuclideanCoordinate, MetricKind::CellGraphScaled, MetricKind::EffectiveResistance] {
            let d = distance_field(&c, &g, kind).unwrap();
            assert_eq!(d.values[g.origin_vertex], 0.0);
            assert!(d.values.iter().all(|v| *v >= 0.0 && v.is_finite()));
        }
        // resistance triangle inequality against R(x, y) on sampled pairs
        let d = distance_field(&c, &g, MetricKind::EffectiveResistance).unwrap();
        let mut pairs = Vec::new();
        for x in (0..g.vertex_count()).step_by(7) {
            let rx = resistance_from(&g, x).unwrap();
            for y in (0..g.vertex_count()).step_by(5) {
                pairs.push((x, y, rx[y]));
            }
        }
        check_triangle(&d, &pairs).unwrap();
        // Euclidean field against Euclidean pair distances
        let e = distance_field(&c, &g, MetricKind::EuclideanCoordinate).unwrap();
        let pairs: Vec<_> = (0..g.vertex_count())
            .flat_map(|x| (0..g.vertex_count()).map(move |y| (x, y)))
            .map(|(x, y)| (x, y, (g.coords[x] - g.coords[y]).norm()))
            .collect();
        check_triangle(&e, &pairs).unwrap();
    }

    #[test]
    fn resistance_cap() {
        let c = build_blowup(&build_sg2_template(), &[1, 2, 3], 3).unwrap();
        let g = refine(&c, 2).unwrap();
        assert!(distance_field_capped(&c, &g, MetricKind::EffectiveResistance, 10).is_err());
    }
}
