//! Finite truncations of unbounded cell-decomposable spaces.
//!
//! A [`CellComplex`] is a list of isometric copies ("cells") of a compact
//! [`Template`], glued at images of the template's boundary vertices. Gluing
//! is found by exact coordinate equality, so rebuilding with the same
//! parameters is bit-identical.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dyadic::{AffineMap, Dyadic, Point};
use crate::error::{invalid, Result};
use crate::fit::least_squares_slope;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemplateKind {
    /// SG(2): three contractions `x ↦ (x + p_j)/2`.
    SierpinskiGasket,
    /// Unit interval with contractions `x/2`, `x/2 + 1/2`.
    Interval,
}

/// A self-similar compact cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub name: String,
    pub kind: TemplateKind,
    /// Boundary vertices `p_1, …, p_k`.
    pub boundary: Vec<Point>,
    pub maps: Vec<AffineMap>,
    /// Self-similar measure weights `μ_i`.
    pub measure_weights: Vec<f64>,
    /// Resistance renormalization weights `r_i`.
    pub resistance_weights: Vec<f64>,
}

impl Template {
    pub fn boundary_vertex_count(&self) -> usize {
        self.boundary.len()
    }

    /// `γ_i = √(r_i μ_i)`.
    pub fn gammas(&self) -> Vec<f64> {
        self.measure_weights
            .iter()
            .zip(&self.resistance_weights)
            .map(|(m, r)| libm::sqrt(m * r))
            .collect()
    }

    /// The unique `d` with `Σ γ_i^d = 1`.
    pub fn spectral_dimension(&self) -> f64 {
        let gammas = self.gammas();
        let f = |d: f64| gammas.iter().map(|g| libm::pow(*g, d)).sum::<f64>() - 1.0;
        // f is strictly decreasing with f(0) = N - 1 > 0
        let (mut lo, mut hi) = (0.0, 1.0);
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Euclidean diameter, attained between boundary vertices for both
    /// shipped templates.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.boundary.iter().enumerate() {
            for q in &self.boundary[i + 1..] {
                d = d.max((*p - *q).norm());
            }
        }
        d
    }

    /// Uniform resistance weight (both shipped templates are uniform).
    pub fn uniform_resistance(&self) -> f64 {
        self.resistance_weights[0]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.maps.len();
        if self.measure_weights.len() != n || self.resistance_weights.len() != n {
            return Err(invalid("weight vectors must match the number of maps"));
        }
        let total: f64 = self.measure_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("measure weights sum to {total}, expected 1")));
        }
        for (m, r) in self.measure_weights.iter().zip(&self.resistance_weights) {
            if !(*m > 0.0 && *m < 1.0 && *r > 0.0 && *r < 1.0) {
                return Err(invalid("weights must lie in (0, 1)"));
            }
            if m * r >= 1.0 {
                return Err(invalid("μ_i r_i must be < 1"));
            }
        }
        for p in &self.boundary {
            if !self.maps.iter().any(|psi| psi.apply(*p) == *p) {
                return Err(invalid(format!("boundary vertex {p:?} is not a fixed point")));
            }
        }
        Ok(())
    }

    /// Measure `μ_w = Π μ_{w_i}` of every word of length `m`, in the order
    /// used by [`Template::subcells`].
    pub fn subcell_weights(&self, m: u32) -> Vec<f64> {
        let mut w = vec![1.0];
        for _ in 0..m {
            w = w.iter().flat_map(|x| self.measure_weights.iter().map(move |mu| x * mu)).collect();
        }
        w
    }

    /// Boundary vertices of the sub-cell `Ψ_w K` for every word `w` of
    /// length `m`, in lexicographic word order.
    pub fn subcells(&self, m: u32) -> Vec<Vec<Point>> {
        let mut cells: Vec<AffineMap> = vec![AffineMap::IDENTITY];
        for _ in 0..m {
            let mut next = Vec::with_capacity(cells.len() * self.maps.len());
            for w in &cells {
                for psi in &self.maps {
                    next.push(w.compose(psi));
                }
            }
            cells = next;
        }
        cells
            .iter()
            .map(|w| self.boundary.iter().map(|p| w.apply(*p)).collect())
            .collect()
    }
}

/// SG(2) on the corners `(0,0), (1,0), (0,1)` of the lattice basis, with
/// `μ_i = 1/3`, `r_i = 3/5`.
pub fn build_sg2_template() -> Template {
    let boundary = vec![Point::int(0, 0), Point::int(1, 0), Point::int(0, 1)];
    let half = Dyadic::ONE.half();
    let maps = boundary.iter().map(|p| AffineMap::homothety(half, *p)).collect();
    Template {
        name: "SG2".into(),
        kind: TemplateKind::SierpinskiGasket,
        boundary,
        maps,
        measure_weights: vec![1.0 / 3.0; 3],
        resistance_weights: vec![3.0 / 5.0; 3],
    }
}

/// The unit interval `[0, 1]` with its two dyadic halves.
pub fn build_interval_template() -> Template {
    let boundary = vec![Point::int(0, 0), Point::int(1, 0)];
    let half = Dyadic::ONE.half();
    let maps = boundary.iter().map(|p| AffineMap::homothety(half, *p)).collect();
    Template {
        name: "interval".into(),
        kind: TemplateKind::Interval,
        boundary,
        maps,
        measure_weights: vec![0.5; 2],
        resistance_weights: vec![0.5; 2],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ComplexKind {
    Blowup { word: Vec<u8>, generations: u32 },
    Ladder { length: usize },
    Hexagonal { radius: usize },
    TriangularField { radius: usize },
    IntervalLattice { cells: usize },
}

/// A truncated cellular decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct CellComplex {
    pub template: Template,
    pub kind: ComplexKind,
    /// Placement isometry `φ_α` of each cell.
    pub placements: Vec<AffineMap>,
    /// Distinct cell-boundary vertices (junctions and free corners).
    pub vertices: Vec<Point>,
    /// For each cell, indices into `vertices` in template boundary order.
    pub cell_vertices: Vec<Vec<usize>>,
    /// Cell graph Γ: cells sharing a boundary vertex.
    pub adjacency: Vec<Vec<usize>>,
    pub origin: Point,
    pub origin_cell: usize,
    /// Boundary vertices that are shared with cells outside the truncation.
    pub rim: Vec<usize>,
    /// Number of cells meeting at a junction of the untruncated space.
    pub junction_arity: usize,
    pub warnings: Vec<String>,
}

impl CellComplex {
    fn assemble(
        template: Template,
        kind: ComplexKind,
        placements: Vec<AffineMap>,
        origin: Point,
        junction_arity: usize,
    ) -> Result<Self> {
        template.validate()?;
        if placements.is_empty() {
            return Err(invalid("complex needs at least one cell"));
        }
        let mut index: BTreeMap<Point, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut cell_vertices = Vec::with_capacity(placements.len());
        for phi in &placements {
            debug_assert!(phi.is_isometry());
            let ids = template
                .boundary
                .iter()
                .map(|p| {
                    let q = phi.apply(*p);
                    *index.entry(q).or_insert_with(|| {
                        vertices.push(q);
                        vertices.len() - 1
                    })
                })
                .collect::<Vec<_>>();
            cell_vertices.push(ids);
        }
        let mut owners: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for (c, ids) in cell_vertices.iter().enumerate() {
            for &v in ids {
                owners[v].push(c);
            }
        }
        let mut adjacency: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); placements.len()];
        for own in &owners {
            for &a in own {
                for &b in own {
                    if a != b {
                        adjacency[a].insert(b);
                    }
                }
            }
        }
        let rim = owners
            .iter()
            .enumerate()
            .filter(|(_, own)| own.len() < junction_arity)
            .map(|(v, _)| v)
            .collect();
        let origin_cell = match index.get(&origin) {
            Some(&v) => owners[v][0],
            None => {
                return Err(invalid(format!("origin {origin:?} is not a cell vertex")));
            }
        };
        let complex = CellComplex {
            template,
            kind,
            placements,
            vertices,
            cell_vertices,
            adjacency: adjacency.into_iter().map(|s| s.into_iter().collect()).collect(),
            origin,
            origin_cell,
            rim,
            junction_arity,
            warnings: Vec::new(),
        };
        if !complex.is_connected() {
            return Err(invalid("cell graph is not connected"));
        }
        Ok(complex)
    }

    pub fn cell_count(&self) -> usize {
        self.placements.len()
    }

    /// Each cell carries μ-measure 1.
    pub fn total_measure(&self) -> f64 {
        self.cell_count() as f64
    }

    /// `Σ_cells |∂K| - #distinct boundary vertices`.
    pub fn identification_count(&self) -> usize {
        self.cell_vertices.iter().map(Vec::len).sum::<usize>() - self.vertices.len()
    }

    pub fn origin_vertex(&self) -> usize {
        self.vertices.iter().position(|p| *p == self.origin).expect("origin is a vertex")
    }

    /// Cells containing a given boundary vertex.
    pub fn owners(&self, vertex: usize) -> Vec<usize> {
        self.cell_vertices
            .iter()
            .enumerate()
            .filter(|(_, ids)| ids.contains(&vertex))
            .map(|(c, _)| c)
            .collect()
    }

    fn is_connected(&self) -> bool {
        self.hop_distances(&[0]).iter().all(|d| d.is_some())
    }

    /// A larger truncation of the same space with the same origin that
    /// contains this one cell for cell (Γ-radius roughly doubled).
    pub fn padded(&self) -> Result<CellComplex> {
        let t = &self.template;
        match &self.kind {
            ComplexKind::Blowup { word, generations } => {
                if word.len() <= *generations as usize {
                    return Err(invalid(format!(
                        "padding a blow-up of {generations} generations needs a word of length {}, got {}",
                        generations + 1,
                        word.len()
                    )));
                }
                build_blowup(t, word, generations + 1)
            }
            ComplexKind::Ladder { length } => build_ladder(t, 2 * length),
            ComplexKind::Hexagonal { radius } => build_hexagonal(t, 2 * radius),
            ComplexKind::TriangularField { radius } => build_trifield(t, 2 * radius),
            ComplexKind::IntervalLattice { cells } => build_interval_lattice(2 * cells),
        }
    }

    /// The sub-complex made of the listed cells (same origin, which must
    /// lie in one of them). Vertices shared with dropped cells become rim.
    pub fn restrict(&self, cells: &[usize]) -> Result<CellComplex> {
        let placements = cells
            .iter()
            .map(|c| self.placements.get(*c).copied().ok_or_else(|| invalid(format!("cell {c} does not exist"))))
            .collect::<Result<Vec<_>>>()?;
        CellComplex::assemble(self.template.clone(), self.kind.clone(), placements, self.origin, self.junction_arity)
    }

    /// Γ-hop distances from a set of source cells.
    pub fn hop_distances(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cell_count()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(c) = queue.pop_front() {
            let d = dist[c].unwrap_or(0);
            for &n in &self.adjacency[c] {
                if dist[n].is_none() {
                    dist[n] = Some(d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Hop distance of every cell from the cells containing the origin.
    pub fn origin_hops(&self) -> Vec<usize> {
        let origin = self.origin_vertex();
        let sources = self.owners(origin);
        self.hop_distances(&sources).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect()
    }

    /// Smallest Γ-distance from the origin cells to a cell touching the rim
    /// (an origin lying on the rim itself is ignored); `None` when there is
    /// no other rim vertex.
    pub fn truncation_radius(&self) -> Option<usize> {
        let hops = self.origin_hops();
        let origin = self.origin_vertex();
        let mut best: Option<usize> = None;
        for &v in self.rim.iter().filter(|v| **v != origin) {
            for c in self.owners(v) {
                best = Some(best.map_or(hops[c], |b: usize| b.min(hops[c])));
            }
        }
        best
    }

    /// Exhaustive check that distinct cells meet only in shared boundary
    /// vertices: every sub-cell vertex at `level` that lies in two cells
    /// must be an image of a template boundary vertex in both.
    pub fn cells_adjoin_only_on_boundary(&self, level: u32) -> bool {
        let sub = self.template.subcells(level);
        let mut local: BTreeSet<Point> = BTreeSet::new();
        for s in &sub {
            local.extend(s.iter().copied());
        }
        let boundary: BTreeSet<Point> = self.template.boundary.iter().copied().collect();
        let mut seen: BTreeMap<Point, (usize, bool)> = BTreeMap::new();
        for (c, phi) in self.placements.iter().enumerate() {
            for p in &local {
                let q = phi.apply(*p);
                let is_bdry = boundary.contains(p);
                if let Some(&(other, other_bdry)) = seen.get(&q) {
                    if other != c && !(is_bdry && other_bdry) {
                        return false;
                    }
                } else {
                    seen.insert(q, (c, is_bdry));
                }
            }
        }
        true
    }
}

fn sg_template_check(template: &Template) -> Result<()> {
    if template.kind != TemplateKind::SierpinskiGasket {
        return Err(invalid("this builder requires the SG2 template"));
    }
    Ok(())
}

/// The truncation `(Ψ_{w_1}^{-1} ∘ … ∘ Ψ_{w_g}^{-1})(K)` of the infinite
/// blow-up along `word` (letters are 1-based map indices).
pub fn build_blowup(template: &Template, word: &[u8], generations: u32) -> Result<CellComplex> {
    let g = generations as usize;
    if word.len() < g {
        return Err(invalid(format!(
            "word of length {} is too short for {} generations",
            word.len(),
            generations
        )));
    }
    if word.is_empty() {
        return Err(invalid("blow-up word must be non-empty"));
    }
    let n_maps = template.maps.len() as u8;
    if word.iter().any(|&l| l == 0 || l > n_maps) {
        return Err(invalid(format!("word letters must lie in 1..={n_maps}")));
    }
    // Φ^{-1} = Ψ_{w_1}^{-1} ∘ … ∘ Ψ_{w_g}^{-1}
    let mut phi_inv = AffineMap::IDENTITY;
    for &l in &word[..g] {
        let inv = template.maps[(l - 1) as usize].inverse().ok_or_else(|| invalid("map is not invertible"))?;
        phi_inv = phi_inv.compose(&inv);
    }
    let mut words: Vec<AffineMap> = vec![AffineMap::IDENTITY];
    for _ in 0..g {
        let mut next = Vec::with_capacity(words.len() * template.maps.len());
        for w in &words {
            for psi in &template.maps {
                next.push(w.compose(psi));
            }
        }
        words = next;
    }
    let placements = words.iter().map(|w| phi_inv.compose(w)).collect();
    let origin = template.boundary[(word[0] - 1) as usize];
    let mut complex = CellComplex::assemble(
        template.clone(),
        ComplexKind::Blowup { word: word.to_vec(), generations },
        placements,
        origin,
        2,
    )?;
    let used = &word[..g.max(1)];
    if used.len() >= 2 && used.iter().all(|&l| l == used[0]) {
        complex.warnings.push(format!(
            "word prefix {used:?} is constant: the origin sits on the truncation rim"
        ));
    }
    Ok(complex)
}

/// Ladder periodic fractafold: a row of upward cells `B_i` and downward
/// cells `T_i`, with rails `B_i–B_{i+1}`, `T_i–T_{i+1}` and rungs `B_i–T_i`.
pub fn build_ladder(template: &Template, length: usize) -> Result<CellComplex> {
    sg_template_check(template)?;
    if length == 0 {
        return Err(invalid("ladder length must be ≥ 1"));
    }
    // rungs i ∈ [-⌊length/2⌋, length - ⌊length/2⌋), origin on rung 0
    let start = -((length / 2) as i64);
    let mut placements = Vec::with_capacity(2 * length);
    for i in start..start + length as i64 {
        placements.push(AffineMap::translation(Point::int(i, 0)));
        placements.push(AffineMap::point_reflection(Point::int(i, 2)));
    }
    CellComplex::assemble(
        template.clone(),
        ComplexKind::Ladder { length },
        placements,
        Point::int(0, 1),
        2,
    )
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum KagomeCell {
    Up(i64, i64),
    Down(i64, i64),
}

impl KagomeCell {
    fn neighbours(self) -> [KagomeCell; 3] {
        use KagomeCell::*;
        match self {
            Up(a, b) => [Down(a - 1, b), Down(a, b), Down(a - 1, b + 1)],
            Down(a, b) => [Up(a, b), Up(a + 1, b), Up(a + 1, b - 1)],
        }
    }

    fn placement(self) -> AffineMap {
        match self {
            KagomeCell::Up(a, b) => AffineMap::translation(Point::int(2 * a, 2 * b)),
            KagomeCell::Down(a, b) => AffineMap::point_reflection(Point::int(2 * a + 2, 2 * b)),
        }
    }
}

/// Cells within Γ-distance `< radius` of the central hexagon, found by BFS
/// on the infinite cell graph `neighbours`; the result is sorted.
fn lattice_patch<C: Ord + Copy>(seeds: &[C], depth: usize, neighbours: impl Fn(C) -> Vec<C>) -> Vec<C> {
    let mut seen: BTreeMap<C, usize> = seeds.iter().map(|c| (*c, 0)).collect();
    let mut queue: VecDeque<C> = seeds.iter().copied().collect();
    while let Some(c) = queue.pop_front() {
        let d = seen[&c];
        if d == depth {
            continue;
        }
        for n in neighbours(c) {
            if let alloc::collections::btree_map::Entry::Vacant(e) = seen.entry(n) {
                e.insert(d + 1);
                queue.push_back(n);
            }
        }
    }
    seen.into_keys().collect()
}

/// Hexagonal periodic fractafold: SG cells on the triangles of a kagome
/// lattice, whose cell graph is the honeycomb lattice. `radius = 1` is the
/// ring of six cells around one hexagonal hole; each increment adds one
/// Γ-layer.
pub fn build_hexagonal(template: &Template, radius: usize) -> Result<CellComplex> {
    sg_template_check(template)?;
    if radius == 0 {
        return Err(invalid("hexagonal radius must be ≥ 1"));
    }
    use KagomeCell::*;
    let ring = [Up(0, 0), Down(0, 0), Up(1, 0), Down(0, 1), Up(0, 1), Down(-1, 1)];
    let cells = lattice_patch(&ring, radius - 1, |c| c.neighbours().to_vec());
    let placements = cells.iter().map(|c| c.placement()).collect();
    CellComplex::assemble(
        template.clone(),
        ComplexKind::Hexagonal { radius },
        placements,
        Point::int(1, 0),
        2,
    )
}

/// Triangular-lattice fractal field: an upward SG cell on every upward
/// triangle of the unit triangular lattice, three cells meeting at every
/// vertex. Cells within hex distance `radius` of the central cell.
pub fn build_trifield(template: &Template, radius: usize) -> Result<CellComplex> {
    sg_template_check(template)?;
    if radius == 0 {
        return Err(invalid("field radius must be ≥ 1"));
    }
    const STEPS: [(i64, i64); 6] = [(-1, 0), (0, -1), (1, 0), (1, -1), (0, 1), (-1, 1)];
    let cells = lattice_patch(&[(0i64, 0i64)], radius, |(a, b)| {
        STEPS.iter().map(|(da, db)| (a + da, b + db)).collect()
    });
    let placements = cells.iter().map(|&(a, b)| AffineMap::translation(Point::int(a, b))).collect();
    CellComplex::assemble(
        template.clone(),
        ComplexKind::TriangularField { radius },
        placements,
        Point::int(0, 0),
        3,
    )
}

/// `cells` unit intervals `[k, k+1]` glued at integer points, origin at 0.
pub fn build_interval_lattice(cells: usize) -> Result<CellComplex> {
    if cells == 0 {
        return Err(invalid("interval lattice needs at least one cell"));
    }
    let placements = (0..cells as i64).map(|k| AffineMap::translation(Point::int(k, 0))).collect();
    CellComplex::assemble(
        build_interval_template(),
        ComplexKind::IntervalLattice { cells },
        placements,
        Point::ORIGIN,
        2,
    )
}

/// `|B_Γ(center, r)|`: number of cells within Γ-distance `r`.
pub fn cell_graph_ball(complex: &CellComplex, center: usize, r: usize) -> Result<usize> {
    if center >= complex.cell_count() {
        return Err(invalid(format!("cell {center} does not exist")));
    }
    Ok(complex
        .hop_distances(&[center])
        .iter()
        .filter(|d| matches!(d, Some(d) if *d <= r))
        .count())
}

/// Least-squares slope of `log |B_Γ(center, r)|` against `log r` over
/// geometrically spaced radii in `[r_min, r_max]`.
pub fn estimate_mass_dimension(complex: &CellComplex, center: usize, r_min: usize, r_max: usize) -> Result<f64> {
    if center >= complex.cell_count() {
        return Err(invalid(format!("cell {center} does not exist")));
    }
    if r_min == 0 || r_min >= r_max {
        return Err(invalid("need 1 ≤ r_min < r_max"));
    }
    let dist = complex.hop_distances(&[center]);
    let ecc = dist.iter().filter_map(|d| *d).max().unwrap_or(0);
    if r_max > ecc {
        return Err(invalid(format!("r_max = {r_max} exceeds the complex radius {ecc}")));
    }
    let mut hist = vec![0usize; ecc + 1];
    for d in dist.iter().flatten() {
        hist[*d] += 1;
    }
    let mut cumulative = Vec::with_capacity(ecc + 1);
    let mut acc = 0;
    for h in &hist {
        acc += h;
        cumulative.push(acc);
    }
    let samples = 24usize;
    let ratio = r_max as f64 / r_min as f64;
    let mut radii: Vec<usize> = (0..samples)
        .map(|i| libm::round(r_min as f64 * libm::pow(ratio, i as f64 / (samples - 1) as f64)) as usize)
        .collect();
    radii.dedup();
    let xs: Vec<f64> = radii.iter().map(|&r| libm::log(r as f64)).collect();
    let ys: Vec<f64> = radii.iter().map(|&r| libm::log(cumulative[r] as f64)).collect();
    least_squares_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg() -> Template {
        build_sg2_template()
    }

    #[test]
    fn sg2_template_values() {
        let t = sg();
        t.validate().unwrap();
        assert_eq!(t.boundary_vertex_count(), 3);
        let ds = t.spectral_dimension();
        assert!((ds - 2.0 * libm::log(3.0) / libm::log(5.0)).abs() < 1e-12);
        // μ(Ψ_w K) = 3^{-|w|}: every word carries the product of its weights
        for m in 0..4u32 {
            let weight: f64 = t.measure_weights[0].powi(m as i32);
            assert!((weight - 3f64.powi(-(m as i32))).abs() < 1e-15);
            assert_eq!(t.subcells(m).len(), 3usize.pow(m));
        }
        assert!((t.diameter() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_template_has_dimension_one() {
        let t = build_interval_template();
        t.validate().unwrap();
        assert!((t.spectral_dimension() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_blowup_is_one_cell() {
        let c = build_blowup(&sg(), &[1, 2, 1], 0).unwrap();
        assert_eq!(c.cell_count(), 1);
        assert_eq!(c.identification_count(), 0);
        assert_eq!(c.origin, Point::int(0, 0));
    }

    #[test]
    fn blowup_counts_and_origin() {
        let c = build_blowup(&sg(), &[1, 2, 3], 2).unwrap();
        assert_eq!(c.cell_count(), 9);
        assert_eq!(c.adjacency.len(), 9);
        assert_eq!(c.rim.len(), 3);
        assert!(c.cells_adjoin_only_on_boundary(2));
        // the original cell is one of the cells
        assert!(c.placements.contains(&AffineMap::IDENTITY));
    }

    #[test]
    fn blowup_rejects_short_words_and_bad_letters() {
        assert!(build_blowup(&sg(), &[1, 2], 3).is_err());
        assert!(build_blowup(&sg(), &[1, 4, 2], 2).is_err());
        let c = build_blowup(&sg(), &[2, 2, 2], 3).unwrap();
        assert_eq!(c.warnings.len(), 1);
    }

    #[test]
    fn blowup_identifications_match_pairwise_scan() {
        let c = build_blowup(&sg(), &[1, 2, 3, 1], 3).unwrap();
        // O(n²) oracle over all cell-boundary images
        let images: Vec<Point> = c
            .placements
            .iter()
            .flat_map(|phi| c.template.boundary.iter().map(move |p| phi.apply(*p)))
            .collect();
        let mut coincident = 0;
        for i in 0..images.len() {
            // count each image that repeats an earlier one
            if images[..i].contains(&images[i]) {
                coincident += 1;
            }
        }
        assert_eq!(c.identification_count(), coincident);
        assert_eq!(coincident, 3 * 27 - c.vertices.len());
    }

    #[test]
    fn ladder_shapes() {
        let one = build_ladder(&sg(), 1).unwrap();
        assert_eq!(one.cell_count(), 2);
        let edges: usize = one.adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        assert_eq!(edges, 1);
        let ten = build_ladder(&sg(), 10).unwrap();
        assert_eq!(ten.cell_count(), 20);
        assert!(ten.cells_adjoin_only_on_boundary(2));
        // interior cells have Γ-degree 3
        assert!(ten.adjacency[4..16].iter().all(|n| n.len() == 3));
        assert_eq!(ten.rim.len(), 4);
    }

    #[test]
    fn ladder_ball_counts() {
        let c = build_ladder(&sg(), 50).unwrap();
        let centre = 2 * 25;
        for r in 0..30 {
            // BFS oracle on the abstract ladder graph: rung 25 bottom
            let mut count = 0;
            for i in 0..50i64 {
                for side in 0..2i64 {
                    let d = (i - 25).abs() + side;
                    if d <= r as i64 {
                        count += 1;
                    }
                }
            }
            assert_eq!(cell_graph_ball(&c, centre, r).unwrap(), count);
        }
        // ball around the whole centre rung: 2·(2r + 1)
        let rung = c.hop_distances(&[centre, centre + 1]);
        assert_eq!(rung.iter().filter(|d| matches!(d, Some(d) if *d <= 5)).count(), 2 * (2 * 5 + 1));
        let dh = estimate_mass_dimension(&c, centre, 2, 24).unwrap();
        assert!((dh - 1.0).abs() < 0.1, "ladder d_h = {dh}");
    }

    #[test]
    fn hexagonal_ring_and_growth() {
        let ring = build_hexagonal(&sg(), 1).unwrap();
        assert_eq!(ring.cell_count(), 6);
        assert!(ring.adjacency.iter().all(|n| n.len() == 2), "a 6-cycle");
        assert!(ring.cells_adjoin_only_on_boundary(1));
        let two = build_hexagonal(&sg(), 2).unwrap();
        for (c, n) in two.adjacency.iter().enumerate() {
            let shared = two.cell_vertices[c].iter().filter(|&&v| two.owners(v).len() > 1).count();
            assert_eq!(n.len(), shared);
        }
        let big = build_hexagonal(&sg(), 12).unwrap();
        let centre = big.origin_cell;
        let mut prev = 0;
        for r in 0..10 {
            let b = cell_graph_ball(&big, centre, r).unwrap();
            assert!(b >= prev);
            prev = b;
        }
        let dh = estimate_mass_dimension(&big, centre, 3, 10).unwrap();
        assert!((dh - 2.0).abs() < 0.2, "hexagonal d_h = {dh}");
    }

    #[test]
    fn trifield_patch() {
        let one = build_trifield(&sg(), 1).unwrap();
        assert_eq!(one.cell_count(), 7);
        for a in 0..7 {
            for b in (a + 1)..7 {
                let shared = one.cell_vertices[a].iter().filter(|v| one.cell_vertices[b].contains(v)).count();
                assert!(shared <= 1);
            }
        }
        let two = build_trifield(&sg(), 2).unwrap();
        let per_cell: usize = two.cell_vertices.iter().map(Vec::len).sum();
        assert_eq!(two.vertices.len(), per_cell - two.identification_count());
        assert!(two.cells_adjoin_only_on_boundary(2));
        let big = build_trifield(&sg(), 12).unwrap();
        let dh = estimate_mass_dimension(&big, big.origin_cell, 3, 10).unwrap();
        assert!((dh - 2.0).abs() < 0.2, "trifield d_h = {dh}");
    }

    #[test]
    fn interval_lattice_counts() {
        let one = build_interval_lattice(1).unwrap();
        assert_eq!(one.vertices.len(), 2);
        let ten = build_interval_lattice(10).unwrap();
        assert_eq!(ten.cell_count(), 10);
        assert_eq!(ten.identification_count(), 9);
        assert_eq!(ten.rim.len(), 2);
        let long = build_interval_lattice(100).unwrap();
        let dh = estimate_mass_dimension(&long, 50, 4, 45).unwrap();
        assert!((dh - 1.0).abs() < 0.05);
    }

    #[test]
    fn ball_edge_cases() {
        let c = build_hexagonal(&sg(), 3).unwrap();
        assert_eq!(cell_graph_ball(&c, 0, 0).unwrap(), 1);
        assert!(cell_graph_ball(&c, 1000, 1).is_err());
        assert!(estimate_mass_dimension(&c, 0, 3, 3).is_err());
    }

    #[test]
    fn padding_contains_the_original() {
        let cases = [
            build_blowup(&sg(), &[1, 2, 3, 1], 3).unwrap(),
            build_ladder(&sg(), 7).unwrap(),
            build_hexagonal(&sg(), 2).unwrap(),
            build_trifield(&sg(), 2).unwrap(),
            build_interval_lattice(5).unwrap(),
        ];
        for c in cases {
            let p = c.padded().unwrap();
            assert_eq!(p.origin, c.origin);
            assert!(c.placements.iter().all(|phi| p.placements.contains(phi)));
            // the interval lattice keeps its origin on the rim
            if c.truncation_radius() > Some(0) {
                assert!(p.truncation_radius() > c.truncation_radius());
            }
        }
        assert!(build_blowup(&sg(), &[1, 2, 3], 3).unwrap().padded().is_err());
    }

    #[test]
    fn rebuild_is_identical() {
        let a = build_blowup(&sg(), &[1, 2, 3, 1, 2], 4).unwrap();
        let b = build_blowup(&sg(), &[1, 2, 3, 1, 2], 4).unwrap();
        assert_eq!(a, b);
    }
}
