//! Sparse symmetric indefinite `LDLᵀ` with minimum-degree ordering and
//! Bunch–Kaufman 1×1 / 2×2 pivots.
//!
//! The factor is built by right-looking elimination on a dynamic adjacency
//! structure: the candidate pivot is a vertex of least current degree, and
//! the Bunch–Kaufman test either accepts it, swaps in its largest
//! off-diagonal partner, or pairs the two into a 2×2 block. Inertia is read
//! off the pivot blocks (Sylvester's law).

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::SymmetricSparse;

/// Bunch–Kaufman growth constant `(1 + √17)/8`.
const ALPHA: f64 = 0.640_388_203_202_208_4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

#[derive(Clone, Debug)]
enum Pivot {
    One { p: usize, d: f64 },
    Two { p: usize, q: usize, a: f64, b: f64, c: f64 },
}

#[derive(Clone, Debug)]
struct Step {
    pivot: Pivot,
    /// Multipliers `l_j = a_{jP} D^{-1}` for every row `j` touched.
    below: Vec<(usize, [f64; 2])>,
}

/// A completed factorization.
#[derive(Clone, Debug)]
pub struct Ldlt {
    n: usize,
    steps: Vec<Step>,
    inertia: Inertia,
    two_by_two: usize,
    fill: usize,
}

impl Ldlt {
    /// Factor `matrix`. A pivot block whose smallest eigenvalue magnitude is
    /// `≤ zero_tol` aborts with [`Error::Breakdown`] (the caller decides how
    /// to shift); `lambda` in the error is NaN and meant to be overwritten.
    pub fn factor(matrix: &SymmetricSparse, zero_tol: f64) -> Result<Self> {
        let n = matrix.dim();
        let mut rows = matrix.off.clone();
        let mut dg = matrix.diag.clone();
        let mut active = vec![true; n];
        let mut queue: BTreeSet<(usize, usize)> = rows.iter().enumerate().map(|(v, r)| (r.len(), v)).collect();
        let mut pos = vec![usize::MAX; n];
        let mut in_set = vec![false; n];
        let mut steps = Vec::with_capacity(n);
        let mut inertia = Inertia::default();
        let mut two_by_two = 0;
        let mut fill = 0;

        while let Some(&(_, p)) = queue.iter().next() {
            let pivot = choose_pivot(p, &rows, &dg);
            let (pset, nset): ([usize; 2], usize) = match pivot {
                Pivot::One { p, .. } => ([p, usize::MAX], 1),
                Pivot::Two { p, q, .. } => ([p, q], 2),
            };
            // singularity test and inertia
            match pivot {
                Pivot::One { d, .. } => {
                    if !(d.abs() > zero_tol) {
                        return Err(Error::Breakdown { lambda: f64::NAN });
                    }
                    if d < 0.0 {
                        inertia.negative += 1;
                    } else {
                        inertia.positive += 1;
                    }
                }
                Pivot::Two { a, b, c, .. } => {
                    let det = a * c - b * b;
                    let half_tr = 0.5 * (a + c);
                    let big = half_tr.abs() + libm::hypot(0.5 * (a - c), b);
                    if !(det.abs() / big > zero_tol) {
                        return Err(Error::Breakdown { lambda: f64::NAN });
                    }
                    if det < 0.0 {
                        inertia.negative += 1;
                        inertia.positive += 1;
                    } else if half_tr < 0.0 {
                        inertia.negative += 2;
                    } else {
                        inertia.positive += 2;
                    }
                    two_by_two += 1;
                }
            }
            for &v in &pset[..nset] {
                queue.remove(&(rows[v].len(), v));
                active[v] = false;
                in_set[v] = true;
            }
            // gather a_{jP} for neighbours j of the pivot set
            let mut cols: Vec<(usize, [f64; 2])> = Vec::new();
            for (slot, &v) in pset[..nset].iter().enumerate() {
                for &(j, a) in &rows[v] {
                    if in_set[j] {
                        continue;
                    }
                    if pos[j] == usize::MAX {
                        pos[j] = cols.len();
                        cols.push((j, [0.0; 2]));
                    }
                    cols[pos[j]].1[slot] = a;
                }
            }
            for (j, _) in &cols {
                pos[*j] = usize::MAX;
            }
            let mults: Vec<[f64; 2]> = cols
                .iter()
                .map(|(_, c)| match pivot {
                    Pivot::One { d, .. } => [c[0] / d, 0.0],
                    Pivot::Two { a, b, c: cc, .. } => {
                        let det = a * cc - b * b;
                        [(c[0] * cc - c[1] * b) / det, (c[1] * a - c[0] * b) / det]
                    }
                })
                .collect();
            // Schur complement update on the neighbour clique
            for (idx, &(j, cj)) in cols.iter().enumerate() {
                debug_assert!(active[j]);
                queue.remove(&(rows[j].len(), j));
                let lj = mults[idx];
                dg[j] -= lj[0] * cj[0] + lj[1] * cj[1];
                let row = &mut rows[j];
                row.retain(|(k, _)| !in_set[*k]);
                for (slot, (k, _)) in row.iter().enumerate() {
                    pos[*k] = slot;
                }
                for (kdx, &(k, ck)) in cols.iter().enumerate() {
                    if kdx == idx {
                        continue;
                    }
                    let delta = lj[0] * ck[0] + lj[1] * ck[1];
                    if pos[k] == usize::MAX {
                        pos[k] = row.len();
                        row.push((k, -delta));
                        fill += 1;
                    } else {
                        row[pos[k]].1 -= delta;
                    }
                }
                for (k, _) in row.iter() {
                    pos[*k] = usize::MAX;
                }
                queue.insert((row.len(), j));
            }
            for &v in &pset[..nset] {
                rows[v] = Vec::new();
            }
            steps.push(Step {
                pivot,
                below: cols.iter().zip(mults).map(|((j, _), l)| (*j, l)).collect(),
            });
        }
        debug_assert!(active.iter().all(|a| !a));
        Ok(Ldlt { n, steps, inertia, two_by_two, fill })
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn two_by_two_pivots(&self) -> usize {
        self.two_by_two
    }

    /// Off-diagonal entries created by elimination (one per direction).
    pub fn fill(&self) -> usize {
        self.fill
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = b.to_vec();
        for step in &self.steps {
            let (bp, bq) = match step.pivot {
                Pivot::One { p, .. } => (x[p], 0.0),
                Pivot::Two { p, q, .. } => (x[p], x[q]),
            };
            for (j, l) in &step.below {
                x[*j] -= l[0] * bp + l[1] * bq;
            }
        }
        for step in &self.steps {
            match step.pivot {
                Pivot::One { p, d } => x[p] /= d,
                Pivot::Two { p, q, a, b, c } => {
                    let det = a * c - b * b;
                    let (u, v) = (x[p], x[q]);
                    x[p] = (c * u - b * v) / det;
                    x[q] = (a * v - b * u) / det;
                }
            }
        }
        for step in self.steps.iter().rev() {
            let (mut sp, mut sq) = (0.0, 0.0);
            for (j, l) in &step.below {
                sp += l[0] * x[*j];
                sq += l[1] * x[*j];
            }
            match step.pivot {
                Pivot::One { p, .. } => x[p] -= sp,
                Pivot::Two { p, q, .. } => {
                    x[p] -= sp;
                    x[q] -= sq;
                }
            }
        }
        x
    }
}

fn max_off(row: &[(usize, f64)]) -> (f64, usize) {
    row.iter()
        .fold((0.0, usize::MAX), |(m, arg), &(j, v)| if v.abs() > m { (v.abs(), j) } else { (m, arg) })
}

fn choose_pivot(p: usize, rows: &[Vec<(usize, f64)>], dg: &[f64]) -> Pivot {
    let app = dg[p];
    let (omega1, q) = max_off(&rows[p]);
    if omega1 == 0.0 || app.abs() >= ALPHA * omega1 {
        return Pivot::One { p, d: app };
    }
    let (omega_q, _) = max_off(&rows[q]);
    if app.abs() * omega_q >= ALPHA * omega1 * omega1 {
        return Pivot::One { p, d: app };
    }
    if dg[q].abs() >= ALPHA * omega_q {
        return Pivot::One { p: q, d: dg[q] };
    }
    let apq = rows[p].iter().find(|(j, _)| *j == q).map(|(_, v)| *v).unwrap_or(0.0);
    Pivot::Two { p, q, a: app, b: apq, c: dg[q] }
}
