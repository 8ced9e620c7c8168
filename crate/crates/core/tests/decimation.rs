use bohr_core::approx::refine;
use bohr_core::cell::{CellModel, WeylFunction};
use bohr_core::decimation::{enumerate_sg_spectrum, gate, graph_spectrum, phi_limit, GATE_LEVEL};
use bohr_core::geometry::{build_blowup, build_sg2_template};
use bohr_core::operator::{assemble, dense_spectrum, Boundary, Interface};

fn dims(bc: Boundary, m: u32) -> usize {
    let p = 3usize.pow(m + 1);
    match bc {
        Boundary::Dirichlet => (p - 3) / 2,
        Boundary::Neumann => (p + 3) / 2,
    }
}

#[test]
fn graph_spectra_have_full_dimension() {
    for bc in [Boundary::Dirichlet, Boundary::Neumann] {
        for m in 1..=7 {
            let total: usize = graph_spectrum(bc, m).unwrap().iter().map(|(_, k)| k).sum();
            assert_eq!(total, dims(bc, m), "{bc:?} level {m}");
        }
    }
}

#[test]
fn gate_covers_both_conditions() {
    let report = gate(GATE_LEVEL).unwrap();
    assert_eq!(report.checks.len(), 2 * GATE_LEVEL as usize);
    for (bc, m, dim, dev) in report.checks {
        assert_eq!(dim, dims(bc, m));
        assert!(dev <= 1e-9);
    }
}

#[test]
fn level_five_dense_spectrum_matches_enumeration() {
    // one level beyond the gate, Dirichlet only (dimension 363)
    let cell = build_blowup(&build_sg2_template(), &[1], 0).unwrap();
    let g = refine(&cell, 5).unwrap();
    let op = assemble(&g, Interface::Glued, Boundary::Dirichlet, None).unwrap();
    let scale = 1.5 * 5f64.powi(5);
    let dense: Vec<f64> = dense_spectrum(&op).unwrap().eigenvalues().iter().map(|x| x / scale).collect();
    let mut listed = Vec::new();
    for (v, k) in graph_spectrum(Boundary::Dirichlet, 5).unwrap() {
        listed.extend(std::iter::repeat_n(v, k));
    }
    assert_eq!(listed.len(), dense.len());
    for (a, b) in listed.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn renormalized_graph_eigenvalues_converge() {
    // the lowest Dirichlet eigenvalue along increasing levels
    let continuum = enumerate_sg_spectrum(Boundary::Dirichlet, 1e4).unwrap().entries[0].value;
    let mut previous = f64::INFINITY;
    for m in 2..=8 {
        let model = CellModel::sg_graph(Boundary::Dirichlet, m).unwrap();
        let first = model.atoms()[0].0;
        let gap = (first - continuum).abs();
        assert!(gap < previous, "level {m}");
        previous = gap;
    }
    assert!(previous / continuum < 1e-3);
    // the lowest Dirichlet value is born as 2 at level 1
    assert!((1.5 * 5.0 * phi_limit(2.0) / continuum - 1.0).abs() < 1e-12);
}

#[test]
fn weyl_function_grows_by_three_per_factor_five() {
    let (w, report) = WeylFunction::sg(3.0 * 5f64.powi(9), 3, 2, 512).unwrap();
    assert!(w.is_monotone());
    assert_eq!(report.clamped, 0);
    for lambda in [7.0, 123.0, 4567.0] {
        let ratio = w.eval(5.0 * lambda) / w.eval(lambda);
        assert!((ratio - 3.0).abs() < 1e-9, "{ratio}");
    }
    let n = enumerate_sg_spectrum(Boundary::Dirichlet, 3e6).unwrap();
    let lambda = 2.0e6;
    let rel = w.eval(lambda) / n.count(lambda).unwrap() as f64 - 1.0;
    assert!(rel.abs() < 0.05, "{rel}");
}
