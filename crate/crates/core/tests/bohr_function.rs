use bohr_core::approx::{distance_field, refine, MetricKind};
use bohr_core::bohr::{bohr_error_bound, bohr_g, bohr_g_layercake, g_direct};
use bohr_core::cell::{CellPair, WeylFunction};
use bohr_core::geometry::{build_blowup, build_interval_lattice, build_sg2_template, TemplateKind};
use bohr_core::potential::{distribution, evaluate, Distribution, PotentialSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn layer_cake_matches_direct_sum(beta in 0.5f64..3.0, c in 0.2f64..5.0, lambda in 5.0f64..2000.0) {
        let cx = build_interval_lattice(60).unwrap();
        let g = refine(&cx, 3).unwrap();
        let d = distance_field(&cx, &g, MetricKind::EuclideanCoordinate).unwrap();
        let spec = PotentialSpec::PowerDistance { c, beta, metric: MetricKind::EuclideanCoordinate };
        let f = evaluate(&spec, &cx, &g, Some(&d)).unwrap();
        let w = WeylFunction::interval();
        let direct = g_direct(&g, &f, &w, lambda);
        let cake = bohr_g_layercake(&distribution(&g, &f, Distribution::Exact), &w, lambda, 1e-8).unwrap();
        prop_assert!((cake / direct - 1.0).abs() < 1e-6, "{} vs {}", cake, direct);
    }
}

#[test]
fn bound_contains_bracket_ratios_on_a_blowup() {
    let sg = build_sg2_template();
    let cx = build_blowup(&sg, &[1, 2, 3, 1, 2, 3, 1, 2], 5).unwrap();
    let g = refine(&cx, 0).unwrap();
    let d = distance_field(&cx, &g, MetricKind::CellGraphScaled).unwrap();
    let f = evaluate(&PotentialSpec::PowerDistance { c: 1.0, beta: 2.0, metric: MetricKind::CellGraphScaled }, &cx, &g, Some(&d)).unwrap();
    let cells = CellPair::new(TemplateKind::SierpinskiGasket, None, 1e5).unwrap();
    let (w, _) = WeylFunction::sg(3.0 * 5f64.powi(9), 3, 2, 1024).unwrap();
    let grid = bohr_core::fit::geometric_grid(50.0, 5e4, 25);
    for row in bohr_g(&g, &f, &cells, &w, &grid).unwrap() {
        let b = bohr_error_bound(&row).unwrap();
        for n in [row.lower, row.upper] {
            assert!((n as f64 / row.g - 1.0).abs() <= b + 1e-12, "λ = {}", row.lambda);
        }
        assert!(row.identity_defect() < 1e-12);
    }
}
