use std::f64::consts::PI;

use standwave_core::design::{
    build_distributed, optimal_thickness_with, solve_filling_factor, target_coefficients, uniformity,
    SublayerGeometry, ThicknessObjective, ThicknessSearch,
};
use standwave_core::optics::{best_coherent_response, traveling_response, Layer, Material, MeanderSpec, Stack};

const LAMBDA: f64 = 1550.0;
const SPACER_N: f64 = 1.5;

/// Three 5 nm sublayers cannot reach the single-film optimum even at f = 1.
fn sublayer_nm(detectors: usize) -> f64 {
    if detectors < 4 {
        10.0
    } else {
        5.0
    }
}

/// Sublayer with slits filled by the spacer dielectric.
fn designed_sublayer(detectors: usize) -> MeanderSpec {
    let d = sublayer_nm(detectors);
    let template =
        MeanderSpec::new(Material::nbtin(), Material::dielectric("spacer", SPACER_N).unwrap(), 0.5, d).unwrap();
    let f = solve_filling_factor(
        &template,
        d,
        detectors,
        LAMBDA,
        ThicknessObjective::CounterPropagating,
    )
    .unwrap();
    template.with_filling_factor(f)
}

#[test]
fn construction_meets_targets() {
    for m in [3usize, 5, 10, 15] {
        let sublayer = designed_sublayer(m);
        let targets = target_coefficients(SublayerGeometry::CounterPropagating { sublayers: m as u32 }).unwrap();

        let single = traveling_response(&Stack::free_standing(vec![Layer::Detector(sublayer.clone())]).unwrap(), LAMBDA)
            .unwrap();
        assert!(
            (single.absorptance - targets.absorption).abs() < 0.015,
            "M = {m}: sublayer A = {} vs {}",
            single.absorptance,
            targets.absorption
        );
        assert!((single.t.norm() - targets.t.abs()).abs() < 0.02, "M = {m}: |t| = {}", single.t.norm());
        assert!((single.r.norm() - targets.r.abs()).abs() < 0.02, "M = {m}: |r| = {}", single.r.norm());

        let whole = traveling_response(&build_distributed(&sublayer, m, SPACER_N, LAMBDA).unwrap(), LAMBDA).unwrap();
        assert!((whole.t.norm() - 0.5).abs() < 0.02, "M = {m}: stack |t| = {}", whole.t.norm());
        assert!((whole.r.norm() - 0.5).abs() < 0.02, "M = {m}: stack |r| = {}", whole.r.norm());
    }
}

#[test]
fn even_odd_phase_rule() {
    for m in [5usize, 6, 10, 15] {
        let stack = build_distributed(&designed_sublayer(m), m, SPACER_N, LAMBDA).unwrap();
        let resp = traveling_response(&stack, LAMBDA).unwrap();
        let diff = (resp.t.arg() - resp.r.arg()).rem_euclid(2.0 * PI);
        let expected = if m % 2 == 0 { 0.0 } else { PI };
        let off = ((diff - expected + PI).rem_euclid(2.0 * PI) - PI).abs();
        assert!(off < 0.4, "N = {m}: arg t - arg r = {diff}");
    }
}

#[test]
fn designed_stacks_absorb_coherently() {
    for (m, floor) in [(5usize, 0.99), (10, 0.98), (15, 0.97)] {
        let stack = build_distributed(&designed_sublayer(m), m, SPACER_N, LAMBDA).unwrap();
        let resp = best_coherent_response(&stack, LAMBDA).unwrap();
        assert!(resp.absorption > floor, "N = {m}: A_coh = {}", resp.absorption);
        let detectors: Vec<f64> = stack.detector_indices().into_iter().map(|i| resp.per_layer[i]).collect();
        assert!(uniformity(&detectors).unwrap().delta_norm < 0.01);
    }
}

#[test]
fn optimal_thickness_decreases_with_filling() {
    let search = ThicknessSearch {
        max_nm: 200.0,
        ..ThicknessSearch::default()
    };
    let mut previous = f64::INFINITY;
    for step in 0..=18 {
        let f = 0.1 + 0.05 * step as f64;
        let opt = optimal_thickness_with(
            &MeanderSpec::nbtin(f, 0.0).unwrap(),
            LAMBDA,
            ThicknessObjective::CounterPropagating,
            search,
        )
        .unwrap();
        assert!(opt.thickness_nm < previous, "f = {f}: {} !< {previous}", opt.thickness_nm);
        previous = opt.thickness_nm;
    }
}
