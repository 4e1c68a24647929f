//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion; exits non-zero
//! when any criterion fails.

use std::cell::Cell;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use standwave_core::design::deposition_sweep;
use standwave_core::optics::{
    per_layer_absorption, traveling_response, Illumination, Layer, Material, MaterialKind, MeanderSpec, Stack,
    Termination,
};
use standwave_core::photon::{click_prob_given_fock, click_prob_series_fock, oracle_click_prob, resolution_probability};

const BIN: &str = env!("CARGO_BIN_EXE_standwave");
const LAMBDA: f64 = 1550.0;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs")
}

fn spec(name: &str) -> String {
    specs().join(name).to_str().unwrap().to_string()
}

/// Run the binary; returns stdout and wall time.
fn cli(args: &[&str], env: &[(&str, &str)]) -> (String, Duration) {
    let start = Instant::now();
    let out = Command::new(BIN).args(args).envs(env.iter().copied()).output().expect("binary runs");
    let elapsed = start.elapsed();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (String::from_utf8(out.stdout).unwrap(), elapsed)
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .parse()
        .unwrap()
}

fn ac01() -> Verdict {
    let (out, t) = cli(&["design", "--geometry", "salisbury", "--fill", "0.5"], &[]);
    let d = value(&out, "D_opt_nm");
    let a = value(&out, "absorption");
    let pass = (d - 15.0).abs() <= 1.0 && a >= 0.999 && t.as_secs_f64() < 1.0;
    verdict(pass, format!("D_opt = {d:.3} nm (15 ± 1), A = {a:.5} (>= 0.999), {:.2} s (< 1 s)", t.as_secs_f64()))
}

fn ac02() -> Verdict {
    let (out, t) = cli(&["design", "--geometry", "cp", "--fill", "0.5"], &[]);
    let d = value(&out, "D_opt_nm");
    let a_coh = value(&out, "absorption");
    let a_tr = value(&out, "traveling_absorption");
    // thin-film admittance limit: absorption peaks where k0·Im(ε_eff)·D = 2
    let eps = Complex64::new(4.21, 3.87).powi(2) * 0.5 + 0.5;
    let oracle = LAMBDA / (PI * eps.im);
    let pass = (d - 30.0).abs() <= 1.0
        && a_coh >= 0.999
        && (a_tr - 0.5).abs() <= 0.005
        && (d - oracle).abs() <= 1.5
        && t.as_secs_f64() < 1.0;
    verdict(
        pass,
        format!(
            "D_opt = {d:.3} nm (30 ± 1; oracle {oracle:.2}), A_coh = {a_coh:.5} (>= 0.999), A_tr = {a_tr:.4} (0.50 ± 0.005), {:.2} s",
            t.as_secs_f64()
        ),
    )
}

fn ac03() -> Verdict {
    let mut worst = (0.0, 0.0, 0.0, 0.0);
    for slit_n in [1.0, 1.5] {
        let slit = Material::dielectric("slit", slit_n).unwrap();
        for step in 1..=20 {
            let f = 0.05 * step as f64;
            let film = MeanderSpec::new(Material::nbtin(), slit.clone(), f, 50.0).unwrap();
            let stack = Stack::free_standing(vec![Layer::Detector(film)]).unwrap();
            let traj = deposition_sweep(&stack, LAMBDA, 0.1).unwrap();
            for s in &traj.samples {
                if s.absorptance > worst.0 {
                    worst = (s.absorptance, f, slit_n, s.thickness_nm);
                }
            }
        }
    }
    let (a, f, slit_n, d) = worst;
    verdict(
        a <= 0.5 + 1e-6,
        format!("max A_tr = {a:.6} (<= 0.5 + 1e-6) at f = {f:.2}, slit n = {slit_n}, D = {d:.1} nm"),
    )
}

const LAYER_TARGETS: [(usize, &str, f64, f64, f64); 3] = [
    (5, "five_layer_distributed.json", 0.61, 0.28, 0.0008),
    (10, "ten_layer_distributed.json", 0.30, 0.17, 0.0022),
    (15, "fifteen_layer_distributed.json", 0.20, 0.12, 0.0040),
];

fn ac04() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    let start = Instant::now();
    for (m, _, f_expected, a_expected, _) in LAYER_TARGETS {
        let (out, _) = cli(&["design", "--sublayer-nm", "5", "--layers", &m.to_string()], &[]);
        let f = value(&out, "filling_factor");
        let a = value(&out, "sublayer_absorption");
        let mf = m as f64;
        let target = 2.0 * mf / ((mf + 1.0) * (mf + 1.0));
        pass &= (f - f_expected).abs() <= 0.01 && (a - a_expected).abs() <= 0.01 && (a - target).abs() <= 0.015;
        notes.push(format!("N={m}: f = {f:.4}, A_sub = {a:.4} (target {target:.4})"));
    }
    let t = start.elapsed().as_secs_f64();
    pass &= t < 5.0;
    verdict(pass, format!("{}; {t:.2} s", notes.join("; ")))
}

fn ac05() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (m, file, _, _, dn_expected) in LAYER_TARGETS {
        let (out, _) = cli(&["uniformity", "--stack", &spec(file)], &[]);
        let dn = value(&out, "delta_norm");
        pass &= (dn - dn_expected).abs() <= 0.002;
        let mut note = format!("N={m}: delta_norm = {dn:.5} ({dn_expected} ± 0.002)");
        if m == 15 {
            let a = value(&out, "A_total");
            pass &= (a - 0.98).abs() <= 0.01;
            note.push_str(&format!(", A_coh = {a:.4} (0.98 ± 0.01)"));
        }
        notes.push(note);
    }
    verdict(pass, notes.join("; "))
}

#[derive(Debug, Clone)]
enum LayerDesc {
    Detector { f: f64, d: f64, slit: f64 },
    Spacer { n: f64, k: f64, d: f64 },
}

fn layer_strategy() -> impl Strategy<Value = LayerDesc> {
    prop_oneof![
        (0.05..1.0f64, 0.0..60.0f64, prop::sample::select(vec![1.0, 2.25]))
            .prop_map(|(f, d, slit)| LayerDesc::Detector { f, d, slit }),
        (1.0..3.5f64, prop::sample::select(vec![0.0, 0.0, 0.02, 0.3]), 0.0..900.0f64)
            .prop_map(|(n, k, d)| LayerDesc::Spacer { n, k, d }),
    ]
}

fn build_layer(desc: &LayerDesc) -> Layer {
    match *desc {
        LayerDesc::Detector { f, d, slit } => {
            let slit = Material::constant("slit", MaterialKind::Dielectric, Complex64::new(slit, 0.0)).unwrap();
            Layer::Detector(MeanderSpec::new(Material::nbtin(), slit, f, d).unwrap())
        }
        LayerDesc::Spacer { n, k, d } => {
            let eps = Complex64::new(n, k).powi(2);
            Layer::spacer(Material::constant("spacer", MaterialKind::Dielectric, eps).unwrap(), d)
        }
    }
}

fn random_stack() -> impl Strategy<Value = Stack> {
    (
        prop::collection::vec(layer_strategy(), 0..10),
        1.0..2.5f64,
        prop::option::weighted(0.7, 1.0..2.5f64),
        0.5..0.9999f64,
    )
        .prop_map(|(descs, n_in, n_out, refl)| {
            let layers: Vec<Layer> = descs.iter().map(build_layer).collect();
            let termination = match n_out {
                Some(n) => Termination::Open(Material::dielectric("out", n).unwrap()),
                None => Termination::mirror(refl, 1.5).unwrap(),
            };
            Stack::new(Material::dielectric("in", n_in).unwrap(), layers, termination).unwrap()
        })
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn ac06() -> Verdict {
    let worst_ra = Cell::new(0.0f64);
    let worst_phase = Cell::new(0.0f64);
    let strategy = (random_stack().prop_filter("two-port", Stack::is_two_port), 1.0..3.0f64);
    let result = runner(100).run(&strategy, |(stack, n_sp)| {
        let spacer = Material::dielectric("absentee", n_sp).unwrap();
        let extended = stack.appended(Layer::spacer(spacer, LAMBDA / (2.0 * n_sp))).unwrap();
        let before = traveling_response(&stack, LAMBDA).unwrap();
        let after = traveling_response(&extended, LAMBDA).unwrap();
        let d_ra = (before.reflectance - after.reflectance)
            .abs()
            .max((before.absorptance - after.absorptance).abs());
        let shift = (after.t.arg() - before.t.arg()).rem_euclid(2.0 * PI);
        let d_phase = (shift - PI).abs();
        worst_ra.set(worst_ra.get().max(d_ra));
        worst_phase.set(worst_phase.get().max(d_phase));
        prop_assert!(d_ra < 1e-9 && d_phase < 1e-6);
        Ok(())
    });
    verdict(
        result.is_ok(),
        format!(
            "100 stacks: max |ΔR|,|ΔA| = {:.1e} (< 1e-9), max |Δarg t − π| = {:.1e} (< 1e-6)",
            worst_ra.get(),
            worst_phase.get()
        ),
    )
}

fn ac07() -> Verdict {
    let worst = Cell::new(0.0f64);
    let solutions = Cell::new(0usize);
    let result = runner(1000).run(&(random_stack(), 0.0..(2.0 * PI)), |(stack, theta)| {
        let modes: &[Illumination] = if stack.is_two_port() {
            &[
                Illumination::TravelingLeft,
                Illumination::TravelingRight,
                Illumination::Coherent { theta },
            ]
        } else {
            &[Illumination::TravelingLeft]
        };
        for &mode in modes {
            let budget = per_layer_absorption(&stack, LAMBDA, mode).unwrap();
            let err = (1.0 - budget.balance()).abs();
            worst.set(worst.get().max(err));
            solutions.set(solutions.get() + 1);
            prop_assert!(err < 1e-9);
        }
        Ok(())
    });
    verdict(
        result.is_ok(),
        format!(
            "1000 stacks, {} field solutions: max |1 − balance| = {:.1e} (< 1e-9)",
            solutions.get(),
            worst.get()
        ),
    )
}

fn ac08() -> Verdict {
    let mut worst_oracle: f64 = 0.0;
    for detectors in 1..=6 {
        for m in 0..=5 {
            for eta in [0.3, 0.7, 1.0] {
                for k in 0..=detectors {
                    let closed = click_prob_given_fock(k, m, detectors, eta).unwrap();
                    let brute = oracle_click_prob(k, m, detectors, eta).unwrap();
                    worst_oracle = worst_oracle.max((closed - brute).abs());
                }
            }
        }
    }
    let mut worst_series: f64 = 0.0;
    for detectors in 1..=20 {
        for n in 0..=12 {
            for k in 0..=detectors {
                let series = click_prob_series_fock(k, n, detectors).unwrap();
                let closed = click_prob_given_fock(k, n, detectors, 1.0).unwrap();
                worst_series = worst_series.max((series - closed).abs());
            }
        }
    }
    verdict(
        worst_oracle < 1e-12 && worst_series < 1e-10,
        format!("closed form vs enumeration {worst_oracle:.1e} (< 1e-12); series vs closed form {worst_series:.1e} (< 1e-10)"),
    )
}

fn ac09() -> Verdict {
    let p = |m: usize, eta: f64| resolution_probability(m, 10, eta).unwrap();
    let checks = [
        ("P(2|2;1)", p(2, 1.0), 0.900, 1e-12),
        ("P(3|3;1)", p(3, 1.0), 0.720, 1e-12),
        ("P(2|2;0.17)", p(2, 0.17), 0.0260, 5e-4),
        ("P(3|3;0.17)", p(3, 0.17), 0.0034, 5e-4),
        ("P(2|2;0.95)", p(2, 0.95), 0.81, 0.04),
        ("P(3|3;0.95)", p(3, 0.95), 0.64, 0.04),
        ("P(2|2;0.90)", p(2, 0.90), 0.69, 0.04),
        ("P(3|3;0.90)", p(3, 0.90), 0.54, 0.04),
    ];
    let pass = checks.iter().all(|(_, v, e, tol)| (v - e).abs() <= *tol);
    let detail = checks
        .iter()
        .map(|(name, v, e, _)| format!("{name} = {v:.4} ({e})"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(pass, format!("N = 10: {detail}"))
}

fn ac10() -> Verdict {
    let (out, t) = cli(&["pnr", "--source", "sq:1.0", "--n", "10", "--eta", "1.0"], &[]);
    let probs: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    let expected = [(1, 0.019), (2, 0.174), (3, 0.038), (4, 0.056)];
    let pass = expected.iter().all(|&(k, e)| (probs[k] - e).abs() <= 0.002) && t.as_secs_f64() < 1.0;
    verdict(
        pass,
        format!(
            "P(1..4) = {:.4}/{:.4}/{:.4}/{:.4} (0.019/0.174/0.038/0.056 ± 0.002), {:.2} s",
            probs[1],
            probs[2],
            probs[3],
            probs[4],
            t.as_secs_f64()
        ),
    )
}

fn ac11() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let stack = spec("five_layer_distributed.json");
    let mut reports = Vec::new();
    let mut slowest: f64 = 0.0;
    for (run, threads) in [("a", None), ("b", None), ("c", Some("1")), ("d", Some("3"))] {
        let out_dir = dir.path().join(run);
        let args = [
            "montecarlo",
            "--stack",
            &stack,
            "--samples",
            "1000",
            "--bound",
            "0.05",
            "--seed",
            "42",
            "--out",
            out_dir.to_str().unwrap(),
        ];
        let env: Vec<(&str, &str)> = threads.map(|n| ("RAYON_NUM_THREADS", n)).into_iter().collect();
        let (_, t) = cli(&args, &env);
        slowest = slowest.max(t.as_secs_f64());
        let json = std::fs::read(out_dir.join("montecarlo.json")).unwrap();
        let csv = std::fs::read(out_dir.join("montecarlo.csv")).unwrap();
        reports.push((json, csv));
    }
    let identical = reports.windows(2).all(|w| w[0] == w[1]);
    let summary: serde_json::Value = serde_json::from_slice(&reports[0].0).unwrap();
    let s = &summary["summary"];
    let frac = s["fraction_high_absorption"].as_f64().unwrap();
    let min_a = s["min_absorption"].as_f64().unwrap();
    let uniform = s["fraction_low_nonuniformity"].as_f64().unwrap();
    let failures = s["failures"].as_u64().unwrap();
    let pass = (0.65..=0.85).contains(&frac)
        && min_a >= 0.95
        && uniform >= 0.95
        && failures == 0
        && identical
        && slowest < 60.0;
    verdict(
        pass,
        format!(
            "seed 42: A_coh >= 0.99 for {frac:.3} ([0.65, 0.85]), min A_coh = {min_a:.4} (>= 0.95), \
             delta_norm < 0.03 for {uniform:.3} (>= 0.95), bit-identical across 4 runs/thread counts: {identical}, {slowest:.1} s"
        ),
    )
}

fn ac12() -> Verdict {
    let stack = spec("free_film_dispersive.json");
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for mode in ["traveling", "coherent"] {
        let (out, _) = cli(
            &["spectrum", "--stack", &stack, "--from", "400", "--to", "2500", "--points", "500", "--mode", mode],
            &[],
        );
        let mut lines = out.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let col = header.iter().position(|h| *h == "energy_residual").unwrap();
        for line in lines {
            let r: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
            worst = worst.max(r.abs());
            rows += 1;
        }
    }
    verdict(
        rows == 1000 && worst < 1e-9,
        format!("tabulated film, 400–2500 nm, {rows} rows (traveling + coherent): max |energy residual| = {worst:.1e} (< 1e-9)"),
    )
}

fn main() {
    let criteria: [(&str, &str, fn() -> Verdict); 12] = [
        ("AC-01", "Salisbury optimum", ac01),
        ("AC-02", "free-film coherent optimum", ac02),
        ("AC-03", "traveling-wave 50% bound", ac03),
        ("AC-04", "filling-factor solutions", ac04),
        ("AC-05", "absorption uniformity", ac05),
        ("AC-06", "absentee spacer invariance", ac06),
        ("AC-07", "energy conservation", ac07),
        ("AC-08", "click statistics vs enumeration", ac08),
        ("AC-09", "Fock resolution anchors", ac09),
        ("AC-10", "squeezed vacuum click anchors", ac10),
        ("AC-11", "Monte Carlo tolerance ensemble", ac11),
        ("AC-12", "tabulated dispersion spectrum", ac12),
    ];
    let mut failed = 0;
    for (id, title, check) in criteria {
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!("[{}] {id} {title}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
