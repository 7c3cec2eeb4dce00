//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use bicon::continuity::{
    averaging_lemma_check, doubling_probe, linear_dilatation, modulus_estimate, quasi_inverse_check, verify_global_modulus_f,
    verify_global_modulus_h, verify_main_theorem, Derivative, Verdict,
};
use bicon::deformations::{ConeMap, GluedMap, InverseOf, RadialMap, Stress};
use bicon::energy::verify_energy_identity;
use bicon::geometry::{quasi_interior_points, ConePoint, NormKind};
use bicon::Modulus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn admissible() -> Vec<Modulus> {
    let mut out = Vec::new();
    for n in [2, 3] {
        out.push(Modulus::identity(n).unwrap());
        out.push(Modulus::power(0.5, n).unwrap());
        for k in 1..=3 {
            out.push(Modulus::iter_log(k, 1.0, n).unwrap());
        }
    }
    out
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect()
}

fn energy_closed_forms() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let mut cases: Vec<(Modulus, f64)> = Vec::new();
        for eps in [0.25, 0.5, 1.0] {
            cases.push((Modulus::power(eps, n).unwrap(), 1.0 / (n as f64 * eps)));
        }
        for alpha in [0.75, 1.0] {
            cases.push((Modulus::iter_log(1, alpha, n).unwrap(), 1.0 / (n as f64 * alpha - 1.0)));
        }
        for (phi, exact) in cases {
            let value = phi.energy_functional(n, 1e-11).map_err(|e| format!("{}: {e}", phi.spec()))?.value;
            let rel = (value - exact).abs() / exact;
            ensure(rel <= 1e-8, format!("{}: {value} vs {exact}", phi.spec()))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("10 cases, max relative error {worst:.2e}"))
}

fn condition_suite() -> Outcome {
    for phi in admissible() {
        let report = phi.check_conditions(2048).map_err(|e| e.to_string())?;
        let failed: Vec<_> = report.failures().map(|c| c.condition.clone()).collect();
        ensure(failed.is_empty(), format!("{} fails {failed:?}", phi.spec()))?;
    }
    let bad = Modulus::iter_log(1, 0.4, 2).unwrap().check_conditions(2048).map_err(|e| e.to_string())?;
    ensure(bad.check("C3").is_some_and(|c| !c.pass), "iterlog alpha=0.4 passes C3")?;
    Ok("10 admissible families pass C1-C4; iterlog:k=1,alpha=0.4,n=2 fails C3".into())
}

fn inversion_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for phi in admissible() {
        let n = phi.dimension();
        let map = ConeMap::new(phi).with_tolerance(1e-12);
        for p in quasi_interior_points(n, 10_000, 7, 0.0) {
            let back = map.inverse(&map.eval(&p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max(back.distance(&p, NormKind::Cone));
        }
    }
    ensure(worst <= 1e-9, format!("max error {worst:e}"))?;
    Ok(format!("10 families x 1e4 points, max cone-norm error {worst:.2e}"))
}

fn jacobian_correctness() -> Outcome {
    let h = 1e-6;
    let mut worst_entry = 0.0f64;
    let mut worst_det = f64::NEG_INFINITY;
    for phi in admissible() {
        let n = phi.dimension();
        let inv_m = 1.0 / phi.m_constant;
        let map = ConeMap::new(phi);
        for p in quasi_interior_points(n, 1000, 11, 1e-3) {
            let jac = map.jacobian(&p).map_err(|e| e.to_string())?;
            let coords: Vec<f64> = p.coords().collect();
            for j in 0..n {
                let shifted = |delta: f64| {
                    let mut c = coords.clone();
                    c[j] += delta;
                    map.eval(&ConePoint::from_coords(&c).unwrap()).unwrap().coords().collect::<Vec<f64>>()
                };
                let (plus, minus) = (shifted(h), shifted(-h));
                for i in 0..n {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    let exact = jac.matrix[(i, j)];
                    worst_entry = worst_entry.max((fd - exact).abs() / exact.abs().max(1.0));
                }
            }
            let lambda = map.phi().lambda(p.cone_norm()).map_err(|e| e.to_string())?;
            ensure(jac.det >= inv_m - 1e-12 && jac.det <= lambda + 1e-12, format!("det {} outside [{inv_m}, {lambda}] at {p:?}", jac.det))?;
            worst_det = worst_det.max((inv_m - jac.det).max(jac.det - lambda));
        }
    }
    ensure(worst_entry <= 1e-5, format!("max relative entry error {worst_entry:e}"))?;
    Ok(format!("10 families x 1e3 points, max entry error {worst_entry:.2e}, determinant bounds hold"))
}

fn energy_identity() -> Outcome {
    let map = ConeMap::new(Modulus::iter_log(1, 1.0, 2).unwrap());
    let report = verify_energy_identity(&map, 1_000_000, 1e-4, 42, 0.02).map_err(|e| e.to_string())?;
    let check = report.check("energy-identity-relative").ok_or("missing check")?;
    ensure(check.pass, check.detail.clone())?;
    let sigmas = report.check("energy-identity-stderr").and_then(|c| c.measured_constant).unwrap_or(f64::NAN);
    Ok(format!("{}; relative gap {:.2e} ({sigmas:.2} combined errors)", check.detail, check.measured_constant.unwrap_or(f64::NAN)))
}

fn main_theorem() -> Outcome {
    let mut details = Vec::new();
    for n in [2, 3] {
        let g = GluedMap::new(Modulus::iter_log(2, 1.0, n).unwrap());
        let report = verify_main_theorem(&g, &log_grid(1e-6, 1.0, 16), 2048, 3).map_err(|e| e.to_string())?;
        let failed: Vec<_> = report.failures().map(|c| format!("{} ({})", c.condition, c.detail)).collect();
        ensure(failed.is_empty(), format!("n={n}: {failed:?}"))?;
        let axis = report.check("axis-attains-phi").and_then(|c| c.measured_constant).unwrap_or(f64::NAN);
        let excess = report.check("off-axis-below-axis").and_then(|c| c.measured_constant).unwrap_or(f64::NAN);
        ensure(axis <= 1e-12 && excess <= 1e-9, format!("n={n}: axis {axis:e}, excess {excess:e}"))?;
        details.push(format!("n={n} axis error {axis:.1e}"));
    }
    Ok(details.join(", "))
}

fn global_moduli() -> Outcome {
    let mut details = Vec::new();
    for phi in [Modulus::iter_log(1, 1.0, 2).unwrap(), Modulus::iter_log(2, 1.0, 2).unwrap()] {
        let spec = phi.spec();
        let map = ConeMap::new(phi);
        let h = verify_global_modulus_h(&map, 100_000, 5).map_err(|e| e.to_string())?;
        let f = verify_global_modulus_f(&map, 100_000, 5).map_err(|e| e.to_string())?;
        let h_ratio = h.check("H-global-4phi").and_then(|c| c.measured_constant).unwrap_or(f64::NAN);
        let f_ratio = f.check("F-near-origin-3M").and_then(|c| c.measured_constant).unwrap_or(f64::NAN);
        ensure(h.passed() && f.passed(), format!("{spec}: H {h_ratio}, F {f_ratio}"))?;
        details.push(format!("{spec}: H ratio {h_ratio:.3} <= 4, F ratio {f_ratio:.3} <= 3M = {:.3}", 3.0 * map.phi().m_constant));
    }
    Ok(details.join("; "))
}

fn quasiconformal_gain_loss() -> Outcome {
    let h = RadialMap::new(Stress::Power { eps: 0.5 }, 2).unwrap();
    let o = ConePoint::origin(2);
    let radii = log_grid(1e-6, 1.0, 24);
    let table = quasi_inverse_check(&h, &InverseOf(&h), &o, &radii, NormKind::Euclid, 256, 1).map_err(|e| e.to_string())?;
    let worst = table.h_after_f.iter().chain(&table.f_after_h).map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-12, format!("composed ratio off by {worst:e}"))?;
    let dil = linear_dilatation(&h, &o, &radii, 256, 1).map_err(|e| e.to_string())?;
    let dil_worst = dil.ratios.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    ensure(dil_worst <= 1e-9, format!("dilatation off by {dil_worst:e}"))?;
    Ok(format!("composed ratios within {worst:.1e} of 1, dilatation within {dil_worst:.1e}"))
}

fn non_quasiconformality() -> Outcome {
    let phi = Modulus::iter_log(2, 1.0, 2).unwrap();
    let ratios: Vec<f64> = (2..=12).map(|k| 10f64.powi(-k)).map(|s| phi.eval(phi.eval(s)) / s).collect();
    ensure(ratios.windows(2).all(|w| w[1] > w[0]), format!("not increasing: {ratios:?}"))?;
    let last = *ratios.last().unwrap();
    ensure(last > 1e3, format!("ratio at 1e-12 is {last}"))?;
    let g = GluedMap::new(phi);
    let dil = linear_dilatation(&g, &ConePoint::origin(2), &log_grid(0.01, 0.5, 8), 512, 1).map_err(|e| e.to_string())?;
    ensure(dil.verdict == Verdict::QcViolated, format!("verdict {:?}, ratios {:?}", dil.verdict, dil.ratios))?;
    Ok(format!("ratio {:.1} at 1e-2 rising to {last:.3e} at 1e-12; dilatation {:.3e} at r=0.01, qc_violated", ratios[0], dil.ratios[0]))
}

fn doubling() -> Outcome {
    let mut worst = 0.0f64;
    for eps in [0.25, 0.5, 0.75, 1.0] {
        let k2 = Modulus::power(eps, 2).unwrap().doubling_constant(2.0, 2048).map_err(|e| e.to_string())?;
        worst = worst.max((k2 - 2f64.powf(eps)).abs());
        let radial = RadialMap::new(Stress::Power { eps }, 2).unwrap();
        let radii: Vec<f64> = (0..16).rev().map(|k| 2f64.powi(-k)).collect();
        let est = modulus_estimate(&radial, &ConePoint::origin(2), &radii, NormKind::Euclid, 128, 1).map_err(|e| e.to_string())?;
        let probe = doubling_probe(&est, 2.0).map_err(|e| e.to_string())?;
        worst = worst.max((probe - 2f64.powf(eps)).abs());
    }
    ensure(worst <= 1e-10, format!("power doubling off by {worst:e}"))?;
    let g = GluedMap::new(Modulus::iter_log(2, 1.0, 2).unwrap());
    let radii: Vec<f64> = (0..30).rev().map(|k| 2f64.powi(-k)).collect();
    let est = modulus_estimate(&g, &ConePoint::origin(2), &radii, NormKind::Cone, 512, 1).map_err(|e| e.to_string())?;
    let probe = doubling_probe(&est, 2.0).map_err(|e| e.to_string())?;
    let bound = g.phi().doubling_constant(2.0, 2048).map_err(|e| e.to_string())?;
    ensure(probe <= bound * (1.0 + 1e-12), format!("glued probe {probe} above {bound}"))?;
    Ok(format!("power: |K2 - 2^eps| <= {worst:.1e}; glued probe {probe:.6} <= C(2) = {bound:.6}"))
}

fn averaging_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    let mut families = 0;
    let mut tightest = 0.0f64;
    for phi in admissible().into_iter().filter(|p| !p.is_identity()) {
        families += 1;
        let r = phi.concavity_radius;
        let density = Derivative(&phi);
        let dim = phi.dimension();
        let vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let len = r * rng.gen_range(1e-3..1.0);
            v.iter().map(|c| c * len / norm).collect()
        };
        for _ in 0..100 {
            let a = vector(&mut rng);
            let b = vector(&mut rng);
            let report = averaging_lemma_check(&density, &a, &b, r, 1e-8).map_err(|e| format!("{}: {e}", phi.spec()))?;
            ensure(report.passed(), format!("{}: {:?}", phi.spec(), report.checks))?;
            tightest = tightest.max(report.check("averaging-inequality").and_then(|c| c.measured_constant).unwrap_or(0.0));
        }
        let a = vector(&mut rng);
        let b: Vec<f64> = a.iter().map(|c| -0.4 * c).collect();
        let report = averaging_lemma_check(&density, &a, &b, r, 1e-8).map_err(|e| format!("{}: {e}", phi.spec()))?;
        let gap = report.check("averaging-equality").and_then(|c| c.measured_constant).ok_or("equality case not detected")?;
        ensure(report.passed(), format!("{}: equality gap {gap:e}", phi.spec()))?;
        worst = worst.max(gap);
    }
    Ok(format!("{families} families x 100 random pairs hold (largest lhs/rhs {tightest:.6}); equality gap at most {worst:.1e}"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bicon");
    let runs: [&[&str]; 6] = [
        &["modulus", "--map", "glued:phi=iterlog:k=2,alpha=1,n=2", "--radii", "log:1e-6..1:12", "--count", "512", "--out", "csv"],
        &["dilatation", "--map", "glued:phi=iterlog:k=1,alpha=1,n=3", "--count", "256", "--seed", "9"],
        &["energy", "--map", "cone:phi=iterlog:k=1,alpha=1,n=2", "--method", "mc", "--of", "f", "--samples", "2e5", "--seed", "42"],
        &["verify", "main-theorem", "--phi", "iterlog:k=2,alpha=1,n=2", "--count", "512"],
        &["verify", "global-modulus", "--phi", "iterlog:k=1,alpha=1,n=2", "--pairs", "20000", "--out", "csv"],
        &["verify", "quasi-inverse", "--map", "radial:power:eps=0.5", "--norm", "euclid", "--radii", "log:1e-3..1:6"],
    ];
    for args in runs {
        let run = |threads: &str| {
            Command::new(bin).args(args).args(["--threads", threads]).output().map_err(|e| e.to_string())
        };
        let first = run("1")?;
        let second = run("1")?;
        ensure(first.status.success(), format!("{args:?} exited with {}", first.status))?;
        ensure(first.stdout == second.stdout, format!("{args:?} is not replayable"))?;
        ensure(!first.stdout.is_empty(), format!("{args:?} printed nothing"))?;
    }
    Ok(format!("{} commands replay byte-identically with --threads 1", runs.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("energy closed forms", energy_closed_forms),
        ("condition suite", condition_suite),
        ("inversion round trip", inversion_round_trip),
        ("jacobian correctness", jacobian_correctness),
        ("energy identity", energy_identity),
        ("main theorem", main_theorem),
        ("global moduli", global_moduli),
        ("quasiconformal gain/loss", quasiconformal_gain_loss),
        ("non-quasiconformality", non_quasiconformality),
        ("doubling", doubling),
        ("averaging lemma", averaging_lemma),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
