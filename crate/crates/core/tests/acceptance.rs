//! Acceptance criteria, one printed line each. Tolerances are pinned here.

mod common;

use acs_verify::distribution::{torsion_at, torsion_operator, DistributionChart, PolynomialMatrix};
use acs_verify::fields::{AlmostComplexField, TorusChart};
use acs_verify::harness::{load_scenario, run_scenario, RunOptions, Scenario, Status};
use acs_verify::induced::{
    dbar_f, induced_jf_quotient, nijenhuis_via_torsion, random_instance, variation_report, InstanceParams,
};
use acs_verify::linalg::{complexify_vector, realify_vector, CVector, RVector};
use acs_verify::lvmb::{check_condition_i, check_condition_ii, LvmbData};
use acs_verify::rng::SeededRng;
use acs_verify::universal::{
    dimension_symplectic, dimension_universal, lift_at, random_compatible_input, symplectic_pointwise_model,
    versality_check, versality_from_dbar, ChartChoice, PairingSign, PointwiseACManifold,
};
use acs_verify::Tolerances;
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

const RANK: f64 = 1e-8;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("runtime {elapsed:.2?} exceeds {limit:?}"))
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> Scenario {
    load_scenario(&scenarios_dir().join(name)).expect("bundled scenario loads")
}

fn only(mut s: Scenario, checks: &[&str]) -> Scenario {
    s.checks = Some(checks.iter().map(|c| c.to_string()).collect());
    s
}

fn record_residual(s: &Scenario, check: &str) -> Result<(Status, f64), String> {
    let report = run_scenario(s, &RunOptions::default()).map_err(|e| e.to_string())?;
    let r = report.record(check).ok_or(format!("{check} missing from report"))?;
    Ok((r.status, r.max_residual.unwrap_or(f64::NAN)))
}

fn c1_dimensions() -> Verdict {
    let t = Instant::now();
    ensure(dimension_universal(1, 4) == Ok(46), "dimension_universal(1, 4) != 46")?;
    for n in 1..=3 {
        let expected = 38 * n * n + 8 * n;
        ensure(dimension_universal(n, 4 * n) == Ok(expected), format!("n = {n}: expected {expected}"))?;
    }
    // N = m(m + 1) + 2n(m - n) with m = 2bk
    for (n, b, k, expected) in [(1, 1, 3, 52), (1, 2, 3, 178), (2, 1, 5, 142)] {
        let m = 2 * b * k;
        ensure(m * (m + 1) + 2 * n * (m - n) == expected, "oracle table")?;
        ensure(
            dimension_symplectic(n, b, k) == Ok(expected),
            format!("dimension_symplectic({n}, {b}, {k}) != {expected}"),
        )?;
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("46, 38n²+8n for n = 1..3, three symplectic triples ({elapsed:.1?})"))
}

fn c2_reconstruction() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for (file, samples) in [("universal_n1_k4.json", 100), ("universal_n2_k8.json", 1296)] {
        let s = only(scenario(file), &["universal.reconstruction"]);
        let report = run_scenario(&s, &RunOptions::default()).map_err(|e| e.to_string())?;
        let r = report.record("universal.reconstruction").ok_or("missing record")?;
        ensure(r.name == "J_f == J_X", "record name")?;
        ensure(r.samples_checked == samples, format!("{file}: {} samples", r.samples_checked))?;
        let v = r.max_residual.unwrap_or(f64::NAN);
        ensure(r.status == Status::Pass && v <= 1e-8, format!("{file}: |J_f - J_X| = {v:e}"))?;
        worst = worst.max(v);
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("max |J_f - J_X| = {worst:.2e} over 10×10 (n=1) and 6⁴ (n=2) grids ({elapsed:.2?})"))
}

fn c3_torsion() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut nontrivial_centre = 0;
    let mut off_centre: f64 = 0.0;
    for seed in 0..10u64 {
        let n = 1 + (seed % 2) as usize;
        let big_n = (n + 2 + (seed % 3) as usize).min(6);
        let m = big_n - n;
        let mut rng = SeededRng::new(300 + seed);
        let a = PolynomialMatrix::random(n, big_n, 2, 2 * n * m, 0.5, &mut rng);
        let chart = DistributionChart::from_graph(n, Arc::new(a), CVector::zeros(big_n)).map_err(|e| e.to_string())?;
        let z0 = CVector::zeros(big_n);
        let theta = torsion_at(&chart, &z0, 1e-9).map_err(|e| e.to_string())?;
        ensure(theta.is_antisymmetric(), format!("seed {seed}: θ not antisymmetric"))?;
        let scale = theta.max_abs().max(1.0);
        nontrivial_centre += (theta.max_abs() > 1e-3) as usize;
        let w = rng.complex_vector(big_n);
        let z = &w * Complex64::new(0.2 / w.norm(), 0.0);
        for j in 0..m {
            for k in 0..m {
                let oracle0 = common::frame_bracket(&chart, &z0, j, k, 1e-4);
                for i in 0..n {
                    let d = (theta.get(i, n + j, n + k) - oracle0[i] * 0.5).norm() / scale;
                    worst = worst.max(d);
                }
                let (ej, ek) = (common::frame(&chart, &z, j), common::frame(&chart, &z, k));
                let op = torsion_operator(&chart, &z, &ej, &ek).map_err(|e| e.to_string())?;
                let swapped = torsion_operator(&chart, &z, &ek, &ej).map_err(|e| e.to_string())?;
                ensure(op == -swapped, format!("seed {seed}: θ(u, v) != -θ(v, u) exactly"))?;
                let oracle = common::frame_bracket(&chart, &z, j, k, 1e-4);
                off_centre = off_centre.max(oracle.camax());
                worst = worst.max((op - &oracle).camax() / oracle.camax().max(1.0));
            }
        }
    }
    ensure(nontrivial_centre >= 5 && off_centre > 1e-2, "torsion too small to test")?;
    ensure(worst <= 1e-6, format!("relative deviation {worst:e}"))?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "10 charts ({nontrivial_centre} with nonzero torsion at the centre), max relative deviation {worst:.2e}, antisymmetry exact ({elapsed:.2?})"
    ))
}

fn c4_nijenhuis() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut smallest = f64::INFINITY;
    for seed in 0..5u64 {
        let inst = random_instance(&InstanceParams::default(), 400 + seed).map_err(|e| e.to_string())?;
        let jfun = |y: &RVector| {
            induced_jf_quotient(&inst.embedding, &inst.chart, &complexify_vector(y), RANK).expect("transverse")
        };
        let x = realify_vector(&inst.point);
        let mut rng = SeededRng::new(4000 + seed);
        for _ in 0..25 {
            let (zeta, eta) = (rng.real_vector(4), rng.real_vector(4));
            let direct = common::four_bracket(&jfun, &x, &zeta, &eta, 1e-3);
            let via = nijenhuis_via_torsion(&inst.embedding, &inst.chart, &inst.point, &zeta, &eta, RANK)
                .map_err(|e| e.to_string())?;
            smallest = smallest.min(direct.norm());
            worst = worst.max((&direct - via).norm() / direct.norm());
        }
    }
    ensure(smallest > 1e-6, format!("trivial Nijenhuis tensor ({smallest:e})"))?;
    ensure(worst <= 1e-4, format!("relative deviation {worst:e}"))?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(20))?;
    Ok(format!("5 scenarios × 25 pairs, max relative deviation {worst:.2e} ({elapsed:.2?})"))
}

fn c5_variation() -> Verdict {
    let t = Instant::now();
    let cases = [(1, 3, 17), (1, 3, 18), (2, 5, 4), (2, 5, 7)];
    let mut summary = Vec::new();
    for (n, big_n, seed) in cases {
        let params = InstanceParams {
            n,
            big_n,
            ..InstanceParams::default()
        };
        let inst = random_instance(&params, seed).map_err(|e| e.to_string())?;
        let r = variation_report(&inst.embedding, &inst.chart, &inst.variation, &inst.point, &[1e-3, 1e-4], RANK)
            .map_err(|e| e.to_string())?;
        let ratio = r.ratio();
        ensure((8.0..=12.0).contains(&ratio), format!("n = {n}, seed {seed}: ratio {ratio}"))?;
        ensure(r.errors[1] <= 1e-3, format!("n = {n}, seed {seed}: terminal error {:e}", r.errors[1]))?;
        ensure(r.anticommutation <= 1e-9, format!("anticommutation {:e}", r.anticommutation))?;
        ensure(r.closed_form_norm > 1e-3, "trivial variation")?;
        summary.push(format!("{ratio:.2}"));
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(20))?;
    Ok(format!("error ratios {} ({elapsed:.2?})", summary.join(", ")))
}

fn c6_versality() -> Verdict {
    let tol = Tolerances::default();
    let j = AlmostComplexField::nilpotent_conjugate(1, 0.1, 2, 4, &mut SeededRng::new(11));
    let m = PointwiseACManifold::torus(j);
    let mut min_gap = f64::INFINITY;
    for x in TorusChart::new(2).grid(&[10, 10]) {
        let r = versality_check(&x, &m, ChartChoice::Orthogonal, &tol).map_err(|e| e.to_string())?;
        ensure(r.dbar_rank == 1 && r.surj_rank == 2, format!("ranks ({}, {}) at {x:?}", r.dbar_rank, r.surj_rank))?;
        min_gap = min_gap.min(r.gap);
    }
    ensure(min_gap >= 1e-6, format!("gap {min_gap:e}"))?;
    let (status, defect) = record_residual(&scenario("universal_n1_k4.json"), "universal.versality_rank")?;
    ensure(status == Status::Pass && defect == 0.0, "bundled scenario versality ranks")?;

    let flat = PolynomialMatrix {
        n: 1,
        big_n: 3,
        monomials: vec![],
    };
    let chart = DistributionChart::from_graph(1, Arc::new(flat), CVector::zeros(3)).map_err(|e| e.to_string())?;
    let mut foliation_gap = f64::INFINITY;
    for seed in 0..5 {
        let inst = random_instance(&InstanceParams { n: 1, big_n: 3, ..InstanceParams::default() }, 600 + seed)
            .map_err(|e| e.to_string())?;
        let db = dbar_f(&inst.embedding, &chart, &inst.point, RANK).map_err(|e| e.to_string())?;
        let r = versality_from_dbar(&chart, &inst.embedding.point(&inst.point), &db, &tol).map_err(|e| e.to_string())?;
        ensure(r.dbar_rank == 1 && r.surj_rank == 0, format!("foliation ranks ({}, {})", r.dbar_rank, r.surj_rank))?;
        foliation_gap = foliation_gap.min(r.gap);
    }
    ensure(foliation_gap >= 1e-6, "foliation gap")?;
    let (status, _) = record_residual(&scenario("foliation_control.json"), "induced.foliation_versality")?;
    ensure(status == Status::Pass, "bundled foliation control")?;
    Ok(format!(
        "rank ∂̄f = 1, rank θ(∂̄f,·) = 2 on 100 samples (gap ≥ {min_gap:.3}); foliation rank 0 (gap {foliation_gap:.1})"
    ))
}

fn c7_isotropy() -> Verdict {
    let tol = Tolerances::default();
    let m = PointwiseACManifold::torus(AlmostComplexField::standard(2));
    let mut rng = SeededRng::new(14);
    let mut worst_iso: f64 = 0.0;
    let mut worst_n: f64 = 0.0;
    for x in TorusChart::new(4).random_points(6, &mut rng) {
        let lift = lift_at(&x, &m, ChartChoice::Orthogonal, &tol).map_err(|e| e.to_string())?;
        let iso = lift.isotropy(&tol).map_err(|e| e.to_string())?;
        ensure(iso.isotropic, format!("not isotropic at {x:?}: {:e}", iso.max_residual))?;
        worst_iso = worst_iso.max(iso.max_residual);
        for _ in 0..3 {
            let (zeta, eta) = (rng.real_vector(4), rng.real_vector(4));
            worst_n = worst_n.max(lift.nijenhuis(&zeta, &eta).map_err(|e| e.to_string())?.amax());
        }
    }
    ensure(worst_n <= 1e-8, format!("N_{{J_f}} = {worst_n:e}"))?;
    let report = run_scenario(&scenario("universal_constant_j.json"), &RunOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.passed(), "bundled constant-J scenario")?;
    Ok(format!("isotropy residual {worst_iso:.1e}, max |N_{{J_f}}| = {worst_n:.1e} on 6 samples"))
}

fn c8_symplectic() -> Verdict {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut control = f64::INFINITY;
    for (i, (n, m)) in [(1, 2), (2, 3), (2, 4)].into_iter().enumerate() {
        let (omega, j, normal) =
            random_compatible_input(n, m, &mut SeededRng::new(800 + i as u64)).map_err(|e| e.to_string())?;
        let r = symplectic_pointwise_model(&omega, &j, &normal, PairingSign::Difference, 1e-9).map_err(|e| e.to_string())?;
        worst = worst.max(r.compat_residual).max(r.pullback_residual);
        let c = symplectic_pointwise_model(&omega, &j, &normal, PairingSign::Sum, 1e-9).map_err(|e| e.to_string())?;
        control = control.min(c.compat_residual.max(c.pullback_residual));
        ensure(!c.passed, "sign-flipped control passed")?;
    }
    ensure(worst <= 1e-10, format!("residual {worst:e}"))?;
    ensure(control > 1e-3, format!("control residual {control:e}"))?;
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("max residual {worst:.1e}, control residual ≥ {control:.2} ({elapsed:.1?})"))
}

fn c9_lvmb() -> Verdict {
    let t = Instant::now();
    let forms = |k: usize| -> Vec<Vec<Complex64>> {
        (0..k).map(|i| vec![Complex64::new(i as f64, (i * i) as f64 * 0.5)]).collect()
    };
    let closed = LvmbData::new(1, vec![vec![0, 1, 2]], &forms(3)).map_err(|e| e.to_string())?;
    let r = check_condition_ii(&closed).map_err(|e| e.to_string())?;
    ensure(r.holds && r.counterexample.is_none(), "N = 2 example")?;
    let open = LvmbData::new(1, vec![vec![0, 1, 2]], &forms(4)).map_err(|e| e.to_string())?;
    let r = check_condition_ii(&open).map_err(|e| e.to_string())?;
    ensure(!r.holds && r.counterexample == Some((vec![0, 1, 2], 3)), "N = 3 counterexample")?;

    let a = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let b = [[0.5, 0.5], [1.5, 0.5], [1.5, 1.5], [0.5, 1.5]];
    let c = [[1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0]];
    ensure((common::hull_intersection_area(&a, &b) - 0.25).abs() < 1e-15, "oracle: overlapping squares")?;
    ensure(common::hull_intersection_area(&a, &c) == 0.0, "oracle: squares sharing an edge")?;

    let mut pairs = 0;
    let mut overlaps = 0;
    for seed in 0..20u64 {
        let mut rng = SeededRng::new(900 + seed);
        let big_n = 4 + (seed % 2) as usize;
        let data = acs_verify::lvmb::random_instance(1, big_n, 3, &mut rng).map_err(|e| e.to_string())?;
        let verdict = check_condition_i(&data).map_err(|e| e.to_string())?;
        let pt = |k: usize| {
            let p = data.point(k);
            [p[0], p[1]]
        };
        let mut all = true;
        for p in &verdict.pairs {
            let a: Vec<_> = p.j1.iter().map(|&k| pt(k)).collect();
            let b: Vec<_> = p.j2.iter().map(|&k| pt(k)).collect();
            let oracle = common::hull_intersection_area(&a, &b) > 1e-12;
            ensure(oracle == p.overlap, format!("seed {seed}: pair {:?} {:?} LP {} oracle {oracle}", p.j1, p.j2, p.overlap))?;
            all &= oracle;
            pairs += 1;
            overlaps += oracle as usize;
        }
        ensure(all == verdict.holds, format!("seed {seed}: verdict"))?;
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("condition (ii) examples; LP = polygon oracle on {pairs} pairs ({overlaps} overlapping) ({elapsed:.1?})"))
}

fn c10_determinism() -> Verdict {
    let dir = scenarios_dir();
    let mut files: Vec<PathBuf> = Vec::new();
    for d in [dir.clone(), dir.join("controls")] {
        for entry in std::fs::read_dir(&d).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            if p.extension().is_some_and(|e| e == "json") {
                files.push(p);
            }
        }
    }
    files.sort();
    for f in &files {
        let s = load_scenario(f).map_err(|e| e.to_string())?;
        let a = run_scenario(&s, &RunOptions::default()).map_err(|e| e.to_string())?;
        let b = run_scenario(&s, &RunOptions::default()).map_err(|e| e.to_string())?;
        ensure(a.to_jsonl() == b.to_jsonl(), format!("{} differs between runs", f.display()))?;
    }
    Ok(format!("{} bundled scenarios byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("dimension formulas", c1_dimensions),
        ("universal reconstruction", c2_reconstruction),
        ("torsion double entry", c3_torsion),
        ("Nijenhuis identity", c4_nijenhuis),
        ("variation formula", c5_variation),
        ("versality", c6_versality),
        ("integrable implies isotropic", c7_isotropy),
        ("symplectic compatibility", c8_symplectic),
        ("LVMB conditions", c9_lvmb),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("[PASS] {:>2}. {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {:>2}. {title}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
