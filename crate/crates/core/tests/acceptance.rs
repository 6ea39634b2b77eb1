//! One line per acceptance criterion. Runs at full scale; expect several
//! minutes on one core.
//!
//! Criterion 7 fails as stated: over R/r ∈ {2, 4, 8, 16} the annulus
//! crossing probability is still close to 1 and ln p is visibly concave in
//! ln(R/r), so a single power law fits with R² ≈ 0.92. The process exits
//! nonzero if the set of failing criteria changes in either direction.

use std::collections::BTreeSet;
use std::time::Instant;

use cardylab_core::harness::{
    crossval_domains, run_convergence, run_crossval, run_exact_suite, run_rsw, with_workers,
    ExactSuiteOptions, ExperimentConfig, ShapeParams,
};

const KNOWN_FAILURES: [u32; 1] = [7];

struct Line {
    id: u32,
    passed: bool,
    title: &'static str,
    detail: String,
    secs: f64,
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (passed, detail) = f();
    let line = Line {
        id,
        passed,
        title,
        detail,
        secs: start.elapsed().as_secs_f64(),
    };
    println!(
        "criterion {} {} {:<34} {} ({:.1} s)",
        line.id,
        if line.passed { "PASS" } else { "FAIL" },
        line.title,
        line.detail,
        line.secs
    );
    line
}

fn exact_criteria() -> Vec<Line> {
    let start = Instant::now();
    let rep = run_exact_suite(&ExactSuiteOptions::default()).expect("exact suite runs");
    let secs = start.elapsed().as_secs_f64();
    let within = secs < 60.0;
    let line = |names: &[&str], extra: String| {
        let checks: Vec<_> = names
            .iter()
            .map(|n| rep.check(n).expect("known check"))
            .collect();
        let ok = checks.iter().all(|c| c.passed());
        let fails: u64 = checks.iter().map(|c| c.failures).sum();
        let cases: u64 = checks.iter().map(|c| c.cases).sum();
        let examples: Vec<&String> = checks.iter().flat_map(|c| &c.examples).take(2).collect();
        (
            ok,
            format!(
                "{cases} cases, {fails} failures{extra}{}",
                if examples.is_empty() {
                    String::new()
                } else {
                    format!(" e.g. {examples:?}")
                }
            ),
        )
    };
    let timing = format!(", suite {secs:.1} s of 60");
    vec![
        timed(1, "exact holomorphicity", || {
            let (ok, d) = line(
                &["holomorphicity", "single-hexagon"],
                format!(", {} vertices{timing}", rep.vertices_checked),
            );
            (ok && within, d)
        }),
        timed(2, "exact contour integrals", || {
            let (ok, d) = line(
                &["contour-integrals"],
                format!(", {} contours{timing}", rep.contours_checked),
            );
            (ok && within, d)
        }),
        timed(3, "bijection and counting", || {
            line(&["counting"], format!(", {} domains", rep.domains))
        }),
        timed(4, "crossing / link pattern", || {
            line(&["crossing-equivalence"], String::new())
        }),
        timed(5, "boundary values", || {
            line(&["boundary-values"], String::new())
        }),
    ]
}

fn cardy_config(
    shape: &str,
    params: ShapeParams,
    mesh: f64,
    trials: u64,
    seed: u64,
) -> ExperimentConfig {
    ExperimentConfig {
        shape: shape.into(),
        params,
        mesh_list: vec![mesh],
        trials,
        seed,
        output: None,
        workers: None,
        detector: "union-find".into(),
        tolerance: None,
        sigmas: None,
    }
}

fn criterion_6() -> Line {
    timed(6, "Cardy at desk scale", || {
        let mesh = 1.0 / (60.0 * 3f64.sqrt());
        let mut ok = true;
        let mut parts = Vec::new();
        for (k, t) in [0.25, 0.5, 0.75].into_iter().enumerate() {
            let params = ShapeParams {
                t,
                ..Default::default()
            };
            let rep = run_convergence(&cardy_config(
                "triangle",
                params,
                mesh,
                1_000_000,
                60 + k as u64,
            ))
            .unwrap();
            let row = &rep.rows[0];
            ok &= row.abs_error <= 0.02;
            parts.push(format!(
                "t={t}: p={:.4} err {:.4}",
                row.p_hat, row.abs_error
            ));
        }
        let mesh = 1.0 / (30.0 * 3f64.sqrt());
        let rep = run_convergence(&cardy_config(
            "rhombus",
            ShapeParams::default(),
            mesh,
            1_000_000,
            70,
        ))
        .unwrap();
        let row = &rep.rows[0];
        let z = row.abs_error / row.sigma;
        ok &= z <= 3.0;
        parts.push(format!(
            "rhombus {} faces: p={:.4} ({z:.2} sigma)",
            row.faces, row.p_hat
        ));
        (ok, parts.join("; "))
    })
}

fn criterion_7() -> Line {
    timed(7, "RSW decay", || {
        let rep = run_rsw(1.0, &[2.0, 4.0, 8.0, 16.0], 1.0 / 16.0, 100_000, 7).unwrap();
        let ps: Vec<String> = rep.rows.iter().map(|r| format!("{:.4}", r.p_hat)).collect();
        // larger ratios on a coarser lattice, for context only
        let far = run_rsw(1.0, &[16.0, 32.0, 64.0], 0.25, 20_000, 7).unwrap();
        (
            rep.passed,
            format!(
                "p = [{}], eta {:.4}, R^2 {:.4} (need > 0 and >= 0.98); advisory eta range {}; R/r 16..64 gives eta {:.4}, R^2 {:.4}",
                ps.join(", "),
                rep.eta,
                rep.r_squared,
                if rep.advisory_in_range { "met" } else { "missed" },
                far.eta,
                far.r_squared
            ),
        )
    })
}

fn criterion_8() -> Line {
    timed(8, "MC / exact cross-validation", || {
        let domains = crossval_domains().unwrap();
        let rep = run_crossval(&domains, 100_000, 8_000, 4.0).unwrap();
        let worst = rep.worst.as_ref().map_or(0.0, |w| w.deviation);
        (
            rep.passed(),
            format!(
                "{} domains, {} comparisons, {} beyond 4 sigma, worst {worst:.2} sigma, expected false failures {:.3}",
                domains.len(),
                rep.comparisons,
                rep.failures.len(),
                rep.expected_false_failures
            ),
        )
    })
}

fn criterion_9() -> Line {
    timed(9, "reproducibility across workers", || {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = cardy_config("triangle", ShapeParams::default(), 0.05, 40_000, 3);
        cfg.mesh_list = vec![0.1, 0.05];
        let mut tables = Vec::new();
        for w in [1usize, 4, 8] {
            cfg.workers = Some(w);
            let conv = dir.path().join(format!("conv{w}.csv"));
            run_convergence(&cfg)
                .unwrap()
                .write(&cfg, &conv, 0.0)
                .unwrap();
            let rsw = dir.path().join(format!("rsw{w}.csv"));
            with_workers(Some(w), || run_rsw(1.0, &[2.0, 4.0], 0.125, 20_000, 5))
                .unwrap()
                .unwrap()
                .write(&rsw, "", Some(w), 0.0)
                .unwrap();
            tables.push((std::fs::read(conv).unwrap(), std::fs::read(rsw).unwrap()));
        }
        let same = tables.windows(2).all(|w| w[0] == w[1]);
        (
            same,
            format!(
                "convergence and RSW tables at 1, 4, 8 workers {}",
                if same { "identical" } else { "differ" }
            ),
        )
    })
}

fn main() {
    let mut lines = exact_criteria();
    lines.push(criterion_6());
    lines.push(criterion_7());
    lines.push(criterion_8());
    lines.push(criterion_9());
    let failing: BTreeSet<u32> = lines.iter().filter(|l| !l.passed).map(|l| l.id).collect();
    let known: BTreeSet<u32> = KNOWN_FAILURES.into_iter().collect();
    println!(
        "{} of {} criteria pass; failing {:?}, documented as unattainable {:?}",
        lines.len() - failing.len(),
        lines.len(),
        failing,
        known
    );
    if failing != known {
        eprintln!("failing criteria differ from the documented set");
        std::process::exit(1);
    }
}
