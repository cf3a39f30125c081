//! Acceptance suite A1–A8. Prints one PASS/FAIL line per criterion.
//!
//! The process exits 0 so that `cargo test` reports build and run health; set
//! `ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

use std::f64::consts::PI;
use std::time::Instant;

use contour_eig::bench::{match_found, run_pipeline_on, run_sensitivity, BenchInstance, PipelineConfig, Strategy, MATCH_TOL};
use contour_eig::contours::{construct_contours, quadrature_for, Contour, ContourSource, KdeParams};
use contour_eig::linalg::{DenseBlock, MatrixPencil, SparseMatrix};
use contour_eig::predictor::{noisy_oracle_predict, PredictionSource, SpectrumPrediction};
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, GroundTruth, ProblemKind};
use contour_eig::solvers::{apply_projector, solve_multi, MultiResult, SolverConfig, SolverKind};
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn instance(kind: ProblemKind, n: usize, m: usize, seed: u64) -> BenchInstance {
    let (pencil, _) = generate(kind, Grid2D::square(n).unwrap(), seed, &GeneratorParams::default()).unwrap();
    let truth = dense_ground_truth(&pencil, m).unwrap();
    BenchInstance { problem_id: pencil.problem_id().to_string(), pencil, truth }
}

/// The A1 family: ten thermal and ten EM-cavity instances on a 30×30 grid, M = 9.
fn a1_family() -> Vec<BenchInstance> {
    let mut v = Vec::new();
    for kind in [ProblemKind::Thermal, ProblemKind::Em] {
        for seed in 0..10 {
            v.push(instance(kind, 30, 9, seed));
        }
    }
    v
}

fn kde_contours(values: &[f64], params: &KdeParams) -> (Vec<usize>, Vec<Contour>) {
    let pred = SpectrumPrediction::new(values.to_vec(), PredictionSource::NoisyOracle, "acceptance").unwrap();
    let (part, contours) = construct_contours(&pred, params).unwrap();
    (part.intervals.iter().map(|i| i.count).collect(), contours)
}

/// Every truth value has a found value within `rel` relative distance.
fn all_matched(found: &[f64], truth: &GroundTruth, rel: f64) -> bool {
    truth.eigenvalues.iter().all(|t| found.iter().any(|f| (f - t).abs() <= rel * t.abs()))
}

fn matvec(m: &SparseMatrix, x: &[Complex64]) -> Vec<Complex64> {
    (0..m.n_rows()).map(|i| m.row(i).map(|(j, a)| a * x[j]).sum()).collect()
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `||Ax - λBx|| / (||Ax|| + |λ| ||Bx||)` recomputed from scratch.
fn residual(p: &MatrixPencil, lambda: f64, x: &[Complex64]) -> f64 {
    let ax = matvec(p.a(), x);
    let bx = matvec(p.b(), x);
    let r: Vec<Complex64> = ax.iter().zip(&bx).map(|(a, b)| a - b * lambda).collect();
    norm(&r) / (norm(&ax) + lambda.abs() * norm(&bx))
}

fn worst_verified_residual(p: &MatrixPencil, res: &MultiResult) -> f64 {
    let mut worst = 0.0f64;
    for o in &res.outcomes {
        if let Ok(r) = &o.result {
            for (k, &lam) in r.eigenvalues.iter().enumerate() {
                worst = worst.max(residual(p, lam, r.eigenvectors.col(k)));
            }
        }
    }
    worst
}

fn a1(family: &[BenchInstance]) -> Outcome {
    let cfg = SolverConfig::default().with_tol(1e-10);
    let (mut ok, mut slowest, mut missed_total) = (0, 0.0f64, 0);
    for inst in family {
        let t0 = Instant::now();
        let (_, contours) = kde_contours(&inst.truth.eigenvalues, &KdeParams::default());
        let res = solve_multi(&inst.pencil, &contours, &cfg, SolverKind::Cirr, 1);
        let elapsed = t0.elapsed().as_secs_f64();
        let (_, missed) = match_found(&res.eigenvalues, &inst.truth, MATCH_TOL);
        missed_total += missed;
        slowest = slowest.max(elapsed);
        if missed == 0 && all_matched(&res.eigenvalues, &inst.truth, 1e-8) && elapsed < 60.0 {
            ok += 1;
        }
    }
    Outcome {
        pass: ok == family.len(),
        detail: format!("{ok}/{} instances exact to 1e-8, missed total {missed_total}, slowest {slowest:.2}s", family.len()),
    }
}

fn a2() -> Outcome {
    // Diagonal test pencil diag(1, 3), B = I, Circle(1, 1): residue projector diag(1, 0).
    let p = MatrixPencil::new(SparseMatrix::diagonal(&[1.0, 3.0]), SparseMatrix::identity(2), true, true, "diag").unwrap();
    let c = Contour::circle(1.0, 1.0, 1, ContourSource::Manual).unwrap();
    let exact = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let out = apply_projector(&p, &quadrature_for(&c, n).unwrap(), &DenseBlock::identity(2)).unwrap();
            let mut e = 0.0f64;
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { exact[i] } else { Complex64::new(0.0, 0.0) };
                    e = e.max((out[(i, j)] - want).norm());
                }
            }
            e
        })
        .collect();
    // Geometric decay: log-error linear in n_q, equal slopes over both doublings.
    let s1 = (errs[1] / errs[0]).ln() / 8.0;
    let s2 = (errs[2] / errs[1]).ln() / 16.0;
    let geometric = s1 < 0.0 && s2 < 0.0 && (s1 - s2).abs() <= 0.2 * s2.abs();
    let threshold = errs[2] <= 1e-10;
    Outcome {
        pass: geometric && threshold,
        detail: format!(
            "errors n_q=8,16,32: {:.2e} {:.2e} {:.2e}; geometric {geometric}; n_q=32 <= 1e-10 {threshold}",
            errs[0], errs[1], errs[2]
        ),
    }
}

fn a3(family: &[BenchInstance]) -> Outcome {
    let tol = 1e-10;
    let cfg = SolverConfig::default().with_tol(tol);
    let (mut agree, mut worst_gap, mut worst_res) = (0, 0.0f64, 0.0f64);
    for inst in family {
        let (_, contours) = kde_contours(&inst.truth.eigenvalues, &KdeParams::default());
        let c = solve_multi(&inst.pencil, &contours, &cfg, SolverKind::Cirr, 1);
        let f = solve_multi(&inst.pencil, &contours, &cfg, SolverKind::Feast, 1);
        let mut same = c.eigenvalues.len() == f.eigenvalues.len() && !c.eigenvalues.is_empty();
        for (x, y) in c.eigenvalues.iter().zip(&f.eigenvalues) {
            let gap = (x - y).abs() / x.abs();
            worst_gap = worst_gap.max(gap);
            same &= gap <= 1e-8;
        }
        worst_res = worst_res.max(worst_verified_residual(&inst.pencil, &c)).max(worst_verified_residual(&inst.pencil, &f));
        agree += same as usize;
    }
    Outcome {
        pass: agree == family.len() && worst_res <= tol,
        detail: format!(
            "{agree}/{} instances agree, worst relative gap {worst_gap:.1e}, worst re-verified residual {worst_res:.1e}",
            family.len()
        ),
    }
}

fn a4(family: &[BenchInstance]) -> Outcome {
    let params = KdeParams::default();
    let cfg = SolverConfig::default().with_tol(1e-10);
    let (mut missed_total, mut contract_ok) = (0, true);
    for (i, inst) in family.iter().enumerate() {
        for noise in [0.0, 0.01] {
            let pred = noisy_oracle_predict(&inst.truth, noise, 100 + i as u64, &inst.problem_id).unwrap();
            let (counts, contours) = kde_contours(&pred.values, &params);
            let undersized = counts.iter().filter(|&&k| k < params.n_min).count();
            contract_ok &= counts.iter().all(|&k| k <= params.n_max) && undersized <= 1;
            let res = solve_multi(&inst.pencil, &contours, &cfg, SolverKind::Cirr, 1);
            missed_total += match_found(&res.eigenvalues, &inst.truth, MATCH_TOL).1;
        }
    }
    Outcome {
        pass: missed_total == 0 && contract_ok,
        detail: format!("{} solves, missed total {missed_total}, interval contract held {contract_ok}", 2 * family.len()),
    }
}

fn a5() -> Outcome {
    let inst = instance(ProblemKind::Thermal, 30, 9, 0);
    let r = run_sensitivity(&inst.pencil, &inst.truth, 100, 1e-10).unwrap();
    Outcome {
        pass: r.cv_time >= 0.30 && r.mean_missed_rate > 0.0,
        detail: format!("solve-time CV {:.3}, mean missed rate {:.3}", r.cv_time, r.mean_missed_rate),
    }
}

fn a6() -> Outcome {
    let cfg = PipelineConfig::default();
    let (mut faster, mut ratios, mut speedups) = (0, Vec::new(), Vec::new());
    for seed in 0..10 {
        let inst = instance(ProblemKind::Em, 40, 16, seed);
        let ours = run_pipeline_on(&inst, Strategy::DeepContour, 1e-10, &cfg, seed).unwrap();
        let scout = run_pipeline_on(&inst, Strategy::ScoutLanczos, 1e-10, &cfg, seed).unwrap();
        let s = scout.solve_time / ours.solve_time;
        faster += (s > 1.0) as usize;
        speedups.push(s);
        ratios.push(scout.contour_area / ours.contour_area);
    }
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let mut sorted = speedups.clone();
    sorted.sort_by(f64::total_cmp);
    Outcome {
        pass: faster >= 8 && mean_ratio > 1.5,
        detail: format!(
            "solver speedup > 1 in {faster}/10 (median {:.2}), mean area ratio scout/ours {mean_ratio:.2}",
            0.5 * (sorted[4] + sorted[5])
        ),
    }
}

fn a7(family: &[BenchInstance]) -> Outcome {
    let cfg = SolverConfig::default().with_tol(1e-10);
    let mut time = [0.0f64; 3];
    let mut missed = [0usize; 3];
    let mut solves = [0usize; 3];
    for (i, inst) in family.iter().enumerate() {
        for noise in [0.0, 0.01] {
            let pred = noisy_oracle_predict(&inst.truth, noise, 100 + i as u64, &inst.problem_id).unwrap();
            for (k, w) in [1.0, 10.0, 50.0].into_iter().enumerate() {
                let (_, contours) = kde_contours(&pred.values, &KdeParams { w, ..KdeParams::default() });
                // Best of three repeats damps scheduler noise in the timing.
                let mut best = f64::INFINITY;
                let mut last = None;
                for _ in 0..3 {
                    let t0 = Instant::now();
                    let r = solve_multi(&inst.pencil, &contours, &cfg, SolverKind::Cirr, 1);
                    best = best.min(t0.elapsed().as_secs_f64());
                    last = Some(r);
                }
                let r = last.unwrap();
                time[k] += best;
                solves[k] += r.stats.n_linear_solves;
                missed[k] += match_found(&r.eigenvalues, &inst.truth, MATCH_TOL).1;
            }
        }
    }
    Outcome {
        pass: time[0] >= time[1] && missed[2] >= missed[1],
        detail: format!(
            "solver time w=1,10,50: {:.3} {:.3} {:.3}s; linear solves {:?}; missed {:?}",
            time[0], time[1], time[2], solves, missed
        ),
    }
}

fn a8() -> Outcome {
    let exact = 2.0 * PI * PI;
    let errs: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| {
            let (p, _) = generate(ProblemKind::Thermal, Grid2D::square(n).unwrap(), 0, &GeneratorParams { variance: 0.0, ..GeneratorParams::default() })
                .unwrap();
            (dense_ground_truth(&p, 1).unwrap().eigenvalues[0] - exact).abs()
        })
        .collect();
    let r1 = errs[0] / errs[1];
    let r2 = errs[1] / errs[2];
    Outcome {
        pass: (3.0..=5.0).contains(&r1) && (3.0..=5.0).contains(&r2),
        detail: format!("errors {:.3e} {:.3e} {:.3e}, ratios {r1:.3} {r2:.3}", errs[0], errs[1], errs[2]),
    }
}

fn main() {
    let started = Instant::now();
    let family = a1_family();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("A1 oracle correctness", Box::new(|| a1(&family))),
        ("A2 projector quadrature", Box::new(a2)),
        ("A3 solver agreement", Box::new(|| a3(&family))),
        ("A4 KDE coverage", Box::new(|| a4(&family))),
        ("A5 sensitivity", Box::new(a5)),
        ("A6 speedup direction", Box::new(a6)),
        ("A7 KDE weight ablation", Box::new(|| a7(&family))),
        ("A8 FEM convergence", Box::new(a8)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!("{} {name}: {} ({:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail, t0.elapsed().as_secs_f64());
    }
    println!("acceptance: {}/8 passed in {:.1}s", 8 - failed, started.elapsed().as_secs_f64());
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
