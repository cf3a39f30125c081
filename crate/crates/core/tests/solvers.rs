use contour_eig::contours::{construct_contours, quadrature_for, Contour, ContourSource, KdeParams};
use contour_eig::error::Error;
use contour_eig::linalg::{DenseBlock, MatrixPencil, SparseMatrix};
use contour_eig::predictor::{PredictionSource, SpectrumPrediction};
use contour_eig::problems::{assemble_thermal, dense_eigenpairs, dense_ground_truth, grf_sample, Grid2D};
use contour_eig::solvers::*;
use num_complex::Complex64;

fn diag(values: &[f64]) -> MatrixPencil {
    MatrixPencil::new(SparseMatrix::diagonal(values), SparseMatrix::identity(values.len()), true, true, "diag").unwrap()
}

fn circle(c: f64, r: f64, expected: usize) -> Contour {
    Contour::circle(c, r, expected, ContourSource::Manual).unwrap()
}

/// Trapezoid filter value at `λ` for a circle: 1/(1 + (d/r)^n) inside, (r/d)^n/(1 + (r/d)^n) outside.
fn trapezoid_filter(c: f64, r: f64, n: usize, lambda: f64) -> f64 {
    let d = (lambda - c).abs();
    if d < r {
        1.0 / (1.0 + (d / r).powi(n as i32))
    } else {
        let rho = (r / d).powi(n as i32);
        rho / (1.0 + rho)
    }
}

#[test]
fn projector_on_two_by_two_diagonal() {
    let p = diag(&[1.0, 3.0]);
    let rule = quadrature_for(&circle(1.0, 1.0, 1), 32).unwrap();
    let out = apply_projector(&p, &rule, &DenseBlock::identity(2)).unwrap();
    // Against the exact trapezoid filter the result is exact to round-off.
    assert!((out[(0, 0)].re - trapezoid_filter(1.0, 1.0, 32, 1.0)).abs() < 1e-14);
    assert!((out[(1, 1)].re - trapezoid_filter(1.0, 1.0, 32, 3.0)).abs() < 1e-14);
    assert!(out[(0, 1)].norm() < 1e-15 && out[(1, 0)].norm() < 1e-15);
    // Against the residue projector diag(1, 0) the error is 0.5^32 / (1 + 0.5^32).
    let err = (out[(1, 1)] - 0.0).norm().max((out[(0, 0)] - 1.0).norm());
    assert!(err <= 2.33e-10 * 1.001, "{err}");
}

#[test]
fn projector_empty_and_full_regions() {
    let p = diag(&[1.0, 3.0]);
    let v = DenseBlock::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64 + 0.5, 0.0));
    let none = apply_projector(&p, &quadrature_for(&circle(100.0, 1.0, 0), 32).unwrap(), &v).unwrap();
    assert!(none.max_abs() <= 1e-8);
    let all = apply_projector(&p, &quadrature_for(&circle(2.0, 10.0, 2), 32).unwrap(), &v).unwrap();
    assert!(all.sub(&v).unwrap().max_abs() <= 1e-8);
}

#[test]
fn projector_error_decays_geometrically() {
    let p = diag(&[1.0, 3.0]);
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| {
            let out = apply_projector(&p, &quadrature_for(&circle(1.0, 1.0, 1), n).unwrap(), &DenseBlock::identity(2)).unwrap();
            (out[(0, 0)] - 1.0).norm().max(out[(1, 1)].norm())
        })
        .collect();
    for (w, n) in errs.windows(2).zip([8.0, 16.0]) {
        // Doubling n squares the error, i.e. the log-slope equals ln(ρ) = ln 0.5.
        let slope = (w[1] / w[0]).ln() / n;
        assert!((slope - 0.5f64.ln()).abs() < 0.2 * 0.5f64.ln().abs(), "{slope}");
    }
}

#[test]
fn projector_approximately_idempotent() {
    // Nearest eigenvalues sit at 0.45·r inside and 1.2·r outside the boundary
    // of Circle(0, 1) once scaled, which keeps the filter error below 1e-9.
    let p = diag(&[-0.55, 0.0, 0.3, 2.2, 3.0, -2.5]);
    let rule = quadrature_for(&circle(0.0, 1.0, 3), 32).unwrap();
    let v = DenseBlock::from_fn(6, 3, |i, j| Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, 0.0));
    let pv = apply_projector(&p, &rule, &v).unwrap();
    let ppv = apply_projector(&p, &rule, &pv).unwrap();
    assert!(ppv.sub(&pv).unwrap().max_abs() <= 1e-8 * v.max_abs());
}

#[test]
fn cirr_diagonal_interior() {
    let p = diag(&[1.0, 2.0, 3.0, 10.0]);
    let cfg = SolverConfig::default().with_tol(1e-10);
    let r = cirr_solve(&p, &circle(2.0, 1.5, 3), &cfg, 1).unwrap();
    assert_eq!(r.eigenvalues.len(), 3);
    for (got, want) in r.eigenvalues.iter().zip([1.0, 2.0, 3.0]) {
        assert!((got - want).abs() < 1e-10);
    }
    assert!(r.residuals.iter().all(|&x| x <= 1e-10));
    let missing = cirr_solve(&p, &circle(100.0, 1.0, 3), &cfg, 1);
    assert!(matches!(missing, Err(Error::NoEigenvaluesFound { expected: 3 })));
}

#[test]
fn feast_agrees_with_cirr_on_diagonal() {
    let p = diag(&[1.0, 2.0, 3.0, 10.0]);
    let cfg = SolverConfig::default().with_tol(1e-10);
    let a = cirr_solve(&p, &circle(2.0, 1.5, 3), &cfg, 1).unwrap();
    let b = feast_solve(&p, &circle(2.0, 1.5, 3), &cfg, 1).unwrap();
    assert_eq!(a.eigenvalues.len(), b.eigenvalues.len());
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn feast_from_invariant_subspace_converges_at_once() {
    let p = diag(&[1.0, 2.0, 3.0, 10.0, 11.0]);
    let u0 = DenseBlock::from_fn(5, 3, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
    let r = feast_solve_from(&p, &circle(2.0, 1.5, 3), &SolverConfig::default(), &u0).unwrap();
    assert_eq!(r.stats.iterations, 1);
    assert_eq!(r.eigenvalues.len(), 3);
}

fn thermal(n: usize, seed: u64) -> MatrixPencil {
    let f = grf_sample(Grid2D::square(n).unwrap(), 1.0, 0.25, 0.2, seed).unwrap();
    assert_thermal(&f)
}

fn assert_thermal(f: &contour_eig::problems::CoefficientField) -> MatrixPencil {
    assemble_thermal(f, 1.0).unwrap()
}

fn oracle_contour(values: &[f64], gap_below: f64, gap_above: f64) -> Contour {
    let lo = values[0] - 0.5 * gap_below;
    let hi = values[values.len() - 1] + 0.5 * gap_above;
    circle(0.5 * (lo + hi), 0.5 * (hi - lo), values.len())
}

#[test]
fn feast_thermal_single_contour_converges_quickly() {
    let p = thermal(20, 4);
    let truth = dense_ground_truth(&p, 5).unwrap();
    let all = dense_ground_truth(&p, 6).unwrap().eigenvalues;
    let first = truth.eigenvalues[0];
    let c = oracle_contour(&truth.eigenvalues[..4], first, all[4] - truth.eigenvalues[3]);
    let cfg = SolverConfig::default().with_tol(1e-8);
    let r = feast_solve(&p, &c, &cfg, 3).unwrap();
    assert!(r.stats.iterations <= 4, "{} iterations", r.stats.iterations);
    assert_eq!(r.eigenvalues.len(), 4);
    for (x, y) in r.eigenvalues.iter().zip(&truth.eigenvalues) {
        assert!((x - y).abs() / y <= 1e-8);
    }
    // Independent residual check through sparse products.
    for (k, &lam) in r.eigenvalues.iter().enumerate() {
        assert!(p.relative_residual(lam, r.eigenvectors.col(k)).unwrap() <= 1e-8);
    }
}

#[test]
fn cirr_thermal_with_kde_contours_finds_everything() {
    let p = thermal(30, 11);
    let truth = dense_ground_truth(&p, 9).unwrap();
    let pred = SpectrumPrediction::new(truth.eigenvalues.clone(), PredictionSource::NoisyOracle, "t").unwrap();
    let (_, contours) = construct_contours(&pred, &KdeParams::default()).unwrap();
    let res = solve_multi(&p, &contours, &SolverConfig::default().with_tol(1e-10), SolverKind::Cirr, 5);
    assert_eq!(res.n_failed(), 0);
    assert_eq!(res.eigenvalues.len(), 9, "{:?}", res.eigenvalues);
    for (x, y) in res.eigenvalues.iter().zip(&truth.eigenvalues) {
        assert!((x - y).abs() / y <= 1e-8);
    }
}

#[test]
fn multi_contour_split_and_isolation() {
    let p = diag(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    let cfg = SolverConfig::default();
    let halves = [circle(2.0, 1.5, 3), circle(5.0, 1.5, 3)];
    let r = solve_multi(&p, &halves, &cfg, SolverKind::Cirr, 2);
    assert_eq!(r.eigenvalues.len(), 6);
    for (x, y) in r.eigenvalues.iter().zip(1..=6) {
        assert!((x - y as f64).abs() < 1e-10);
    }
    let with_bad = [circle(2.0, 1.5, 3), circle(50.0, 1.0, 2)];
    let r = solve_multi(&p, &with_bad, &cfg, SolverKind::Feast, 2);
    assert!(r.outcomes[0].result.is_ok());
    assert!(matches!(r.outcomes[1].result, Err(Error::NoEigenvaluesFound { .. })));
    assert_eq!(r.eigenvalues.len(), 3);
    let again = solve_multi(&p, &with_bad, &cfg, SolverKind::Feast, 2);
    assert_eq!(again.eigenvalues, r.eigenvalues);
    assert_eq!(again.residuals, r.residuals);
}

#[test]
fn overlapping_contours_are_deduplicated() {
    let p = diag(&[1.0, 2.0, 3.0, 4.0]);
    let cs = [circle(2.0, 1.5, 3), circle(3.0, 1.5, 3)];
    let r = solve_multi(&p, &cs, &SolverConfig::default(), SolverKind::Cirr, 9);
    assert_eq!(r.eigenvalues.len(), 4, "{:?}", r.eigenvalues);
}

#[test]
fn sharper_filter_with_more_nodes() {
    // One projector pass followed by Rayleigh-Ritz: the worst residual with 16
    // nodes is no better than with 32.
    for seed in 0..10 {
        let p = thermal(10, seed);
        let (truth, _) = dense_eigenpairs(&p, 8).unwrap();
        let ev = &truth.eigenvalues;
        let c = circle(0.5 * (ev[0] + ev[3]), 0.5 * (ev[3] - ev[0]) + 0.3 * (ev[4] - ev[3]), 4);
        let worst = |n_q| {
            let cfg = SolverConfig { n_q, max_refine: 1, tol: 1.0, n_moments: 1, source_cols: Some(4), ..SolverConfig::default() };
            let r = cirr_solve(&p, &c, &cfg, seed).unwrap();
            r.residuals.iter().copied().fold(0.0, f64::max)
        };
        assert!(worst(16) >= worst(32), "seed {seed}");
    }
}

#[test]
fn eigenvector_sidecar_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.bin");
    let block = DenseBlock::from_fn(3, 2, |i, j| Complex64::new((i as f64) - 1.5 * j as f64, 0.0));
    write_eigenvectors(&path, &block).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 16 + 8 * 6);
    assert_eq!(u64::from_le_bytes(bytes[0..8].try_into().unwrap()), 3);
    assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 2);
    // Row-major: second stored value is entry (0, 1), sign fixed by the phase rule.
    let second = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    assert_eq!(second.abs(), 1.5);
    let back = read_eigenvectors(&path).unwrap();
    for i in 0..3 {
        for j in 0..2 {
            assert!((back[(i, j)].re.abs() - block[(i, j)].re.abs()).abs() < 1e-15);
        }
    }
}
