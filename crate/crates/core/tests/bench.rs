use contour_eig::bench::{self, *};
use bench::Strategy;
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, GroundTruth, ProblemKind};
use proptest::prelude::*;

fn instance(kind: ProblemKind, n: usize, m: usize, seed: u64) -> BenchInstance {
    let (pencil, _) = generate(kind, Grid2D::square(n).unwrap(), seed, &GeneratorParams::default()).unwrap();
    let truth = dense_ground_truth(&pencil, m).unwrap();
    BenchInstance { problem_id: pencil.problem_id().to_string(), pencil, truth }
}

/// Maximum one-to-one matching by exhaustive search.
fn brute_force_matching(found: &[f64], truth: &[f64], radius: f64) -> usize {
    fn go(i: usize, found: &[f64], truth: &[f64], used: &mut Vec<bool>, radius: f64) -> usize {
        if i == found.len() {
            return 0;
        }
        let mut best = go(i + 1, found, truth, used, radius);
        for j in 0..truth.len() {
            if !used[j] && (found[i] - truth[j]).abs() <= radius {
                used[j] = true;
                best = best.max(1 + go(i + 1, found, truth, used, radius));
                used[j] = false;
            }
        }
        best
    }
    go(0, found, truth, &mut vec![false; truth.len()], radius)
}

proptest! {
    // Truth values are kept further apart than twice the matching radius, the
    // regime in which nearest-first greedy matching is optimal.
    #[test]
    fn greedy_matching_agrees_with_brute_force(
        gaps in prop::collection::vec(1.0f64..3.0, 2..8),
        picks in prop::collection::vec((0usize..8, -2.0f64..2.0), 0..10),
    ) {
        let mut truth = vec![0.0];
        for g in &gaps {
            truth.push(truth.last().unwrap() + g);
        }
        let t = GroundTruth::from_values(truth.clone());
        let tol = 0.1 / t.span();
        let found: Vec<f64> = picks.iter().map(|&(k, off)| truth[k % truth.len()] + 0.1 * off).collect();
        let (matched, missed) = match_found(&found, &t, tol);
        prop_assert_eq!(matched, brute_force_matching(&found, &truth, tol * t.span()));
        prop_assert_eq!(matched + missed, truth.len());
    }
}

#[test]
fn oracle_kde_and_calibrated_scout_miss_nothing() {
    let inst = instance(ProblemKind::Thermal, 30, 9, 2);
    let cfg = PipelineConfig::default();
    for s in [Strategy::OracleKde, Strategy::ScoutLanczos, Strategy::DeepContour] {
        let r = run_pipeline_on(&inst, s, 1e-10, &cfg, 7).unwrap();
        assert_eq!(r.missed, 0, "{s}");
        assert_eq!(r.found + r.missed, 9);
        assert!(r.prep_time >= 0.0 && r.solve_time >= 0.0);
        assert_eq!(r.total_time, r.prep_time + r.solve_time);
        assert!(r.contour_area > 0.0);
    }
}

#[test]
fn pipeline_from_dataset_directory() {
    use contour_eig::problems::{write_dataset, write_truth, Dataset};
    let inst = instance(ProblemKind::Em, 12, 4, 3);
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), &Dataset { pencil: inst.pencil.clone(), field: None, truth: None }).unwrap();
    let err = run_pipeline(dir.path(), Strategy::OracleKde, 1e-8, &PipelineConfig::default(), 0).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    write_truth(dir.path(), &inst.truth).unwrap();
    let r = run_pipeline(dir.path(), Strategy::ScoutKs, 1e-8, &PipelineConfig::default(), 0).unwrap();
    assert_eq!(r.missed, 0);
    assert_eq!(r.problem_id, inst.problem_id);
}

#[test]
fn report_aggregates_recompute_from_records() {
    let insts = [instance(ProblemKind::Thermal, 10, 4, 0), instance(ProblemKind::Thermal, 10, 4, 1)];
    let strategies = [Strategy::DeepContour, Strategy::ScoutArnoldi, Strategy::Random];
    let report = run_bench(&insts, &strategies, &[1e-4, 1e-8], &PipelineConfig::default(), 3).unwrap();
    assert_eq!(report.records.len(), 12);
    for a in &report.aggregates {
        let x: Vec<f64> = report
            .records
            .iter()
            .filter(|r| r.strategy == a.strategy && r.tolerance == a.tolerance)
            .map(|r| match a.metric.as_str() {
                "prep_time" => r.prep_time,
                "solve_time" => r.solve_time,
                "total_time" => r.total_time,
                "missed" => r.missed as f64,
                "found" => r.found as f64,
                _ => r.contour_area,
            })
            .collect();
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((a.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!((a.stdev - sd).abs() <= 1e-12 * sd.max(1.0));
    }
    for s in &report.speedups {
        let ratios: Vec<f64> = report
            .records
            .iter()
            .filter(|b| b.strategy == s.baseline && b.tolerance == s.tolerance)
            .map(|b| {
                let o = report
                    .records
                    .iter()
                    .find(|o| o.strategy == Strategy::DeepContour && o.problem_id == b.problem_id && o.tolerance == b.tolerance)
                    .unwrap();
                b.total_time / o.total_time
            })
            .collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((s.e2e_mean - mean).abs() <= 1e-12 * mean);
    }
    for c in &report.cv {
        let agg = |m: &str| report.aggregates.iter().find(|a| a.strategy == c.strategy && a.tolerance == c.tolerance && a.metric == m).unwrap();
        let sd = agg("solve_time");
        assert!((c.cv - sd.stdev / sd.mean).abs() <= 1e-12);
    }
    // Everything but wall-clock fields repeats under the same seed.
    let again = run_bench(&insts, &strategies, &[1e-4, 1e-8], &PipelineConfig::default(), 3).unwrap();
    for (a, b) in report.records.iter().zip(&again.records) {
        assert_eq!((a.missed, a.found, a.contour_area), (b.missed, b.found, b.contour_area));
    }
}

#[test]
fn sensitivity_is_reproducible() {
    let inst = instance(ProblemKind::Thermal, 12, 4, 5);
    let a = run_sensitivity(&inst.pencil, &inst.truth, 10, 1e-8).unwrap();
    let b = run_sensitivity(&inst.pencil, &inst.truth, 10, 1e-8).unwrap();
    assert_eq!(a.runs.len(), 10);
    let key = |r: &SensitivityReport| r.runs.iter().map(|x| (x.n_contours, x.missed)).collect::<Vec<_>>();
    assert_eq!(key(&a), key(&b));
    assert_eq!(a.mean_missed_rate, b.mean_missed_rate);
    assert!(a.cv_time >= 0.0);
}
