use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{coefficient_of_variation, match_found, mean, stdev, BenchRecord, BenchReport, Strategy, MATCH_TOL};
use crate::contours::{
    calibrate_margin, construct_contours, contour_area, random_contours, scout, scout_contour, Contour, KdeParams,
    ScoutMethod,
};
use crate::error::{Error, Result};
use crate::linalg::MatrixPencil;
use crate::predictor::{noisy_oracle_predict, ritz_as_prediction, SpectrumPrediction, PredictionSource};
use crate::problems::{read_dataset, GroundTruth};
use crate::solvers::{solve_multi, SolverConfig, SolverKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub solver_kind: SolverKind,
    pub kde: KdeParams,
    pub scout_k: usize,
    /// Fixed scout safety factor; `None` calibrates against the truth.
    pub scout_margin: Option<f64>,
    pub margin_step: f64,
    /// Relative noise of the stub predictor used when no prediction is supplied.
    pub noise: f64,
    #[serde(skip)]
    pub prediction: Option<SpectrumPrediction>,
    pub match_tol: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            solver_kind: SolverKind::Cirr,
            kde: KdeParams::default(),
            scout_k: 60,
            scout_margin: None,
            margin_step: 0.05,
            noise: 0.01,
            prediction: None,
            match_tol: MATCH_TOL,
        }
    }
}

/// A pencil with its reference spectrum.
#[derive(Clone, Debug)]
pub struct BenchInstance {
    pub problem_id: String,
    pub pencil: MatrixPencil,
    pub truth: GroundTruth,
}

fn scout_method(s: Strategy) -> Option<ScoutMethod> {
    match s {
        Strategy::ScoutArnoldi => Some(ScoutMethod::Arnoldi),
        Strategy::ScoutLanczos | Strategy::ScoutKde => Some(ScoutMethod::Lanczos),
        Strategy::ScoutKs => Some(ScoutMethod::KrylovSchurRestarted),
        _ => None,
    }
}

/// Stage 1 and 2: spectrum estimate and contour construction.
fn build_contours(
    inst: &BenchInstance,
    strategy: Strategy,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<Vec<Contour>> {
    let m = inst.truth.m.max(inst.truth.eigenvalues.len());
    match strategy {
        Strategy::DeepContour => {
            let pred = match &cfg.prediction {
                Some(p) => p.clone(),
                None => noisy_oracle_predict(&inst.truth, cfg.noise, seed, &inst.problem_id)?,
            };
            Ok(construct_contours(&pred, &cfg.kde)?.1)
        }
        Strategy::OracleKde => {
            let pred = SpectrumPrediction::new(inst.truth.eigenvalues.clone(), PredictionSource::NoisyOracle, &inst.problem_id)?;
            Ok(construct_contours(&pred, &cfg.kde)?.1)
        }
        Strategy::Random => Ok(random_contours(&inst.truth, seed)?.contours),
        Strategy::ScoutKde => {
            let ritz = scout(&inst.pencil, ScoutMethod::Lanczos, cfg.scout_k, m, seed)?;
            Ok(construct_contours(&ritz_as_prediction(&ritz, &inst.problem_id)?, &cfg.kde)?.1)
        }
        s => {
            let method = scout_method(s).expect("scout strategy");
            let ritz = scout(&inst.pencil, method, cfg.scout_k, m, seed)?;
            let margin = match cfg.scout_margin {
                Some(f) => f,
                None => calibrate_margin(&ritz, &inst.truth, cfg.margin_step)?,
            };
            Ok(vec![scout_contour(&ritz, margin)?.contour])
        }
    }
}

/// Upper bound on calibration retries beyond the containment factor.
const MAX_CAPTURE_STEPS: usize = 40;

/// Runs one strategy on an in-memory instance.
///
/// With a calibrated scout margin the factor starts at the smallest box that
/// contains the truth and grows by `margin_step` until the solve captures every
/// target; only the final attempt is timed.
pub fn run_pipeline_on(
    inst: &BenchInstance,
    strategy: Strategy,
    tol: f64,
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<BenchRecord> {
    let solver = cfg.solver.with_tol(tol);
    let calibrated_scout = scout_method(strategy).is_some() && strategy != Strategy::ScoutKde && cfg.scout_margin.is_none();
    if !calibrated_scout {
        let t0 = Instant::now();
        let contours = build_contours(inst, strategy, cfg, seed)?;
        let prep_time = t0.elapsed().as_secs_f64();
        return Ok(solve_and_record(inst, strategy, tol, &solver, cfg, seed, &contours, prep_time));
    }

    let m = inst.truth.m.max(inst.truth.eigenvalues.len());
    let t0 = Instant::now();
    let ritz = scout(&inst.pencil, scout_method(strategy).expect("scout strategy"), cfg.scout_k, m, seed)?;
    let scout_time = t0.elapsed().as_secs_f64();
    let mut factor = calibrate_margin(&ritz, &inst.truth, cfg.margin_step)?;
    let mut record = None;
    for _ in 0..=MAX_CAPTURE_STEPS {
        let t1 = Instant::now();
        let contours = vec![scout_contour(&ritz, factor)?.contour];
        let prep_time = scout_time + t1.elapsed().as_secs_f64();
        let r = solve_and_record(inst, strategy, tol, &solver, cfg, seed, &contours, prep_time);
        let done = r.missed == 0;
        record = Some(r);
        if done {
            break;
        }
        log::debug!("{strategy}: margin {factor} misses targets, widening");
        factor += cfg.margin_step;
    }
    Ok(record.expect("at least one attempt"))
}

#[allow(clippy::too_many_arguments)]
fn solve_and_record(
    inst: &BenchInstance,
    strategy: Strategy,
    tol: f64,
    solver: &SolverConfig,
    cfg: &PipelineConfig,
    seed: u64,
    contours: &[Contour],
    prep_time: f64,
) -> BenchRecord {
    let t1 = Instant::now();
    let res = solve_multi(&inst.pencil, contours, solver, cfg.solver_kind, seed);
    let solve_time = t1.elapsed().as_secs_f64();
    for o in &res.outcomes {
        if let Err(e) = &o.result {
            log::debug!("{strategy}: contour {:?} failed: {e}", o.contour.shape);
        }
    }
    let (found, missed) = match_found(&res.eigenvalues, &inst.truth, cfg.match_tol);
    BenchRecord {
        problem_id: inst.problem_id.clone(),
        strategy,
        tolerance: tol,
        prep_time,
        solve_time,
        total_time: prep_time + solve_time,
        missed,
        found,
        contour_area: contour_area(contours),
        seed,
    }
}

/// Loads a dataset directory (which must carry a truth spectrum) and runs one strategy.
pub fn run_pipeline(dataset: &Path, strategy: Strategy, tol: f64, cfg: &PipelineConfig, seed: u64) -> Result<BenchRecord> {
    let data = read_dataset(dataset)?;
    let truth = data
        .truth
        .ok_or_else(|| Error::Parameter(format!("{}: no truth in meta.json; run `truth` first", dataset.display())))?;
    let inst = BenchInstance {
        problem_id: data.pencil.problem_id().to_string(),
        pencil: data.pencil,
        truth,
    };
    run_pipeline_on(&inst, strategy, tol, cfg, seed)
}

/// Full sweep over instances, strategies and tolerances. Cells run one after
/// another so that timings are not distorted by each other.
pub fn run_bench(
    instances: &[BenchInstance],
    strategies: &[Strategy],
    tols: &[f64],
    cfg: &PipelineConfig,
    seed: u64,
) -> Result<BenchReport> {
    let mut records = Vec::new();
    for inst in instances {
        for &s in strategies {
            for &tol in tols {
                records.push(run_pipeline_on(inst, s, tol, cfg, seed)?);
            }
        }
    }
    Ok(BenchReport::from_records(records))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRun {
    pub seed: u64,
    pub n_contours: usize,
    pub solve_time: f64,
    pub missed: usize,
    pub failed_contours: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub runs: Vec<SensitivityRun>,
    pub m: usize,
    pub mean_time: f64,
    pub stdev_time: f64,
    pub cv_time: f64,
    pub mean_missed_rate: f64,
}

impl SensitivityReport {
    pub fn from_runs(runs: Vec<SensitivityRun>, m: usize) -> Self {
        let times: Vec<f64> = runs.iter().map(|r| r.solve_time).collect();
        let rates: Vec<f64> = runs.iter().map(|r| r.missed as f64 / m.max(1) as f64).collect();
        Self {
            m,
            mean_time: mean(&times),
            stdev_time: stdev(&times),
            cv_time: coefficient_of_variation(&times),
            mean_missed_rate: mean(&rates),
            runs,
        }
    }
}

/// Random-contour sensitivity study over seeds `0..n_seeds` with CIRR.
pub fn run_sensitivity(pencil: &MatrixPencil, truth: &GroundTruth, n_seeds: usize, tol: f64) -> Result<SensitivityReport> {
    if n_seeds < 10 {
        return Err(Error::Parameter(format!("sensitivity needs at least 10 seeds, got {n_seeds}")));
    }
    let seeds: Vec<u64> = (0..n_seeds as u64).collect();
    run_sensitivity_seeds(pencil, truth, &seeds, &SolverConfig::default().with_tol(tol))
}

pub fn run_sensitivity_seeds(
    pencil: &MatrixPencil,
    truth: &GroundTruth,
    seeds: &[u64],
    cfg: &SolverConfig,
) -> Result<SensitivityReport> {
    let m = truth.m.max(truth.eigenvalues.len());
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let t0 = Instant::now();
        let run = match random_contours(truth, seed) {
            Ok(rc) => {
                let res = solve_multi(pencil, &rc.contours, cfg, SolverKind::Cirr, seed);
                let (_, missed) = match_found(&res.eigenvalues, truth, MATCH_TOL);
                SensitivityRun {
                    seed,
                    n_contours: rc.contours.len(),
                    solve_time: t0.elapsed().as_secs_f64(),
                    missed,
                    failed_contours: res.n_failed(),
                }
            }
            Err(e) => {
                log::warn!("seed {seed}: {e}");
                SensitivityRun {
                    seed,
                    n_contours: 0,
                    solve_time: t0.elapsed().as_secs_f64(),
                    missed: m,
                    failed_contours: 0,
                }
            }
        };
        runs.push(run);
    }
    Ok(SensitivityReport::from_runs(runs, m))
}
