use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contour_eig::bench::{run_bench, write_report, BenchInstance, BenchReport, PipelineConfig, Strategy};
use contour_eig::contours::{
    calibrate_margin, construct_contours, random_contours, read_contours, scout, scout_contour, write_contours, KdeParams,
    RitzEstimate, ScoutMethod,
};
use contour_eig::predictor::{load_prediction, noisy_oracle_predict, SpectrumPrediction};
use contour_eig::problems::{dense_ground_truth, generate, read_dataset, write_dataset, write_truth, Dataset, GeneratorParams, Grid2D, ProblemKind};
use contour_eig::solvers::{solve_multi, write_eigenvectors, SolverConfig, SolverKind};
use contour_eig::{Error, Result};

#[derive(Parser)]
#[command(name = "contour-bench", version, about = "Contour-integral eigensolver pipeline and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ContourStrategy {
    Kde,
    Scout,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a FEM pencil and write it as a dataset directory.
    Gen {
        #[arg(long)]
        problem: ProblemKind,
        #[arg(long, default_value_t = 30)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        variance: f64,
        #[arg(long, default_value_t = 0.2)]
        length_scale: f64,
    },
    /// Compute the dense reference spectrum and store it in meta.json.
    Truth {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        m_frac: f64,
        /// Lower bound on the number of wanted eigenvalues.
        #[arg(long, default_value_t = 4)]
        m_min: usize,
    },
    /// Run a Krylov scout on the shift-and-invert operator.
    Scout {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "lanczos")]
        method: ScoutMethod,
        #[arg(long, default_value_t = 60)]
        k: usize,
        /// Number of Ritz values kept; defaults to the truth count.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build integration contours.
    Contour {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "kde")]
        strategy: ContourStrategy,
        #[arg(long, default_value_t = 10)]
        nmin: usize,
        #[arg(long, default_value_t = 50)]
        nmax: usize,
        #[arg(long, default_value_t = 10.0)]
        w: f64,
        #[arg(long, default_value_t = 0.5)]
        margin: f64,
        /// Prediction JSON; without it the noisy-oracle stub is used.
        #[arg(long)]
        prediction: Option<PathBuf>,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        /// Ritz JSON written by `scout`; computed on the fly otherwise.
        #[arg(long)]
        ritz: Option<PathBuf>,
        /// Fixed scout safety factor; calibrated against the truth when omitted.
        #[arg(long)]
        safety: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve inside the given contours.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        contours: PathBuf,
        #[arg(long, default_value = "cirr")]
        solver: SolverKind,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 32)]
        nq: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Binary eigenvector sidecar, one file per contour with the index appended.
        #[arg(long)]
        vectors: Option<PathBuf>,
    },
    /// Full strategy sweep over dataset directories.
    Bench {
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-4,1e-7,1e-10,1e-12")]
        tols: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "deepcontour,scout-arnoldi,scout-lanczos,scout-ks,scout+kde,random,oracle-kde")]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 60)]
        k: usize,
        #[arg(long, default_value_t = 0.01)]
        noise: f64,
        /// Directory of prediction files named `<problem_id>.json`.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long, default_value = "cirr")]
        solver: SolverKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute aggregates from a report's records and emit CSV + JSON.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_with_truth(dir: &Path) -> Result<(Dataset, contour_eig::problems::GroundTruth)> {
    let data = read_dataset(dir)?;
    let truth = data
        .truth
        .clone()
        .ok_or_else(|| Error::Parameter(format!("{}: no truth in meta.json; run `truth` first", dir.display())))?;
    Ok((data, truth))
}

fn check_prediction(pred: &SpectrumPrediction, problem_id: &str) -> Result<()> {
    if pred.problem_id != problem_id {
        return Err(Error::Validation(format!(
            "prediction is for `{}`, dataset is `{problem_id}`",
            pred.problem_id
        )));
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parameter(e.to_string()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { problem, grid, seed, out, variance, length_scale } => {
            let params = GeneratorParams { variance, length_scale, ..GeneratorParams::default() };
            let (pencil, field) = generate(problem, Grid2D::square(grid)?, seed, &params)?;
            log::info!("{}: n = {}", pencil.problem_id(), pencil.dim());
            write_dataset(&out, &Dataset { pencil, field: Some(field), truth: None })?;
        }
        Command::Truth { input, m_frac, m_min } => {
            if !(m_frac > 0.0 && m_frac <= 1.0) {
                return Err(Error::Parameter(format!("--m-frac must lie in (0, 1], got {m_frac}")));
            }
            let data = read_dataset(&input)?;
            let n = data.pencil.dim();
            let m = ((m_frac * n as f64).round() as usize).max(m_min).min(n);
            let truth = dense_ground_truth(&data.pencil, m)?;
            write_truth(&input, &truth)?;
            println!("{}", to_json(&truth.eigenvalues)?);
        }
        Command::Scout { input, method, k, m, seed, out } => {
            let data = read_dataset(&input)?;
            let m = m.or(data.truth.as_ref().map(|t| t.m)).ok_or_else(|| Error::Parameter("--m required without truth".into()))?;
            let ritz = scout(&data.pencil, method, k, m, seed)?;
            emit(&out, &to_json(&ritz)?)?;
        }
        Command::Contour { input, strategy, nmin, nmax, w, margin, prediction, noise, ritz, safety, seed, out } => {
            let data = read_dataset(&input)?;
            let pid = data.pencil.problem_id().to_string();
            let contours = match strategy {
                ContourStrategy::Kde => {
                    let pred = match prediction {
                        Some(p) => {
                            let pred = load_prediction(&p)?;
                            check_prediction(&pred, &pid)?;
                            pred
                        }
                        None => {
                            let truth = data.truth.as_ref().ok_or_else(|| {
                                Error::Parameter("no --prediction and no truth for the noisy-oracle stub".into())
                            })?;
                            noisy_oracle_predict(truth, noise, seed, &pid)?
                        }
                    };
                    construct_contours(&pred, &KdeParams { n_min: nmin, n_max: nmax, w, margin })?.1
                }
                ContourStrategy::Scout => {
                    let ritz: RitzEstimate = match ritz {
                        Some(p) => {
                            let text = fs::read_to_string(&p)?;
                            serde_json::from_str(&text).map_err(|e| Error::Format {
                                source_name: p.display().to_string(),
                                line: e.line(),
                                msg: e.to_string(),
                            })?
                        }
                        None => {
                            let m = data.truth.as_ref().map(|t| t.m).ok_or_else(|| Error::Parameter("scout needs truth or --ritz".into()))?;
                            scout(&data.pencil, ScoutMethod::Lanczos, 60, m, seed)?
                        }
                    };
                    let factor = match (safety, &data.truth) {
                        (Some(f), _) => f,
                        (None, Some(t)) => calibrate_margin(&ritz, t, 0.05)?,
                        (None, None) => return Err(Error::Parameter("--safety required without truth".into())),
                    };
                    let sc = scout_contour(&ritz, factor)?;
                    if let Some(w) = sc.warning {
                        log::warn!("{w}");
                    }
                    vec![sc.contour]
                }
                ContourStrategy::Random => {
                    let (_, truth) = load_with_truth(&input)?;
                    random_contours(&truth, seed)?.contours
                }
            };
            write_contours(&out, &contours)?;
            log::info!("{} contours written to {}", contours.len(), out.display());
        }
        Command::Solve { input, contours, solver, tol, nq, seed, out, vectors } => {
            let data = read_dataset(&input)?;
            let contours = read_contours(&contours)?;
            let cfg = SolverConfig { n_q: nq, ..SolverConfig::default() }.with_tol(tol);
            let res = solve_multi(&data.pencil, &contours, &cfg, solver, seed);
            emit(&out, &res.to_json()?)?;
            if let Some(base) = vectors {
                for (i, o) in res.outcomes.iter().enumerate() {
                    if let Ok(r) = &o.result {
                        write_eigenvectors(&PathBuf::from(format!("{}.{i}", base.display())), &r.eigenvectors)?;
                    }
                }
            }
            if let Some(e) = res.outcomes.into_iter().find_map(|o| o.result.err()) {
                return Err(e);
            }
        }
        Command::Bench { input, tols, strategies, k, noise, predictions, solver, seed, out } => {
            let mut instances = Vec::new();
            let mut per_instance_pred = Vec::new();
            for dir in &input {
                let (data, truth) = load_with_truth(dir)?;
                let pid = data.pencil.problem_id().to_string();
                let pred = match &predictions {
                    Some(pdir) => {
                        let p = load_prediction(&pdir.join(format!("{pid}.json")))?;
                        check_prediction(&p, &pid)?;
                        Some(p)
                    }
                    None => None,
                };
                per_instance_pred.push(pred);
                instances.push(BenchInstance { problem_id: pid, pencil: data.pencil, truth });
            }
            let base = PipelineConfig { scout_k: k, noise, solver_kind: solver, ..PipelineConfig::default() };
            let mut records = Vec::new();
            for (inst, pred) in instances.iter().zip(per_instance_pred) {
                let cfg = PipelineConfig { prediction: pred, ..base.clone() };
                records.extend(run_bench(std::slice::from_ref(inst), &strategies, &tols, &cfg, seed)?.records);
            }
            let report = BenchReport::from_records(records);
            write_report(&out, &report)?;
            for s in &report.speedups {
                println!(
                    "{} tol {:e}: e2e {:.2} (median {:.2}), solver {:.2} (median {:.2}) over {} pairs",
                    s.baseline, s.tolerance, s.e2e_mean, s.e2e_median, s.solver_mean, s.solver_median, s.n_pairs
                );
            }
        }
        Command::Report { input, out } => {
            let text = fs::read_to_string(&input)?;
            let report = BenchReport::from_records(BenchReport::from_json(&text, &input.display().to_string())?.records);
            write_report(&out, &report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
