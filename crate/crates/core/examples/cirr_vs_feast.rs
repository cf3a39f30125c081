//! Solve the same contours with CIRR and FEAST and compare against the dense oracle.
//!
//! ```bash
//! cargo run --release --example cirr_vs_feast
//! ```

use contour_eig::contours::{construct_contours, KdeParams};
use contour_eig::predictor::{PredictionSource, SpectrumPrediction};
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, ProblemKind};
use contour_eig::solvers::{solve_multi, SolverConfig, SolverKind};

fn main() -> contour_eig::Result<()> {
    let (pencil, _) = generate(ProblemKind::Thermal, Grid2D::square(30)?, 3, &GeneratorParams::default())?;
    let truth = dense_ground_truth(&pencil, 9)?;
    let pred = SpectrumPrediction::new(truth.eigenvalues.clone(), PredictionSource::NoisyOracle, pencil.problem_id())?;
    let (_, contours) = construct_contours(&pred, &KdeParams::default())?;
    let cfg = SolverConfig::default().with_tol(1e-10);

    for kind in [SolverKind::Cirr, SolverKind::Feast] {
        let res = solve_multi(&pencil, &contours, &cfg, kind, 1);
        println!(
            "{kind}: {} eigenvalues, {} factorizations, {} solves, {} iterations, {:.3}s",
            res.eigenvalues.len(),
            res.stats.n_factorizations,
            res.stats.n_linear_solves,
            res.stats.iterations,
            res.stats.elapsed
        );
        for (l, r) in res.eigenvalues.iter().zip(&res.residuals) {
            let exact = truth.eigenvalues.iter().min_by(|a, b| (*a - l).abs().total_cmp(&(*b - l).abs())).unwrap();
            println!("  {l:.10}  residual {r:.1e}  rel. error {:.1e}", (l - exact).abs() / exact);
        }
    }
    Ok(())
}
