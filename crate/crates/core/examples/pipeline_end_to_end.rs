//! Every contour strategy on a few instances, with the long-format report
//! written to a temporary directory.
//!
//! ```bash
//! cargo run --release --example pipeline_end_to_end
//! ```

use contour_eig::bench::{run_bench, write_report, BenchInstance, PipelineConfig, Strategy};
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, ProblemKind};

fn main() -> contour_eig::Result<()> {
    let mut instances = Vec::new();
    for (kind, seed) in [(ProblemKind::Thermal, 0), (ProblemKind::Em, 1), (ProblemKind::Plate, 2)] {
        let (pencil, _) = generate(kind, Grid2D::square(25)?, seed, &GeneratorParams::default())?;
        let truth = dense_ground_truth(&pencil, 8)?;
        instances.push(BenchInstance { problem_id: pencil.problem_id().to_string(), pencil, truth });
    }

    let report = run_bench(&instances, &Strategy::ALL, &[1e-4, 1e-10], &PipelineConfig::default(), 42)?;
    println!("{:<22} {:<14} {:>7} {:>8} {:>8} {:>6}", "problem", "strategy", "tol", "prep", "solve", "missed");
    for r in &report.records {
        println!(
            "{:<22} {:<14} {:>7.0e} {:>8.4} {:>8.4} {:>6}",
            r.problem_id, r.strategy.name(), r.tolerance, r.prep_time, r.solve_time, r.missed
        );
    }
    for s in &report.speedups {
        println!("vs {:<14} tol {:.0e}: solver speedup mean {:.2} median {:.2}", s.baseline.name(), s.tolerance, s.solver_mean, s.solver_median);
    }

    let dir = std::env::temp_dir().join("contour-eig-report");
    write_report(&dir, &report)?;
    println!("report written to {}", dir.display());
    Ok(())
}
