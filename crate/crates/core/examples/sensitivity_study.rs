//! Knowledge-aware random contours: solve-time spread and missed rate over seeds.
//!
//! ```bash
//! cargo run --release --example sensitivity_study -- 40
//! ```

use contour_eig::bench::run_sensitivity;
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, ProblemKind};

fn main() -> contour_eig::Result<()> {
    let n_seeds: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let (pencil, _) = generate(ProblemKind::Thermal, Grid2D::square(30)?, 0, &GeneratorParams::default())?;
    let truth = dense_ground_truth(&pencil, 9)?;

    let report = run_sensitivity(&pencil, &truth, n_seeds, 1e-10)?;
    for r in report.runs.iter().take(10) {
        println!("seed {:>3}: {:>2} contours  {:.3}s  missed {}/{}", r.seed, r.n_contours, r.solve_time, r.missed, report.m);
    }
    println!(
        "{} seeds: mean {:.3}s  stdev {:.3}s  CV {:.2}  mean missed rate {:.2}",
        report.runs.len(),
        report.mean_time,
        report.stdev_time,
        report.cv_time,
        report.mean_missed_rate
    );
    Ok(())
}
