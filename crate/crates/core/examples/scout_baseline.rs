//! Scouting baselines: Ritz estimates from three Krylov methods and the
//! calibrated bounding boxes built from them.
//!
//! ```bash
//! cargo run --release --example scout_baseline
//! ```

use contour_eig::contours::{calibrate_margin, scout, scout_contour, ScoutMethod};
use contour_eig::problems::{dense_ground_truth, generate, GeneratorParams, Grid2D, ProblemKind};

fn main() -> contour_eig::Result<()> {
    let (pencil, _) = generate(ProblemKind::Em, Grid2D::square(30)?, 1, &GeneratorParams::default())?;
    let truth = dense_ground_truth(&pencil, 9)?;
    println!("truth: {:.5?}", truth.eigenvalues);

    for method in [ScoutMethod::Arnoldi, ScoutMethod::Lanczos, ScoutMethod::KrylovSchurRestarted] {
        for k in [15, 30, 60] {
            let ritz = scout(&pencil, method, k, truth.m, 0)?;
            let err = ritz.ritz_values.iter().zip(&truth.eigenvalues).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
            let factor = calibrate_margin(&ritz, &truth, 0.05)?;
            let contour = scout_contour(&ritz, factor)?.contour;
            println!(
                "{method:<24} k = {k:>2}  max rel. error {err:.1e}  margin {factor:.2}  box area {:.3e}  aspect {:.1}",
                contour.area(),
                contour.aspect_ratio()
            );
        }
    }
    Ok(())
}
