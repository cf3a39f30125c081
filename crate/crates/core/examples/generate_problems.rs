//! Assemble the three FEM pencils on one random coefficient field and print
//! the bottom of each spectrum.
//!
//! ```bash
//! cargo run --release --example generate_problems
//! ```

use std::f64::consts::PI;

use contour_eig::problems::{dense_ground_truth, generate, grf_sample, target_count, GeneratorParams, Grid2D, ProblemKind};

fn main() -> contour_eig::Result<()> {
    let grid = Grid2D::square(20)?;
    let params = GeneratorParams::default();

    let field = grf_sample(grid, params.mean, params.variance, params.length_scale, 7)?;
    let (lo, hi) = field.values.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    println!("log-normal field on {}x{}: range [{lo:.3}, {hi:.3}]", grid.nx, grid.ny);

    for kind in [ProblemKind::Thermal, ProblemKind::Em, ProblemKind::Plate] {
        let (pencil, _) = generate(kind, grid, 7, &params)?;
        let m = target_count(pencil.dim()).max(4);
        let truth = dense_ground_truth(&pencil, m)?;
        println!("{:<24} n = {:>4}  nnz(A) = {:>5}  lowest: {:.4?}", pencil.problem_id(), pencil.dim(), pencil.a().nnz(), truth.eigenvalues);
    }

    // Constant coefficients reproduce the continuum fundamental mode.
    let unit = GeneratorParams { variance: 0.0, ..params };
    for n in [10, 20, 40] {
        let (pencil, _) = generate(ProblemKind::Thermal, Grid2D::square(n)?, 0, &unit)?;
        let l = dense_ground_truth(&pencil, 1)?.eigenvalues[0];
        println!("thermal {n}x{n}: lambda_1 = {l:.6}  (2 pi^2 = {:.6})", 2.0 * PI * PI);
    }
    Ok(())
}
