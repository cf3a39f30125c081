//! Write a pencil as a dataset directory, read it back, and solve from the
//! files alone.
//!
//! ```bash
//! cargo run --example matrix_market_io
//! ```

use contour_eig::contours::{Contour, ContourSource};
use contour_eig::linalg::read_mtx;
use contour_eig::problems::{dense_ground_truth, generate, read_dataset, write_dataset, write_truth, Dataset, GeneratorParams, Grid2D, ProblemKind};
use contour_eig::solvers::{cirr_solve, SolverConfig};

fn main() -> contour_eig::Result<()> {
    let dir = std::env::temp_dir().join("contour-eig-mtx");
    let (pencil, field) = generate(ProblemKind::Thermal, Grid2D::square(12)?, 5, &GeneratorParams::default())?;
    write_dataset(&dir, &Dataset { pencil, field: Some(field), truth: None })?;

    let a = read_mtx(&dir.join("A.mtx"))?;
    println!("A.mtx: {}x{} with {} stored entries", a.n_rows(), a.n_cols(), a.nnz());
    print!("{}", std::fs::read_to_string(dir.join("A.mtx"))?.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("\n...");

    let data = read_dataset(&dir)?;
    let truth = dense_ground_truth(&data.pencil, 4)?;
    write_truth(&dir, &truth)?;
    println!("meta.json:\n{}", std::fs::read_to_string(dir.join("meta.json"))?);

    let e = &truth.eigenvalues;
    let contour = Contour::circle(0.5 * (e[0] + e[3]), 0.5 * (e[3] - e[0]) * 1.05, 4, ContourSource::Manual)?;
    let res = cirr_solve(&data.pencil, &contour, &SolverConfig::default(), 0)?;
    println!("{}", res.to_json()?);
    Ok(())
}
