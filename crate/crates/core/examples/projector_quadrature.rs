//! Filter a block through the quadrature spectral projector and watch the
//! error fall as nodes are added.
//!
//! ```bash
//! cargo run --example projector_quadrature
//! ```

use contour_eig::contours::{quadrature_for, Contour, ContourSource};
use contour_eig::linalg::{DenseBlock, MatrixPencil, SparseMatrix};
use contour_eig::solvers::apply_projector;

fn main() -> contour_eig::Result<()> {
    let pencil = MatrixPencil::new(SparseMatrix::diagonal(&[1.0, 3.0]), SparseMatrix::identity(2), true, true, "diag")?;
    let circle = Contour::circle(1.0, 1.0, 1, ContourSource::Manual)?;
    let rect = Contour::rect(0.0, 2.0, -1.0, 1.0, 1, ContourSource::Manual)?;

    for (name, contour) in [("circle", circle), ("rect", rect)] {
        println!("{name}:");
        for n_q in [8, 16, 32, 64] {
            let rule = quadrature_for(&contour, n_q)?;
            let p = apply_projector(&pencil, &rule, &DenseBlock::identity(2))?;
            let err = (p[(0, 0)].re - 1.0).abs().max(p[(1, 1)].norm());
            println!("  n_q = {n_q:>2}  P = diag({:.12}, {:.3e})  error {err:.3e}", p[(0, 0)].re, p[(1, 1)].re);
        }
    }
    Ok(())
}
