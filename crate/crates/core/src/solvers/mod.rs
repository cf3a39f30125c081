//! Contour-integral eigensolvers.

mod cirr;
mod feast;
mod multi;
mod projector;
mod result;

pub use cirr::cirr_solve;
pub use feast::{feast_solve, feast_solve_from};
pub use multi::{solve_multi, ContourOutcome, MultiResult, SolverKind};
pub use projector::{apply_projector, ContourProjector};
pub use result::{read_eigenvectors, write_eigenvectors, EigenResult, SolveStats, SolverConfig};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use num_complex::Complex64;

use crate::contours::Contour;
use crate::error::Result;
use crate::linalg::{dense_hermitian_gep, sparse_matmul_block, DenseBlock, MatrixPencil};

pub(crate) fn random_block(n: usize, cols: usize, seed: u64) -> DenseBlock {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseBlock::from_fn(n, cols, |_, _| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
}

/// Ritz pairs inside `contour` and their relative residuals.
pub(crate) struct RitzInside {
    pub values: Vec<f64>,
    pub vectors: DenseBlock,
    pub residuals: Vec<f64>,
}

/// Rayleigh-Ritz on the orthonormal basis `q`, keeping pairs strictly inside the contour.
pub(crate) fn rayleigh_ritz(pencil: &MatrixPencil, q: &DenseBlock, contour: &Contour) -> Result<RitzInside> {
    let aq = sparse_matmul_block(pencil.a(), q)?;
    let bq = sparse_matmul_block(pencil.b(), q)?;
    let a_small = hermitian_part(&q.adjoint_mul(&aq)?);
    let b_small = hermitian_part(&q.adjoint_mul(&bq)?);
    let (theta, y) = dense_hermitian_gep(&a_small, &b_small)?;
    let keep: Vec<usize> = (0..theta.len()).filter(|&i| contour.contains_real(theta[i])).collect();
    let y = y.select_columns(&keep);
    let values: Vec<f64> = keep.iter().map(|&i| theta[i]).collect();
    let vectors = q.matmul(&y)?;
    let ax = aq.matmul(&y)?;
    let bx = bq.matmul(&y)?;
    let residuals = values
        .iter()
        .enumerate()
        .map(|(k, &lam)| {
            let (mut num, mut na, mut nb) = (0.0, 0.0, 0.0);
            for (a, b) in ax.col(k).iter().zip(bx.col(k)) {
                num += (a - b * lam).norm_sqr();
                na += a.norm_sqr();
                nb += b.norm_sqr();
            }
            let den = na.sqrt() + lam.abs() * nb.sqrt();
            if den > 0.0 { num.sqrt() / den } else { num.sqrt() }
        })
        .collect();
    Ok(RitzInside { values, vectors, residuals })
}

fn hermitian_part(m: &DenseBlock) -> DenseBlock {
    DenseBlock::from_fn(m.n_rows(), m.n_cols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}
