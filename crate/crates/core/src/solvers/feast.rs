use std::time::Instant;

use super::cirr::empty_or_missing;
use super::projector::ContourProjector;
use super::{random_block, rayleigh_ritz, EigenResult, SolveStats, SolverConfig};
use crate::contours::Contour;
use crate::error::{Error, Result};
use crate::linalg::{orthonormalize, DenseBlock, MatrixPencil};

/// Filtered subspace iteration from a seeded random start block.
pub fn feast_solve(pencil: &MatrixPencil, contour: &Contour, cfg: &SolverConfig, seed: u64) -> Result<EigenResult> {
    let l = cfg.source_cols_for(contour.expected_count, pencil.dim());
    feast_solve_from(pencil, contour, cfg, &random_block(pencil.dim(), l, seed))
}

/// Filtered subspace iteration `U ← orthonormalize(P U)` from a given start block.
pub fn feast_solve_from(pencil: &MatrixPencil, contour: &Contour, cfg: &SolverConfig, u0: &DenseBlock) -> Result<EigenResult> {
    cfg.validate()?;
    let started = Instant::now();
    let n = pencil.dim();
    let expected = contour.expected_count;
    if u0.n_cols() < expected {
        return Err(Error::Parameter(format!(
            "subspace width {} below expected count {expected}",
            u0.n_cols()
        )));
    }
    let mut proj = ContourProjector::for_contour(pencil, contour, cfg.n_q)?;
    let mut u = u0.clone();
    let mut best = f64::INFINITY;
    let mut saw_inside = false;
    for it in 1..=cfg.max_refine {
        let y = proj.apply(&u)?;
        let q = match orthonormalize(&y, cfg.drop_tol) {
            Ok(q) => q,
            Err(Error::RankZero) => return empty_or_missing(contour, expected, &proj, n, started, it),
            Err(e) => return Err(e),
        };
        let ritz = rayleigh_ritz(pencil, &q, contour)?;
        if !ritz.values.is_empty() {
            saw_inside = true;
            let worst = ritz.residuals.iter().copied().fold(0.0, f64::max);
            best = best.min(worst);
            if worst <= cfg.tol {
                return Ok(EigenResult {
                    contour: *contour,
                    eigenvalues: ritz.values,
                    residuals: ritz.residuals,
                    eigenvectors: ritz.vectors,
                    stats: SolveStats {
                        n_linear_solves: proj.n_linear_solves,
                        n_factorizations: proj.n_factorizations(),
                        iterations: it,
                        elapsed: started.elapsed().as_secs_f64(),
                    },
                });
            }
        }
        u = q;
    }
    if !saw_inside {
        return empty_or_missing(contour, expected, &proj, n, started, cfg.max_refine);
    }
    Err(Error::Convergence {
        iterations: cfg.max_refine,
        best_residual: best,
    })
}
