use std::time::Instant;

use super::projector::ContourProjector;
use super::{random_block, rayleigh_ritz, EigenResult, SolveStats, SolverConfig};
use crate::contours::Contour;
use crate::error::{Error, Result};
use crate::linalg::{rank_truncate_svd, DenseBlock, MatrixPencil};

/// Moment-based Rayleigh-Ritz on one contour.
///
/// Moments use powers of `(z - c)/ρ` with `c`, `ρ` the contour centre and
/// scale; this spans the same space as plain powers of `z` and keeps the
/// stacked block well scaled. Later passes re-project the inside Ritz vectors.
pub fn cirr_solve(pencil: &MatrixPencil, contour: &Contour, cfg: &SolverConfig, seed: u64) -> Result<EigenResult> {
    cfg.validate()?;
    let started = Instant::now();
    let n = pencil.dim();
    let expected = contour.expected_count;
    let l = cfg.source_cols_for(expected, n);
    let mut proj = ContourProjector::for_contour(pencil, contour, cfg.n_q)?;

    let v = random_block(n, l, seed);
    let moments = proj.moments(&v, cfg.n_moments)?;
    let stacked = DenseBlock::hstack(&moments.iter().collect::<Vec<_>>())?;
    let mut basis = match rank_truncate_svd(&stacked, cfg.rank_rel_tol) {
        Ok(q) => q,
        Err(Error::RankZero) => return empty_or_missing(contour, expected, &proj, n, started, 1),
        Err(e) => return Err(e),
    };

    let mut passes = 1;
    let mut ritz = rayleigh_ritz(pencil, &basis, contour)?;
    while passes < cfg.max_refine && ritz.residuals.iter().any(|&r| r > cfg.tol) && !ritz.values.is_empty() {
        let projected = proj.apply(&ritz.vectors)?;
        basis = match rank_truncate_svd(&projected, cfg.rank_rel_tol) {
            Ok(q) => q,
            Err(Error::RankZero) => break,
            Err(e) => return Err(e),
        };
        ritz = rayleigh_ritz(pencil, &basis, contour)?;
        passes += 1;
    }

    let keep: Vec<usize> = (0..ritz.values.len()).filter(|&i| ritz.residuals[i] <= cfg.tol).collect();
    if keep.is_empty() {
        return empty_or_missing(contour, expected, &proj, n, started, passes);
    }
    Ok(EigenResult {
        contour: *contour,
        eigenvalues: keep.iter().map(|&i| ritz.values[i]).collect(),
        residuals: keep.iter().map(|&i| ritz.residuals[i]).collect(),
        eigenvectors: ritz.vectors.select_columns(&keep),
        stats: SolveStats {
            n_linear_solves: proj.n_linear_solves,
            n_factorizations: proj.n_factorizations(),
            iterations: passes,
            elapsed: started.elapsed().as_secs_f64(),
        },
    })
}

pub(crate) fn empty_or_missing(
    contour: &Contour,
    expected: usize,
    proj: &ContourProjector,
    n: usize,
    started: Instant,
    iterations: usize,
) -> Result<EigenResult> {
    if expected > 0 {
        return Err(Error::NoEigenvaluesFound { expected });
    }
    Ok(EigenResult {
        contour: *contour,
        eigenvalues: vec![],
        residuals: vec![],
        eigenvectors: DenseBlock::zeros(n, 0),
        stats: SolveStats {
            n_linear_solves: proj.n_linear_solves,
            n_factorizations: proj.n_factorizations(),
            iterations,
            elapsed: started.elapsed().as_secs_f64(),
        },
    })
}
