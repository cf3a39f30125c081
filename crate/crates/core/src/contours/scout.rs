//! Shift-and-invert Krylov scouting and bounding-box contours.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Contour, ContourSource};
use crate::error::{Error, Result};
use crate::linalg::dense::{axpy, dotc, norm2};
use crate::linalg::eigh::hermitian_eigen;
use crate::linalg::{hessenberg_eigenvalues, shifted_factorize, DenseBlock, MatrixPencil, ShiftedFactorization};
use crate::problems::GroundTruth;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoutMethod {
    Arnoldi,
    Lanczos,
    KrylovSchurRestarted,
}

impl FromStr for ScoutMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arnoldi" => Ok(Self::Arnoldi),
            "lanczos" => Ok(Self::Lanczos),
            "krylov-schur-restarted" | "krylov-schur" | "ks" => Ok(Self::KrylovSchurRestarted),
            _ => Err(Error::Parameter(format!("unknown scout method `{s}`"))),
        }
    }
}

impl fmt::Display for ScoutMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::Arnoldi => "arnoldi",
            Self::Lanczos => "lanczos",
            Self::KrylovSchurRestarted => "krylov-schur-restarted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RitzEstimate {
    pub method: ScoutMethod,
    pub k_iters: usize,
    /// Approximate eigenvalues of the pencil, ascending.
    pub ritz_values: Vec<f64>,
    pub elapsed: f64,
}

/// The operator `A⁻¹B` through one factorization of `0·B - A = -A`.
struct Operator<'a> {
    pencil: &'a MatrixPencil,
    fac: ShiftedFactorization,
}

impl Operator<'_> {
    fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut bv = self.pencil.b().matvec(v)?;
        self.fac.solve_in_place(&mut bv)?;
        bv.iter_mut().for_each(|x| *x = -*x);
        Ok(bv)
    }

    fn b(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.pencil.b().matvec(v).expect("square pencil")
    }
}

/// Krylov basis with an explicit projected matrix `H = Qᴴ M T Q`, where `M`
/// is `B` (B-inner product) or the identity.
struct Basis {
    q: Vec<Vec<Complex64>>,
    mq: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
    b_inner: bool,
    hermitian: bool,
}

impl Basis {
    fn new(b_inner: bool, hermitian: bool) -> Self {
        Self {
            q: Vec::new(),
            mq: Vec::new(),
            h: Vec::new(),
            b_inner,
            hermitian,
        }
    }

    fn len(&self) -> usize {
        self.q.len()
    }

    fn m_of(&self, op: &Operator, v: &[Complex64]) -> Vec<Complex64> {
        if self.b_inner { op.b(v) } else { v.to_vec() }
    }

    fn push(&mut self, v: Vec<Complex64>, mv: Vec<Complex64>) {
        self.q.push(v);
        self.mq.push(mv);
        let n = self.q.len();
        for row in &mut self.h {
            row.resize(n, Complex64::new(0.0, 0.0));
        }
        self.h.push(vec![Complex64::new(0.0, 0.0); n]);
    }

    /// Orthogonalizes `T q_last` against the basis; returns the next vector
    /// or `None` when the Krylov space became invariant.
    fn expand(&mut self, op: &Operator) -> Result<Option<(Vec<Complex64>, Vec<Complex64>, f64)>> {
        let j = self.len() - 1;
        let mut w = op.apply(&self.q[j])?;
        let scale = norm2(&w);
        let mut coef = vec![Complex64::new(0.0, 0.0); j + 1];
        for _ in 0..2 {
            for i in 0..=j {
                let c = dotc(&self.mq[i], &w);
                coef[i] += c;
                axpy(-c, &self.q[i], &mut w);
            }
        }
        for i in 0..=j {
            self.h[i][j] = coef[i];
            if self.hermitian {
                self.h[j][i] = coef[i].conj();
            }
        }
        let mw = self.m_of(op, &w);
        let beta = dotc(&w, &mw).re.max(0.0).sqrt();
        if beta <= 1e-12 * scale || beta == 0.0 {
            return Ok(None);
        }
        let inv = Complex64::new(1.0 / beta, 0.0);
        w.iter_mut().for_each(|x| *x *= inv);
        let mw: Vec<Complex64> = mw.into_iter().map(|x| x * inv).collect();
        Ok(Some((w, mw, beta)))
    }

    fn push_next(&mut self, w: Vec<Complex64>, mw: Vec<Complex64>, beta: f64) {
        let j = self.len() - 1;
        self.push(w, mw);
        self.h[j + 1][j] = Complex64::new(beta, 0.0);
        if self.hermitian {
            self.h[j][j + 1] = Complex64::new(beta, 0.0);
        }
    }

    fn h_dense(&self) -> DenseBlock {
        let n = self.len();
        DenseBlock::from_fn(n, n, |i, j| self.h[i][j])
    }
}

fn random_start(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(&mut rng), 0.0))
        .collect()
}

fn start_basis(op: &Operator, b_inner: bool, hermitian: bool, seed: u64) -> Basis {
    let mut basis = Basis::new(b_inner, hermitian);
    let v = random_start(op.pencil.dim(), seed);
    let mv = basis.m_of(op, &v);
    let nrm = dotc(&v, &mv).re.sqrt();
    let inv = Complex64::new(1.0 / nrm, 0.0);
    basis.push(v.iter().map(|x| x * inv).collect(), mv.iter().map(|x| x * inv).collect());
    basis
}

/// Hermitian Ritz pairs of the projected matrix, sorted by descending θ.
fn hermitian_ritz(h: &DenseBlock) -> Result<(Vec<f64>, DenseBlock)> {
    let sym = DenseBlock::from_fn(h.n_rows(), h.n_cols(), |i, j| 0.5 * (h[(i, j)] + h[(j, i)].conj()));
    let (vals, vecs) = hermitian_eigen(&sym, true)?;
    let vecs = vecs.expect("vectors requested");
    let order: Vec<usize> = (0..vals.len()).rev().collect();
    Ok((order.iter().map(|&i| vals[i]).collect(), vecs.select_columns(&order)))
}

fn invert_top(thetas: impl IntoIterator<Item = f64>, m: usize) -> Vec<f64> {
    let mut t: Vec<f64> = thetas.into_iter().filter(|t| *t != 0.0).collect();
    t.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    t.truncate(m);
    let mut lam: Vec<f64> = t.into_iter().map(|t| 1.0 / t).collect();
    lam.sort_by(f64::total_cmp);
    lam
}

/// Runs `k_iters` shift-and-invert Krylov steps at σ = 0 and returns the
/// `m` Ritz values of largest magnitude of `A⁻¹B`, mapped back to `λ = 1/θ`.
pub fn scout(pencil: &MatrixPencil, method: ScoutMethod, k_iters: usize, m: usize, seed: u64) -> Result<RitzEstimate> {
    if m == 0 || k_iters < m {
        return Err(Error::Parameter(format!("scout needs 1 <= m <= k_iters, got m = {m}, k = {k_iters}")));
    }
    let started = Instant::now();
    let fac = shifted_factorize(pencil, Complex64::new(0.0, 0.0))?;
    let op = Operator { pencil, fac };
    let k = k_iters.min(pencil.dim());
    let ritz_values = match method {
        ScoutMethod::Lanczos => {
            let mut basis = start_basis(&op, true, true, seed);
            while basis.len() <= k {
                match basis.expand(&op)? {
                    Some((w, mw, beta)) if basis.len() < k => basis.push_next(w, mw, beta),
                    _ => break,
                }
            }
            invert_top(hermitian_ritz(&basis.h_dense())?.0, m)
        }
        ScoutMethod::Arnoldi => {
            let mut basis = start_basis(&op, false, false, seed);
            while basis.len() <= k {
                match basis.expand(&op)? {
                    Some((w, mw, beta)) if basis.len() < k => basis.push_next(w, mw, beta),
                    _ => break,
                }
            }
            let theta = hessenberg_eigenvalues(&basis.h_dense())?;
            let mut t = theta;
            t.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
            t.truncate(m);
            let mut lam: Vec<f64> = t.into_iter().filter(|t| t.norm() > 0.0).map(|t| (1.0 / t).re).collect();
            lam.sort_by(f64::total_cmp);
            lam
        }
        ScoutMethod::KrylovSchurRestarted => thick_restart(&op, k, m, seed)?,
    };
    Ok(RitzEstimate {
        method,
        k_iters,
        ritz_values,
        elapsed: started.elapsed().as_secs_f64(),
    })
}

/// Thick-restart Lanczos: grow to `2m` vectors, keep the `m` wanted Ritz
/// vectors plus the residual direction, repeat until `k` operator applications.
fn thick_restart(op: &Operator, k: usize, m: usize, seed: u64) -> Result<Vec<f64>> {
    let cap = (2 * m).max(m + 1);
    let mut basis = start_basis(op, true, true, seed);
    let mut applied = 0;
    while applied < k {
        let next = basis.expand(op)?;
        applied += 1;
        let Some((w, mw, beta)) = next else { break };
        if applied == k {
            break;
        }
        if basis.len() < cap {
            basis.push_next(w, mw, beta);
            continue;
        }
        let p = basis.len();
        let (theta, y) = hermitian_ritz(&basis.h_dense())?;
        let n = basis.q[0].len();
        let mut q = Vec::with_capacity(m + 1);
        let mut mq = Vec::with_capacity(m + 1);
        for c in 0..m {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            let mut mv = vec![Complex64::new(0.0, 0.0); n];
            for r in 0..p {
                axpy(y[(r, c)], &basis.q[r], &mut v);
                axpy(y[(r, c)], &basis.mq[r], &mut mv);
            }
            q.push(v);
            mq.push(mv);
        }
        let mut fresh = Basis::new(true, true);
        for (v, mv) in q.into_iter().zip(mq) {
            fresh.push(v, mv);
        }
        for c in 0..m {
            fresh.h[c][c] = Complex64::new(theta[c], 0.0);
        }
        fresh.push(w, mw);
        for c in 0..m {
            let s = y[(p - 1, c)] * beta;
            fresh.h[m][c] = s;
            fresh.h[c][m] = s.conj();
        }
        basis = fresh;
    }
    let (theta, _) = hermitian_ritz(&basis.h_dense())?;
    Ok(invert_top(theta, m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoutContour {
    pub contour: Contour,
    /// Set when the Ritz interval was degenerate and widened artificially.
    pub warning: Option<String>,
}

fn ritz_bounds(ritz: &RitzEstimate) -> Result<(f64, f64, Option<String>)> {
    let v = &ritz.ritz_values;
    let (Some(&lo), Some(&hi)) = (v.iter().min_by(|a, b| a.total_cmp(b)), v.iter().max_by(|a, b| a.total_cmp(b))) else {
        return Err(Error::EmptyPrediction);
    };
    if hi > lo {
        return Ok((lo, hi, None));
    }
    let width = 1e-6 * if lo != 0.0 { lo.abs() } else { 1.0 };
    let msg = format!("degenerate Ritz interval at {lo}; widened to {width:e}");
    log::warn!("{msg}");
    Ok((lo - 0.5 * width, lo + 0.5 * width, Some(msg)))
}

/// Axis-aligned box around the Ritz values, widened by `margin_factor`, with
/// imaginary half-height one tenth of the width and aspect ratio at most 5.
pub fn scout_contour(ritz: &RitzEstimate, margin_factor: f64) -> Result<ScoutContour> {
    if !(margin_factor >= 1.0) {
        return Err(Error::Parameter(format!("margin factor must be >= 1, got {margin_factor}")));
    }
    let (lo, hi, warning) = ritz_bounds(ritz)?;
    let ext = 0.5 * (margin_factor - 1.0) * (hi - lo);
    let (re_min, re_max) = (lo - ext, hi + ext);
    let width = re_max - re_min;
    let half_height = (width / 10.0).max(width / 10.0 * (1.0 + 1e-15));
    let contour = Contour::rect(re_min, re_max, -half_height, half_height, ritz.ritz_values.len(), ContourSource::Scout)?;
    Ok(ScoutContour { contour, warning })
}

/// Smallest factor `1 + k·step` whose scout box covers every truth value.
pub fn calibrate_margin(ritz: &RitzEstimate, truth: &GroundTruth, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::Parameter(format!("calibration step must be positive, got {step}")));
    }
    let (lo, hi, _) = ritz_bounds(ritz)?;
    let width = hi - lo;
    let (Some(&t_lo), Some(&t_hi)) = (truth.eigenvalues.first(), truth.eigenvalues.last()) else {
        return Ok(1.0);
    };
    let slack = 1e-12 * width;
    let need = (lo - t_lo).max(t_hi - hi).max(0.0);
    // Jump close to the answer, then walk the grid.
    let mut k = ((2.0 * need / width) / step).floor().max(0.0) as u64;
    k = k.saturating_sub(2);
    loop {
        let ext = 0.5 * (k as f64 * step) * width;
        if lo - ext <= t_lo + slack && hi + ext >= t_hi - slack {
            return Ok(1.0 + k as f64 * step);
        }
        k += 1;
    }
}
