use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar field shared by the real and complex dense kernels.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self;
    fn from_re(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn abs(self) -> f64;
    fn abs_sq(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn to_c64(self) -> Complex64;
    /// Unit-modulus phase of `self` (1 for zero).
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn phase(self) -> Self {
        let r = self.norm();
        if r == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / r
        }
    }
}

/// Column-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<T>,
}

/// Complex dense block; the workhorse for source blocks, moments and subspace bases.
pub type DenseBlock = Dense<Complex64>;

impl<T: Scalar> Dense<T> {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Dense {
            n_rows,
            n_cols,
            values: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::from_re(1.0);
        }
        m
    }

    /// Wraps column-major values.
    pub fn from_col_major(n_rows: usize, n_cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::Dimension(format!(
                "{} values for a {}x{} block",
                values.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(Dense { n_rows, n_cols, values })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for j in 0..n_cols {
            for i in 0..n_rows {
                values.push(f(i, j));
            }
        }
        Dense { n_rows, n_cols, values }
    }

    pub fn from_columns(n_rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        let mut values = Vec::with_capacity(n_rows * cols.len());
        for c in cols {
            if c.len() != n_rows {
                return Err(Error::Dimension("column length mismatch".into()));
            }
            values.extend_from_slice(c);
        }
        Ok(Dense {
            n_rows,
            n_cols: cols.len(),
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.values[j * self.n_rows..(j + 1) * self.n_rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        (0..self.n_cols).map(move |j| self.col(j))
    }

    /// Keeps the listed columns in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.n_rows * idx.len());
        for &j in idx {
            values.extend_from_slice(self.col(j));
        }
        Dense {
            n_rows: self.n_rows,
            n_cols: idx.len(),
            values,
        }
    }

    /// Horizontal concatenation.
    pub fn hstack(blocks: &[&Dense<T>]) -> Result<Self> {
        let n_rows = blocks.first().map_or(0, |b| b.n_rows);
        let mut values = Vec::new();
        let mut n_cols = 0;
        for b in blocks {
            if b.n_rows != n_rows {
                return Err(Error::Dimension("hstack: row count mismatch".into()));
            }
            values.extend_from_slice(&b.values);
            n_cols += b.n_cols;
        }
        Ok(Dense { n_rows, n_cols, values })
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Dense<T>) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::Dimension(format!(
                "matmul {}x{} by {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut out = Self::zeros(self.n_rows, other.n_cols);
        for j in 0..other.n_cols {
            let oc = out.col_mut(j);
            for k in 0..self.n_cols {
                let b = other[(k, j)];
                if b == T::zero() {
                    continue;
                }
                axpy(b, self.col(k), oc);
            }
        }
        Ok(out)
    }

    /// `self^H * other`.
    pub fn adjoint_mul(&self, other: &Dense<T>) -> Result<Self> {
        if self.n_rows != other.n_rows {
            return Err(Error::Dimension(format!(
                "adjoint_mul {}x{} by {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        Ok(Self::from_fn(self.n_cols, other.n_cols, |i, j| dotc(self.col(i), other.col(j))))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &Dense<T>) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension("sub: shape mismatch".into()));
        }
        Ok(Dense {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn scaled(&self, s: T) -> Self {
        Dense {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|&v| v * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: T, other: &Dense<T>) -> Result<()> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension("add_scaled: shape mismatch".into()));
        }
        axpy(s, &other.values, &mut self.values);
        Ok(())
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        let tol = rel_tol * self.max_abs().max(f64::MIN_POSITIVE);
        (0..self.n_rows).all(|i| (0..=i).all(|j| (self[(i, j)] - self[(j, i)].conj()).abs() <= tol))
    }
}

impl DenseBlock {
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn to_real(&self) -> Dense<f64> {
        Dense {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|v| v.re).collect(),
        }
    }
}

impl Dense<f64> {
    pub fn to_complex(&self) -> DenseBlock {
        Dense {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Dense<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.values[i + j * self.n_rows]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Dense<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.values[i + j * self.n_rows]
    }
}

/// `y += a * x`.
#[inline]
pub(crate) fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// `x^H y`.
#[inline]
pub(crate) fn dotc<T: Scalar>(x: &[T], y: &[T]) -> T {
    let mut acc = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

#[inline]
pub(crate) fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs_sq()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the columns via classical Gram-Schmidt with one full
/// reorthogonalization pass.
///
/// A column is dropped when its norm after orthogonalization falls below
/// `drop_tol` times its original norm.
pub fn orthonormalize(block: &DenseBlock, drop_tol: f64) -> Result<DenseBlock> {
    if block.n_cols() == 0 || block.n_rows() == 0 {
        return Err(Error::Parameter("orthonormalize: empty block".into()));
    }
    let n = block.n_rows();
    let mut kept: Vec<Vec<Complex64>> = Vec::new();
    for col in block.columns() {
        let orig = norm2(col);
        if orig == 0.0 {
            continue;
        }
        let mut v = col.to_vec();
        for _ in 0..2 {
            let coeffs: Vec<Complex64> = kept.iter().map(|q| dotc(q, &v)).collect();
            for (q, c) in kept.iter().zip(coeffs) {
                axpy(-c, q, &mut v);
            }
        }
        let nv = norm2(&v);
        if nv < drop_tol * orig {
            continue;
        }
        for x in &mut v {
            *x /= nv;
        }
        kept.push(v);
    }
    if kept.is_empty() {
        return Err(Error::RankZero);
    }
    DenseBlock::from_columns(n, &kept)
}

/// Householder QR with column pivoting, compact form.
struct PivotedQr {
    /// Reflector vectors, `v_k` stored with `v_k[k] = 1` in rows `k..n`.
    reflectors: Vec<Vec<Complex64>>,
    taus: Vec<Complex64>,
    /// Upper-triangular (trapezoidal) factor, `k x n_cols`, columns in pivoted order.
    r: DenseBlock,
}

fn pivoted_qr(block: &DenseBlock) -> PivotedQr {
    let (n, m) = (block.n_rows(), block.n_cols());
    let mut a = block.clone();
    let kmax = n.min(m);
    let mut col_norms: Vec<f64> = (0..m).map(|j| norm2(a.col(j)).powi(2)).collect();
    let mut reflectors = Vec::with_capacity(kmax);
    let mut taus = Vec::with_capacity(kmax);
    for k in 0..kmax {
        let p = (k..m)
            .max_by(|&x, &y| col_norms[x].partial_cmp(&col_norms[y]).unwrap())
            .unwrap();
        if p != k {
            for i in 0..n {
                a.values.swap(i + k * n, i + p * n);
            }
            col_norms.swap(k, p);
        }
        let x: Vec<Complex64> = a.col(k)[k..].to_vec();
        let xnorm = norm2(&x);
        let mut v = x;
        let tau;
        if xnorm == 0.0 {
            tau = Complex64::new(0.0, 0.0);
            v[0] = Complex64::new(1.0, 0.0);
        } else {
            let alpha = -v[0].phase() * xnorm;
            let v0 = v[0] - alpha;
            for vi in v.iter_mut().skip(1) {
                *vi /= v0;
            }
            v[0] = Complex64::new(1.0, 0.0);
            tau = (alpha - block_first(&a, k)) / alpha;
            // H = I - tau v v^H with tau chosen so that H^H x = alpha e1.
            apply_reflector_left(&mut a, k, &v, tau.conj(), k);
            a[(k, k)] = alpha;
            for i in k + 1..n {
                a[(i, k)] = Complex64::new(0.0, 0.0);
            }
        }
        for j in k + 1..m {
            col_norms[j] = norm2(&a.col(j)[k + 1..]).powi(2);
        }
        reflectors.push(v);
        taus.push(tau);
    }
    let r = DenseBlock::from_fn(kmax, m, |i, j| if i <= j { a[(i, j)] } else { Complex64::new(0.0, 0.0) });
    PivotedQr { reflectors, taus, r }
}

fn block_first(a: &DenseBlock, k: usize) -> Complex64 {
    a[(k, k)]
}

/// Applies `I - tau v v^H` to rows `k..` of columns `from_col..` of `a`.
fn apply_reflector_left(a: &mut DenseBlock, k: usize, v: &[Complex64], tau: Complex64, from_col: usize) {
    let n = a.n_rows();
    for j in from_col..a.n_cols() {
        let col = &mut a.values[j * n + k..(j + 1) * n];
        let s = dotc(v, col) * tau;
        axpy(-s, v, col);
    }
}

impl PivotedQr {
    /// Computes `Q * [u; 0]` for a `k x r` block `u`.
    fn apply_q(&self, n: usize, u: &DenseBlock) -> DenseBlock {
        let mut out = DenseBlock::zeros(n, u.n_cols());
        for j in 0..u.n_cols() {
            out.col_mut(j)[..u.n_rows()].copy_from_slice(u.col(j));
        }
        for k in (0..self.reflectors.len()).rev() {
            apply_reflector_left(&mut out, k, &self.reflectors[k], self.taus[k], 0);
        }
        out
    }
}

/// Singular values and left singular vectors of a small block via one-sided
/// (Hestenes) Jacobi on its columns. Returns `(sigma, u)` sorted descending.
pub(crate) fn jacobi_svd_left(block: &DenseBlock) -> (Vec<f64>, DenseBlock) {
    let mut w = block.clone();
    let m = w.n_cols();
    let n = w.n_rows();
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let (alpha, beta, gamma) = {
                    let cp = w.col(p);
                    let cq = w.col(q);
                    (norm2(cp).powi(2), norm2(cq).powi(2), dotc(cp, cq))
                };
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (sp, sq) = (phase.conj() * s, phase * s);
                for i in 0..n {
                    let a = w.values[i + p * n];
                    let b = w.values[i + q * n];
                    w.values[i + p * n] = a * c - sp * b;
                    w.values[i + q * n] = sq * a + b * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<(f64, usize)> = (0..m).map(|j| (norm2(w.col(j)), j)).collect();
    sig.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let sigma: Vec<f64> = sig.iter().map(|s| s.0).collect();
    let u = DenseBlock::from_fn(n, m, |i, j| {
        let (s, idx) = sig[j];
        if s > 0.0 {
            w[(i, idx)] / s
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    (sigma, u)
}

/// Orthonormal basis of the dominant left singular subspace, keeping
/// singular values `sigma_i >= rel_tol * sigma_max`.
pub fn rank_truncate_svd(block: &DenseBlock, rel_tol: f64) -> Result<DenseBlock> {
    let (basis, _) = rank_truncate_svd_with_values(block, rel_tol)?;
    Ok(basis)
}

/// As [`rank_truncate_svd`], also returning all singular values (descending).
pub fn rank_truncate_svd_with_values(block: &DenseBlock, rel_tol: f64) -> Result<(DenseBlock, Vec<f64>)> {
    if block.n_cols() == 0 || block.n_rows() == 0 {
        return Err(Error::Parameter("rank_truncate_svd: empty block".into()));
    }
    let qr = pivoted_qr(block);
    let (sigma, u) = jacobi_svd_left(&qr.r);
    let smax = sigma.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Err(Error::RankZero);
    }
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] >= rel_tol * smax).collect();
    let basis = qr.apply_q(block.n_rows(), &u.select_columns(&keep));
    Ok((basis, sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_block(n: usize, m: usize, seed: u64) -> DenseBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseBlock::from_fn(n, m, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn gram_deviation(q: &DenseBlock) -> f64 {
        let g = q.adjoint_mul(q).unwrap();
        g.sub(&DenseBlock::identity(q.n_cols())).unwrap().max_abs()
    }

    /// Orthogonal projector onto the column span of an orthonormal block.
    fn projector(q: &DenseBlock) -> DenseBlock {
        q.matmul(&q.conj_transpose()).unwrap()
    }

    #[test]
    fn orthonormal_input_is_preserved() {
        let q = DenseBlock::identity(4).select_columns(&[0, 2]);
        let out = orthonormalize(&q, 1e-10).unwrap();
        assert!(gram_deviation(&out) <= 1e-12);
        assert!(projector(&out).sub(&projector(&q)).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn identical_columns_collapse() {
        let b = random_block(10, 1, 1);
        let two = DenseBlock::hstack(&[&b, &b]).unwrap();
        assert_eq!(orthonormalize(&two, 1e-10).unwrap().n_cols(), 1);
    }

    #[test]
    fn random_block_gram() {
        let b = random_block(50, 8, 7);
        let q = orthonormalize(&b, 1e-10).unwrap();
        assert_eq!(q.n_cols(), 8);
        assert!(gram_deviation(&q) <= 1e-12);
    }

    #[test]
    fn zero_block_is_rank_zero() {
        let z = DenseBlock::zeros(5, 3);
        assert!(matches!(orthonormalize(&z, 1e-10), Err(Error::RankZero)));
        assert!(matches!(rank_truncate_svd(&z, 1e-8), Err(Error::RankZero)));
    }

    #[test]
    fn rank_one_outer_product() {
        let u = random_block(12, 1, 3);
        let v = random_block(5, 1, 4);
        let outer = u.matmul(&v.conj_transpose()).unwrap();
        let q = rank_truncate_svd(&outer, 1e-8).unwrap();
        assert_eq!(q.n_cols(), 1);
        assert!(gram_deviation(&q) <= 1e-12);
    }

    #[test]
    fn orthonormal_input_keeps_all_columns() {
        let q0 = orthonormalize(&random_block(20, 6, 9), 1e-10).unwrap();
        let q = rank_truncate_svd(&q0, 1e-12).unwrap();
        assert_eq!(q.n_cols(), 6);
        assert!(projector(&q).sub(&projector(&q0)).unwrap().max_abs() <= 1e-8);
    }

    #[test]
    fn nearly_dependent_pair_truncates() {
        // Oracle: singular values of [v, v + eps w] from the 2x2 cross-product
        // matrix G = X^H X, whose eigenvalues are sigma^2.
        let v = random_block(15, 1, 11);
        let w = random_block(15, 1, 12);
        let eps = 1e-12;
        let mut second = v.clone();
        second.add_scaled(Complex64::new(eps, 0.0), &w).unwrap();
        let x = DenseBlock::hstack(&[&v, &second]).unwrap();
        let g = x.adjoint_mul(&x).unwrap();
        let (a, d, b) = (g[(0, 0)].re, g[(1, 1)].re, g[(0, 1)].norm());
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d).powi(2) + b * b).sqrt();
        let s_max = (mean + disc).sqrt();
        // The small eigenvalue cancels catastrophically; bound it by eps * |w|.
        let s_min_bound = eps * norm2(w.col(0)) * 1.01;
        assert!(s_min_bound / s_max < 1e-8);
        let (q, sig) = rank_truncate_svd_with_values(&x, 1e-8).unwrap();
        assert_eq!(q.n_cols(), 1);
        assert!((sig[0] - s_max).abs() <= 1e-10 * s_max);
        assert!(sig[1] <= s_min_bound);
    }

    #[test]
    fn jacobi_matches_known_singular_values() {
        let d = DenseBlock::from_fn(3, 3, |i, j| {
            if i == j {
                Complex64::new([3.0, 1.0, 2.0][i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let (s, _) = jacobi_svd_left(&d);
        assert_eq!(s, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn matmul_adjoint() {
        let a = random_block(6, 3, 21);
        let b = random_block(6, 2, 22);
        let lhs = a.adjoint_mul(&b).unwrap();
        let rhs = a.conj_transpose().matmul(&b).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-14);
    }
}
