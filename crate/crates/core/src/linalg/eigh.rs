//! Dense eigensolvers: Hermitian-definite pencils via Cholesky reduction,
//! Householder tridiagonalization and implicit QL; plus a complex shifted QR
//! for small Hessenberg matrices (Arnoldi Ritz values).

use num_complex::Complex64;

use super::dense::{axpy, dotc, norm2, Dense, DenseBlock, Scalar};
use crate::error::{Error, Result};

/// Upper bound on the projected problem size accepted by [`dense_hermitian_gep`].
pub const DENSE_GEP_CAP: usize = 4096;

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub(crate) fn cholesky<T: Scalar>(b: &Dense<T>) -> Result<Dense<T>> {
    let n = b.n_rows();
    let mut l = b.clone();
    for j in 0..n {
        let pivot = l[(j, j)].re();
        if !(pivot > 0.0) {
            return Err(Error::IndefiniteB { index: j, pivot });
        }
        let d = pivot.sqrt();
        l[(j, j)] = T::from_re(d);
        for i in j + 1..n {
            l[(i, j)] = l[(i, j)].scale(1.0 / d);
        }
        let colj: Vec<T> = l.col(j)[j + 1..].to_vec();
        for (off, k) in (j + 1..n).enumerate() {
            let f = -colj[off].conj();
            let ck = &mut l.col_mut(k)[k..];
            axpy(f, &colj[off..], ck);
        }
    }
    for j in 0..n {
        for i in 0..j {
            l[(i, j)] = T::zero();
        }
    }
    Ok(l)
}

/// Solves `L x = b` in place for every column of `rhs`.
fn forward_solve<T: Scalar>(l: &Dense<T>, rhs: &mut Dense<T>) {
    let n = l.n_rows();
    for c in 0..rhs.n_cols() {
        let b = rhs.col_mut(c);
        for j in 0..n {
            b[j] = b[j] / l[(j, j)];
            let bj = b[j];
            if bj != T::zero() {
                let (_, tail) = b.split_at_mut(j + 1);
                axpy(-bj, &l.col(j)[j + 1..], tail);
            }
        }
    }
}

/// Solves `L^H x = y` in place for every column of `rhs`.
fn backward_solve_adjoint<T: Scalar>(l: &Dense<T>, rhs: &mut Dense<T>) {
    let n = l.n_rows();
    for c in 0..rhs.n_cols() {
        let y = rhs.col_mut(c);
        for i in (0..n).rev() {
            let s = dotc(&l.col(i)[i + 1..], &y[i + 1..]);
            y[i] = (y[i] - s) / l[(i, i)];
        }
    }
}

struct Tridiagonal<T> {
    diag: Vec<f64>,
    /// Real, non-negative subdiagonal after phase scaling; last entry is zero.
    off: Vec<f64>,
    phases: Vec<T>,
    /// Scaled Householder vectors `u` with `H = I - u u^H`, acting on rows `k+1..`.
    reflectors: Vec<Vec<T>>,
}

fn tridiagonalize<T: Scalar>(a: &Dense<T>) -> Tridiagonal<T> {
    let n = a.n_rows();
    let mut a = a.clone();
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = a.col(k)[k + 1..].to_vec();
        let r = norm2(&x);
        let tail_norm = norm2(&x[1..]);
        if tail_norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let ph = x[0].phase();
        let beta = -(ph.scale(r));
        let v0 = x[0] - beta;
        let mut u: Vec<T> = x.iter().map(|&xi| xi / v0).collect();
        u[0] = T::from_re(1.0);
        let tau = (r + x[0].abs()) / r;
        let st = tau.sqrt();
        for ui in &mut u {
            *ui = ui.scale(st);
        }
        let m = n - k - 1;
        let off = k + 1;
        // p = A22 u
        let mut p = vec![T::zero(); m];
        for j in 0..m {
            let uj = u[j];
            axpy(uj, &a.col(off + j)[off..], &mut p);
        }
        let kappa = dotc(&u, &p).re();
        let mut w = p;
        axpy(T::from_re(-0.5 * kappa), &u, &mut w);
        for j in 0..m {
            let (wj, uj) = (w[j].conj(), u[j].conj());
            let col = &mut a.col_mut(off + j)[off..];
            axpy(-wj, &u, col);
            axpy(-uj, &w, col);
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
        reflectors.push(u);
    }
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re()).collect();
    let mut off = vec![0.0; n];
    let mut phases = vec![T::from_re(1.0); n];
    for k in 0..n.saturating_sub(1) {
        let e = a[(k + 1, k)];
        off[k] = e.abs();
        phases[k + 1] = phases[k] * e.phase();
    }
    Tridiagonal {
        diag,
        off,
        phases,
        reflectors,
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`e[i] = T[i+1, i]`,
/// `e[n-1] = 0`). Accumulates rotations into `z` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Dense<f64>>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    e[n - 1] = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Convergence {
                        iterations: iter,
                        best_residual: e[l].abs(),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let rows = z.n_rows();
                        for k in 0..rows {
                            let zk1 = z[(k, i + 1)];
                            let zk = z[(k, i)];
                            z[(k, i + 1)] = s * zk + c * zk1;
                            z[(k, i)] = c * zk - s * zk1;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// All eigenvalues (ascending) and optionally eigenvectors of a Hermitian matrix.
pub(crate) fn hermitian_eigen<T: Scalar>(a: &Dense<T>, vectors: bool) -> Result<(Vec<f64>, Option<Dense<T>>)> {
    let n = a.n_rows();
    if n != a.n_cols() {
        return Err(Error::Dimension("hermitian_eigen: matrix not square".into()));
    }
    let tri = tridiagonalize(a);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    let mut z = if vectors { Some(Dense::<f64>::identity(n)) } else { None };
    tql2(&mut d, &mut e, z.as_mut())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vecs = z.map(|z| {
        let mut x = Dense::<T>::from_fn(n, n, |i, j| tri.phases[i].scale(z[(i, order[j])]));
        for (k, u) in tri.reflectors.iter().enumerate().rev() {
            if u.is_empty() {
                continue;
            }
            for j in 0..n {
                let col = &mut x.col_mut(j)[k + 1..];
                let s = dotc(u, col);
                axpy(-s, u, col);
            }
        }
        x
    });
    Ok((values, vecs))
}

/// Generic Hermitian-definite solver `a x = lambda b x`.
pub(crate) fn hermitian_gep_generic<T: Scalar>(
    a: &Dense<T>,
    b: &Dense<T>,
    vectors: bool,
) -> Result<(Vec<f64>, Option<Dense<T>>)> {
    let n = a.n_rows();
    if a.n_cols() != n || b.n_rows() != n || b.n_cols() != n {
        return Err(Error::Dimension(format!(
            "dense GEP needs two square matrices of equal size, got {}x{} and {}x{}",
            a.n_rows(),
            a.n_cols(),
            b.n_rows(),
            b.n_cols()
        )));
    }
    let l = cholesky(b)?;
    let mut x = a.clone();
    forward_solve(&l, &mut x);
    let mut c = x.conj_transpose();
    forward_solve(&l, &mut c);
    // Symmetrize away rounding asymmetry.
    for j in 0..n {
        for i in j..n {
            let v = (c[(i, j)] + c[(j, i)].conj()).scale(0.5);
            c[(i, j)] = v;
            c[(j, i)] = v.conj();
        }
        c[(j, j)] = T::from_re(c[(j, j)].re());
    }
    let (values, y) = hermitian_eigen(&c, vectors)?;
    let vecs = y.map(|mut y| {
        backward_solve_adjoint(&l, &mut y);
        y
    });
    Ok((values, vecs))
}

/// Solves the small dense Hermitian-definite problem `a x = lambda b x`.
///
/// Eigenvalues are ascending and eigenvectors are `b`-orthonormal. Real inputs
/// (all imaginary parts zero) run through the real kernels.
pub fn dense_hermitian_gep(a_small: &DenseBlock, b_small: &DenseBlock) -> Result<(Vec<f64>, DenseBlock)> {
    if a_small.n_rows() > DENSE_GEP_CAP {
        return Err(Error::Parameter(format!(
            "dense GEP size {} exceeds cap {}",
            a_small.n_rows(),
            DENSE_GEP_CAP
        )));
    }
    if a_small.is_real() && b_small.is_real() {
        let (vals, vecs) = hermitian_gep_generic(&a_small.to_real(), &b_small.to_real(), true)?;
        Ok((vals, vecs.unwrap().to_complex()))
    } else {
        let (vals, vecs) = hermitian_gep_generic(a_small, b_small, true)?;
        Ok((vals, vecs.unwrap()))
    }
}

/// Eigenvalues only, no size cap; used by the dense oracle.
pub fn dense_hermitian_gep_values(a: &DenseBlock, b: &DenseBlock) -> Result<Vec<f64>> {
    if a.is_real() && b.is_real() {
        Ok(hermitian_gep_generic(&a.to_real(), &b.to_real(), false)?.0)
    } else {
        Ok(hermitian_gep_generic(a, b, false)?.0)
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR.
pub fn hessenberg_eigenvalues(h: &DenseBlock) -> Result<Vec<Complex64>> {
    let n = h.n_rows();
    let mut h = h.clone();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(out);
    }
    let scale = h.max_abs().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        // Deflate negligible subdiagonal entries.
        for i in 1..=hi {
            let thresh = f64::EPSILON * (h[(i, i)].norm() + h[(i - 1, i - 1)].norm()).max(f64::EPSILON * scale);
            if h[(i, i - 1)].norm() <= thresh {
                h[(i, i - 1)] = Complex64::new(0.0, 0.0);
            }
        }
        if hi == 0 {
            out[0] = h[(0, 0)];
            break;
        }
        if h[(hi, hi - 1)].norm() == 0.0 {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && h[(lo, lo - 1)].norm() != 0.0 {
            lo -= 1;
        }
        iter += 1;
        if iter > 100 * n {
            return Err(Error::Convergence {
                iterations: iter,
                best_residual: h[(hi, hi - 1)].norm(),
            });
        }
        // Wilkinson shift from the trailing 2x2 block; exceptional shift on stagnation.
        let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        let mu = if iter % 11 == 10 {
            d + Complex64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr * 0.25 - det).sqrt();
            let l1 = tr * 0.5 + disc;
            let l2 = tr * 0.5 - disc;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (x, y) = (h[(k, k)], h[(k + 1, k)]);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (1.0, Complex64::new(0.0, 0.0))
            } else if x.norm() == 0.0 {
                (0.0, y.conj() / y.norm())
            } else {
                (x.norm() / r, (x / x.norm()) * y.conj() / r)
            };
            for j in k..=hi {
                let (p, q) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = p * cs + sn * q;
                h[(k + 1, j)] = -sn.conj() * p + q * cs;
            }
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = lo + off;
            for i in lo..=(k + 2).min(hi) {
                let (p, q) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = p * cs + sn.conj() * q;
                h[(i, k + 1)] = -sn * p + q * cs;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(out)
}
