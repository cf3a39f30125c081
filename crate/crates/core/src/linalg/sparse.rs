use num_complex::Complex64;

use crate::error::{Error, Result};

/// Compressed sparse row matrix with complex entries.
///
/// Real matrices store a zero imaginary part. Column indices within a row
/// are strictly increasing and no `(row, col)` pair is stored twice.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds a matrix from coordinate triplets. Duplicate entries are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n_rows];
        for (i, j, v) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::Dimension(format!(
                    "entry ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            rows[i].push((j, v));
        }
        Ok(Self::from_rows(n_rows, n_cols, rows))
    }

    /// Builds from per-row entry lists (unsorted, possibly duplicated).
    pub(crate) fn from_rows(n_rows: usize, n_cols: usize, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut iter = row.into_iter().peekable();
            while let Some((j, mut v)) = iter.next() {
                while let Some(&(j2, v2)) = iter.peek() {
                    if j2 != j {
                        break;
                    }
                    v += v2;
                    iter.next();
                }
                col_indices.push(j);
                values.push(v);
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Validates raw CSR arrays and wraps them.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 || row_offsets[0] != 0 {
            return Err(Error::Dimension("row_offsets must have length n_rows+1 and start at 0".into()));
        }
        if *row_offsets.last().unwrap() != col_indices.len() || col_indices.len() != values.len() {
            return Err(Error::Dimension("row_offsets[n_rows] must equal the entry count".into()));
        }
        for i in 0..n_rows {
            let (s, e) = (row_offsets[i], row_offsets[i + 1]);
            if s > e {
                return Err(Error::Dimension(format!("row_offsets decreases at row {i}")));
            }
            for k in s..e {
                if col_indices[k] >= n_cols {
                    return Err(Error::Dimension(format!("column index {} out of range", col_indices[k])));
                }
                if k > s && col_indices[k] <= col_indices[k - 1] {
                    return Err(Error::Dimension(format!("row {i}: column indices not strictly increasing")));
                }
            }
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: d.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Iterates `(col, value)` over row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        self.col_indices[s..e].iter().copied().zip(self.values[s..e].iter().copied())
    }

    /// Iterates all stored `(row, col, value)` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        match self.col_indices[s..e].binary_search(&j) {
            Ok(k) => self.values[s + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.n_cols {
            return Err(Error::Dimension(format!(
                "matvec: matrix has {} columns, vector has length {}",
                self.n_cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_rows];
        self.matvec_into(v, &mut out);
        Ok(out)
    }

    /// `out = self * v` without dimension checks.
    pub(crate) fn matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in s..e {
                acc += self.values[k] * v[self.col_indices[k]];
            }
            *o = acc;
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.n_cols];
        for (i, j, v) in self.triplets() {
            rows[j].push((i, v.conj()));
        }
        Self::from_rows(self.n_cols, self.n_rows, rows)
    }

    /// Entrywise check `|a_ij - conj(a_ji)| <= rel_tol * max|a|`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        if self.n_rows != self.n_cols {
            return false;
        }
        let tol = rel_tol * self.max_abs();
        let t = self.conj_transpose();
        let diff = self.linear_combination(Complex64::new(1.0, 0.0), &t, Complex64::new(-1.0, 0.0));
        match diff {
            Ok(d) => d.max_abs() <= tol,
            Err(_) => false,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    /// Returns `alpha * self + beta * other` over the union of both patterns.
    pub fn linear_combination(&self, alpha: Complex64, other: &SparseMatrix, beta: Complex64) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::Dimension(format!(
                "cannot combine {}x{} with {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::with_capacity(self.nnz().max(other.nnz()));
        let mut values = Vec::with_capacity(self.nnz().max(other.nnz()));
        row_offsets.push(0);
        for i in 0..self.n_rows {
            let (mut p, pe) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let (mut q, qe) = (other.row_offsets[i], other.row_offsets[i + 1]);
            while p < pe || q < qe {
                let cp = if p < pe { self.col_indices[p] } else { usize::MAX };
                let cq = if q < qe { other.col_indices[q] } else { usize::MAX };
                if cp == cq {
                    col_indices.push(cp);
                    values.push(alpha * self.values[p] + beta * other.values[q]);
                    p += 1;
                    q += 1;
                } else if cp < cq {
                    col_indices.push(cp);
                    values.push(alpha * self.values[p]);
                    p += 1;
                } else {
                    col_indices.push(cq);
                    values.push(beta * other.values[q]);
                    q += 1;
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); other.n_cols];
        let mut mark = vec![usize::MAX; other.n_cols];
        let mut rows = Vec::with_capacity(self.n_rows);
        for i in 0..self.n_rows {
            let mut pattern = Vec::new();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = Complex64::new(0.0, 0.0);
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            rows.push(pattern.into_iter().map(|j| (j, acc[j])).collect());
        }
        Ok(Self::from_rows(self.n_rows, other.n_cols, rows))
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[f64]) -> Result<Self> {
        if d.len() != self.n_rows {
            return Err(Error::Dimension("scale_rows: length mismatch".into()));
        }
        let mut out = self.clone();
        for i in 0..self.n_rows {
            for k in out.row_offsets[i]..out.row_offsets[i + 1] {
                out.values[k] *= d[i];
            }
        }
        Ok(out)
    }

    /// Row sums of the real parts.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.row(i).map(|(_, v)| v.re).sum()).collect()
    }

    /// Dense row-major copy.
    pub fn to_dense_rows(&self) -> Vec<Vec<Complex64>> {
        let mut out = vec![vec![Complex64::new(0.0, 0.0); self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        self.triplets().map(|(i, j, _)| i.abs_diff(j)).max().unwrap_or(0)
    }

    /// Symmetric permutation `P A P^T` where new index `k` holds old index `perm[k]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Result<Self> {
        if self.n_rows != self.n_cols || perm.len() != self.n_rows {
            return Err(Error::Dimension("permute_symmetric: needs square matrix and full permutation".into()));
        }
        let mut inv = vec![0; perm.len()];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let rows = perm
            .iter()
            .map(|&old| self.row(old).map(|(j, v)| (inv[j], v)).collect())
            .collect();
        Ok(Self::from_rows(self.n_rows, self.n_cols, rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn identity_matvec() {
        let v = vec![c(1.0), c(2.0), c(3.0)];
        assert_eq!(SparseMatrix::identity(3).matvec(&v).unwrap(), v);
    }

    #[test]
    fn zero_matrix_annihilates() {
        let v = vec![c(4.0), Complex64::new(1.0, -2.0)];
        let out = SparseMatrix::zeros(2, 2).matvec(&v).unwrap();
        assert!(out.iter().all(|x| *x == c(0.0)));
    }

    #[test]
    fn permutation_matvec() {
        let p = SparseMatrix::from_triplets(2, 2, [(0, 1, c(1.0)), (1, 0, c(1.0))]).unwrap();
        assert_eq!(p.matvec(&[c(5.0), c(7.0)]).unwrap(), vec![c(7.0), c(5.0)]);
    }

    #[test]
    fn matvec_dimension_error() {
        let err = SparseMatrix::identity(3).matvec(&[c(1.0)]).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let m = SparseMatrix::from_triplets(2, 3, [(0, 2, c(1.0)), (0, 0, c(2.0)), (0, 2, c(3.0))]).unwrap();
        assert_eq!(m.col_indices(), &[0, 2]);
        assert_eq!(m.values(), &[c(2.0), c(4.0)]);
        assert_eq!(m.row_offsets(), &[0, 2, 2]);
    }

    #[test]
    fn from_csr_rejects_unsorted_columns() {
        let err = SparseMatrix::from_csr(1, 3, vec![0, 2], vec![2, 1], vec![c(1.0), c(1.0)]);
        assert!(err.is_err());
    }

    #[test]
    fn matmul_and_combination() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, c(1.0)), (0, 1, c(2.0)), (1, 1, c(3.0))]).unwrap();
        let p = a.matmul(&a).unwrap();
        assert_eq!(p.get(0, 0), c(1.0));
        assert_eq!(p.get(0, 1), c(8.0));
        assert_eq!(p.get(1, 1), c(9.0));
        let d = a.linear_combination(c(2.0), &SparseMatrix::identity(2), c(-1.0)).unwrap();
        assert_eq!(d.get(0, 0), c(1.0));
        assert_eq!(d.get(1, 1), c(5.0));
        assert!(!a.is_hermitian(1e-12));
        let h = a.linear_combination(c(1.0), &a.conj_transpose(), c(1.0)).unwrap();
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn symmetric_permutation_roundtrip() {
        let a = SparseMatrix::from_triplets(3, 3, [(0, 0, c(1.0)), (0, 2, c(5.0)), (2, 1, c(7.0))]).unwrap();
        let perm = [2, 0, 1];
        let pa = a.permute_symmetric(&perm).unwrap();
        for (ni, &oi) in perm.iter().enumerate() {
            for (nj, &oj) in perm.iter().enumerate() {
                assert_eq!(pa.get(ni, nj), a.get(oi, oj));
            }
        }
    }
}
