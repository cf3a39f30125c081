//! Sparse LU of shifted pencils `zB - A`: reverse Cuthill-McKee preorder,
//! then right-looking elimination with row partial pivoting.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::dense::DenseBlock;
use super::pencil::MatrixPencil;
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Relative pivot threshold below which a shift is treated as singular.
pub const SINGULAR_PIVOT_REL: f64 = 1e-14;

/// Reusable factorization of `zB - A` for repeated multi-column solves.
#[derive(Clone, Debug)]
pub struct ShiftedFactorization {
    shift: Complex64,
    n: usize,
    /// `order[k]` is the original index placed at position `k`.
    order: Vec<usize>,
    /// Row id (in preordered space) chosen as pivot at step `k`.
    pivot_rows: Vec<usize>,
    l_offsets: Vec<usize>,
    l_rows: Vec<usize>,
    l_values: Vec<Complex64>,
    u_offsets: Vec<usize>,
    u_cols: Vec<usize>,
    u_values: Vec<Complex64>,
}

impl ShiftedFactorization {
    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Fill-reducing order applied before elimination.
    pub fn preorder(&self) -> &[usize] {
        &self.order
    }

    /// Pivot rows chosen by partial pivoting, in elimination order.
    pub fn pivot_record(&self) -> &[usize] {
        &self.pivot_rows
    }

    /// Stored entries in both factors.
    pub fn factor_nnz(&self) -> usize {
        self.l_values.len() + self.u_values.len()
    }

    /// Solves in place for a single right-hand side of length `n`.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) -> Result<()> {
        if rhs.len() != self.n {
            return Err(Error::Dimension(format!(
                "solve: factorization is {n}x{n}, rhs has length {}",
                rhs.len(),
                n = self.n
            )));
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.order.iter().map(|&o| rhs[o]).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n {
            let yk = x[self.pivot_rows[k]];
            y[k] = yk;
            if yk.re == 0.0 && yk.im == 0.0 {
                continue;
            }
            for idx in self.l_offsets[k]..self.l_offsets[k + 1] {
                x[self.l_rows[idx]] -= self.l_values[idx] * yk;
            }
        }
        for k in (0..n).rev() {
            let (s, e) = (self.u_offsets[k], self.u_offsets[k + 1]);
            let mut acc = y[k];
            for idx in s + 1..e {
                acc -= self.u_values[idx] * y[self.u_cols[idx]];
            }
            y[k] = acc / self.u_values[s];
        }
        for (k, &o) in self.order.iter().enumerate() {
            rhs[o] = y[k];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut out = rhs.to_vec();
        self.solve_in_place(&mut out)?;
        Ok(out)
    }
}

/// Factorizes `z B - A` for the given pencil.
pub fn shifted_factorize(pencil: &MatrixPencil, z: Complex64) -> Result<ShiftedFactorization> {
    let m = pencil.b().linear_combination(z, pencil.a(), Complex64::new(-1.0, 0.0))?;
    factorize(&m, z)
}

/// Factorizes an arbitrary square sparse matrix; `shift` is recorded for error reporting.
pub fn factorize(m: &SparseMatrix, shift: Complex64) -> Result<ShiftedFactorization> {
    let n = m.n_rows();
    if m.n_cols() != n {
        return Err(Error::Dimension("factorize: matrix must be square".into()));
    }
    let order = reverse_cuthill_mckee(m);
    let pm = m.permute_symmetric(&order)?;
    let max_entry = pm.max_abs();
    let threshold = SINGULAR_PIVOT_REL * max_entry;

    let mut rows: Vec<Vec<(usize, Complex64)>> = (0..n).map(|i| pm.row(i).collect()).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, row) in rows.iter().enumerate() {
        for &(j, _) in row {
            col_rows[j].push(i);
        }
    }
    let mut pivoted = vec![false; n];
    let mut pivot_rows = Vec::with_capacity(n);
    let mut l_offsets = Vec::with_capacity(n + 1);
    let mut l_rows = Vec::new();
    let mut l_values = Vec::new();
    let mut u_offsets = Vec::with_capacity(n + 1);
    let mut u_cols = Vec::new();
    let mut u_values = Vec::new();
    l_offsets.push(0);
    u_offsets.push(0);

    let mut merged: Vec<(usize, Complex64)> = Vec::new();
    for k in 0..n {
        let candidates: Vec<usize> = std::mem::take(&mut col_rows[k])
            .into_iter()
            .filter(|&r| !pivoted[r] && rows[r].first().is_some_and(|&(c, _)| c == k))
            .collect();
        let p = candidates
            .iter()
            .copied()
            .max_by(|&a, &b| rows[a][0].1.norm().partial_cmp(&rows[b][0].1.norm()).unwrap());
        let p = match p {
            Some(p) if rows[p][0].1.norm() >= threshold && rows[p][0].1.norm() > 0.0 => p,
            _ => return Err(Error::SingularShift { z: shift, node: None }),
        };
        pivoted[p] = true;
        pivot_rows.push(p);
        let prow = std::mem::take(&mut rows[p]);
        let pivot = prow[0].1;
        for &r in &candidates {
            if r == p {
                continue;
            }
            let row = std::mem::take(&mut rows[r]);
            let lval = row[0].1 / pivot;
            l_rows.push(r);
            l_values.push(lval);
            merged.clear();
            let (mut a, mut b) = (1, 1);
            while a < row.len() || b < prow.len() {
                let ca = row.get(a).map_or(usize::MAX, |e| e.0);
                let cb = prow.get(b).map_or(usize::MAX, |e| e.0);
                if ca == cb {
                    merged.push((ca, row[a].1 - lval * prow[b].1));
                    a += 1;
                    b += 1;
                } else if ca < cb {
                    merged.push(row[a]);
                    a += 1;
                } else {
                    merged.push((cb, -lval * prow[b].1));
                    col_rows[cb].push(r);
                    b += 1;
                }
            }
            rows[r] = merged.clone();
        }
        l_offsets.push(l_rows.len());
        for (c, v) in prow {
            u_cols.push(c);
            u_values.push(v);
        }
        u_offsets.push(u_cols.len());
    }
    // U columns are in preordered positions; the forward sweep stores y by step,
    // and step k eliminates column k, so U row k maps column c to step c.
    Ok(ShiftedFactorization {
        shift,
        n,
        order,
        pivot_rows,
        l_offsets,
        l_rows,
        l_values,
        u_offsets,
        u_cols,
        u_values,
    })
}

/// Solves `(zB - A) Y = rhs` column by column.
pub fn solve_block(f: &ShiftedFactorization, rhs: &DenseBlock) -> Result<DenseBlock> {
    if rhs.n_rows() != f.dim() {
        return Err(Error::Dimension(format!(
            "solve_block: factorization is {n}x{n}, rhs has {} rows",
            rhs.n_rows(),
            n = f.dim()
        )));
    }
    let mut out = rhs.clone();
    for j in 0..out.n_cols() {
        f.solve_in_place(out.col_mut(j))?;
    }
    Ok(out)
}

/// Reverse Cuthill-McKee ordering of the symmetrized pattern.
pub fn reverse_cuthill_mckee(m: &SparseMatrix) -> Vec<usize> {
    let n = m.n_rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in m.triplets() {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| degree[i]);
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj);
        let mut queue = VecDeque::new();
        queue.push_back(start);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_by_key(|&u| (degree[u], u));
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

/// Finds a far-away start node by repeated breadth-first sweeps.
fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>]) -> usize {
    let mut current = seed;
    let mut ecc = 0;
    for _ in 0..8 {
        let (far, depth) = bfs_farthest(current, adj);
        if depth <= ecc {
            break;
        }
        ecc = depth;
        current = far;
    }
    current
}

fn bfs_farthest(start: usize, adj: &[Vec<usize>]) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut best = (start, 0);
    while let Some(v) = queue.pop_front() {
        let d = dist[v];
        if d > best.1 || (d == best.1 && adj[v].len() < adj[best.0].len()) {
            best = (v, d);
        }
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = d + 1;
                queue.push_back(u);
            }
        }
    }
    best
}
