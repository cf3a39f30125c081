use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contours::Contour;
use crate::error::{Error, Result};
use crate::linalg::DenseBlock;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_q: usize,
    /// Source block width; `None` means `max(2 · expected_count, 8)`.
    pub source_cols: Option<usize>,
    pub n_moments: usize,
    pub max_refine: usize,
    pub tol: f64,
    pub rank_rel_tol: f64,
    pub drop_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n_q: 32,
            source_cols: None,
            n_moments: 4,
            max_refine: 8,
            tol: 1e-10,
            rank_rel_tol: 1e-12,
            drop_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn source_cols_for(&self, expected: usize, n: usize) -> usize {
        self.source_cols.unwrap_or((2 * expected).max(8)).min(n).max(1)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.n_moments == 0 || self.max_refine == 0 || self.source_cols == Some(0) {
            return Err(Error::Parameter("solver counts must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Parameter(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub n_linear_solves: usize,
    pub n_factorizations: usize,
    pub iterations: usize,
    pub elapsed: f64,
}

impl SolveStats {
    pub fn accumulate(&mut self, other: &SolveStats) {
        self.n_linear_solves += other.n_linear_solves;
        self.n_factorizations += other.n_factorizations;
        self.iterations += other.iterations;
        self.elapsed += other.elapsed;
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenResult {
    pub contour: Contour,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub stats: SolveStats,
    #[serde(skip, default = "empty_block")]
    pub eigenvectors: DenseBlock,
}

fn empty_block() -> DenseBlock {
    DenseBlock::zeros(0, 0)
}

impl EigenResult {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format("result", 0, e.to_string()))
    }
}

/// Writes eigenvectors as a 16-byte header (`n_rows`, `n_cols` as little-endian
/// u64) followed by row-major little-endian f64 values. Each column is rotated
/// by a unit phase so its largest entry is real and positive, then stored by
/// real part; blocks of Hermitian real pencils lose nothing.
pub fn write_eigenvectors(path: &Path, vectors: &DenseBlock) -> Result<()> {
    let (r, c) = (vectors.n_rows(), vectors.n_cols());
    let phases: Vec<Complex64> = (0..c)
        .map(|j| {
            let col = vectors.col(j);
            let big = col.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
            if big.norm() > 0.0 { big.conj() / big.norm() } else { Complex64::new(1.0, 0.0) }
        })
        .collect();
    let mut buf = Vec::with_capacity(16 + 8 * r * c);
    buf.extend_from_slice(&(r as u64).to_le_bytes());
    buf.extend_from_slice(&(c as u64).to_le_bytes());
    for i in 0..r {
        for j in 0..c {
            buf.extend_from_slice(&(vectors[(i, j)] * phases[j]).re.to_le_bytes());
        }
    }
    fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

pub fn read_eigenvectors(path: &Path) -> Result<DenseBlock> {
    let name = path.display().to_string();
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::format(&name, 0, "truncated header"));
    }
    let r = u64::from_le_bytes(bytes[0..8].try_into().unwrap()) as usize;
    let c = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    if bytes.len() != 16 + 8 * r * c {
        return Err(Error::format(&name, 0, format!("expected {} bytes for {r}x{c}", 16 + 8 * r * c)));
    }
    let val = |i: usize, j: usize| {
        let o = 16 + 8 * (i * c + j);
        f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap())
    };
    Ok(DenseBlock::from_fn(r, c, |i, j| Complex64::new(val(i, j), 0.0)))
}
