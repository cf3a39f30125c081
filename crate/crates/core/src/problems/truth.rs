//! Dense reference spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dense_hermitian_gep, dense_hermitian_gep_values, DenseBlock, MatrixPencil, SparseMatrix};

/// Largest pencil the dense oracle accepts.
pub const ORACLE_CAP: usize = 2500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub eigenvalues: Vec<f64>,
    pub m: usize,
    pub method: String,
    /// A priori relative backward-error bound of the dense solve.
    pub residual_bound: f64,
}

impl GroundTruth {
    /// Wraps externally supplied reference values.
    pub fn from_values(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        Self {
            m: eigenvalues.len(),
            eigenvalues,
            method: "dense-oracle".into(),
            residual_bound: 0.0,
        }
    }

    pub fn span(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

/// Number of wanted eigenvalues for a pencil of size `n`: one percent, at least one.
pub fn target_count(n: usize) -> usize {
    ((0.01 * n as f64).round() as usize).max(1)
}

pub fn densify(m: &SparseMatrix) -> DenseBlock {
    let mut d = DenseBlock::zeros(m.n_rows(), m.n_cols());
    for (i, j, v) in m.triplets() {
        d.col_mut(j)[i] = v;
    }
    d
}

fn check_oracle(pencil: &MatrixPencil, m: usize) -> Result<()> {
    let n = pencil.dim();
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    if !pencil.hermitian() {
        return Err(Error::Parameter("dense oracle needs a Hermitian pencil".into()));
    }
    if m == 0 || m > n {
        return Err(Error::Parameter(format!("oracle count m = {m} outside 1..={n}")));
    }
    Ok(())
}

/// Indices of the `m` eigenvalues of smallest magnitude, in ascending value order.
fn smallest_magnitude(values: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()));
    idx.truncate(m);
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    idx
}

/// The `m` smallest-magnitude eigenvalues of the pencil via a dense solve.
pub fn dense_ground_truth(pencil: &MatrixPencil, m: usize) -> Result<GroundTruth> {
    check_oracle(pencil, m)?;
    let values = dense_hermitian_gep_values(&densify(pencil.a()), &densify(pencil.b()))?;
    let idx = smallest_magnitude(&values, m);
    Ok(GroundTruth {
        eigenvalues: idx.iter().map(|&i| values[i]).collect(),
        m,
        method: "dense-oracle".into(),
        residual_bound: 10.0 * pencil.dim() as f64 * f64::EPSILON,
    })
}

/// Like [`dense_ground_truth`] but also returns the eigenvectors (columns).
pub fn dense_eigenpairs(pencil: &MatrixPencil, m: usize) -> Result<(GroundTruth, DenseBlock)> {
    check_oracle(pencil, m)?;
    let (values, vectors) = dense_hermitian_gep(&densify(pencil.a()), &densify(pencil.b()))?;
    let idx = smallest_magnitude(&values, m);
    let truth = GroundTruth {
        eigenvalues: idx.iter().map(|&i| values[i]).collect(),
        m,
        method: "dense-oracle".into(),
        residual_bound: 10.0 * pencil.dim() as f64 * f64::EPSILON,
    };
    Ok((truth, vectors.select_columns(&idx)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pencil() {
        let p = MatrixPencil::new(SparseMatrix::diagonal(&[5.0, 1.0, 3.0]), SparseMatrix::identity(3), true, true, "d")
            .unwrap();
        assert_eq!(dense_ground_truth(&p, 2).unwrap().eigenvalues, vec![1.0, 3.0]);
        assert_eq!(dense_ground_truth(&p, 3).unwrap().eigenvalues, vec![1.0, 3.0, 5.0]);
        assert!(matches!(dense_ground_truth(&p, 4), Err(Error::Parameter(_))));
    }

    #[test]
    fn magnitude_ordering_with_negative_values() {
        let p = MatrixPencil::new(SparseMatrix::diagonal(&[-0.5, 4.0, 1.0, -3.0]), SparseMatrix::identity(4), true, true, "d")
            .unwrap();
        assert_eq!(dense_ground_truth(&p, 2).unwrap().eigenvalues, vec![-0.5, 1.0]);
    }

    #[test]
    fn cap_is_enforced() {
        let n = ORACLE_CAP + 1;
        let p = MatrixPencil::new(SparseMatrix::identity(n), SparseMatrix::identity(n), true, true, "big").unwrap();
        assert!(matches!(dense_ground_truth(&p, 1), Err(Error::OracleCap { .. })));
    }

    #[test]
    fn target_count_rounds_one_percent() {
        assert_eq!(target_count(10), 1);
        assert_eq!(target_count(900), 9);
        assert_eq!(target_count(1600), 16);
        assert_eq!(target_count(149), 1);
        assert_eq!(target_count(150), 2);
    }
}
