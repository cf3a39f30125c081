//! Sparse storage, shifted factorizations and small dense kernels.

pub mod dense;
pub mod eigh;
pub mod lu;
pub mod mtx;
pub mod pencil;
pub mod sparse;

pub use dense::{orthonormalize, rank_truncate_svd, Dense, DenseBlock, Scalar};
pub use eigh::{dense_hermitian_gep, dense_hermitian_gep_values, hessenberg_eigenvalues, DENSE_GEP_CAP};
pub use lu::{shifted_factorize, solve_block, ShiftedFactorization};
pub use mtx::{read_mtx, write_mtx};
pub use pencil::MatrixPencil;
pub use sparse::SparseMatrix;

use num_complex::Complex64;

use crate::error::Result;

/// `m · v` for a complex vector.
pub fn sparse_matvec(m: &SparseMatrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    m.matvec(v)
}

/// Sparse matrix times every column of a dense block.
pub fn sparse_matmul_block(m: &SparseMatrix, v: &DenseBlock) -> Result<DenseBlock> {
    if v.n_rows() != m.n_cols() {
        return Err(crate::error::Error::Dimension(format!(
            "matrix has {} columns, block has {} rows",
            m.n_cols(),
            v.n_rows()
        )));
    }
    let mut out = DenseBlock::zeros(m.n_rows(), v.n_cols());
    for j in 0..v.n_cols() {
        m.matvec_into(v.col(j), out.col_mut(j));
    }
    Ok(out)
}
