use super::sparse::SparseMatrix;
use crate::error::{Error, Result};

/// Relative entrywise tolerance for the Hermitian flag check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// The pair `(A, B)` of `A x = λ B x`.
#[derive(Clone, Debug)]
pub struct MatrixPencil {
    a: SparseMatrix,
    b: SparseMatrix,
    hermitian: bool,
    b_positive_definite: bool,
    problem_id: String,
}

impl MatrixPencil {
    /// Checks dimensions and, when `hermitian` is set, that both matrices equal
    /// their conjugate transpose. Positive definiteness of `B` is taken on trust
    /// and surfaces later as `IndefiniteB` from Cholesky.
    pub fn new(
        a: SparseMatrix,
        b: SparseMatrix,
        hermitian: bool,
        b_positive_definite: bool,
        problem_id: impl Into<String>,
    ) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n || b.n_rows() != n || b.n_cols() != n {
            return Err(Error::Dimension(format!(
                "pencil: A is {}x{}, B is {}x{}",
                a.n_rows(),
                a.n_cols(),
                b.n_rows(),
                b.n_cols()
            )));
        }
        if hermitian && !(a.is_hermitian(HERMITIAN_TOL) && b.is_hermitian(HERMITIAN_TOL)) {
            return Err(Error::Validation("pencil flagged Hermitian but A or B is not".into()));
        }
        Ok(Self {
            a,
            b,
            hermitian,
            b_positive_definite,
            problem_id: problem_id.into(),
        })
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn dim(&self) -> usize {
        self.a.n_rows()
    }

    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn b_positive_definite(&self) -> bool {
        self.b_positive_definite
    }

    pub fn problem_id(&self) -> &str {
        &self.problem_id
    }

    pub fn with_problem_id(mut self, id: impl Into<String>) -> Self {
        self.problem_id = id.into();
        self
    }

    /// Relative residual `||Ax - λBx|| / (||Ax|| + |λ| ||Bx||)`.
    pub fn relative_residual(&self, lambda: f64, x: &[num_complex::Complex64]) -> Result<f64> {
        let ax = self.a.matvec(x)?;
        let bx = self.b.matvec(x)?;
        let mut num = 0.0;
        let mut na = 0.0;
        let mut nb = 0.0;
        for (p, q) in ax.iter().zip(&bx) {
            num += (p - q * lambda).norm_sqr();
            na += p.norm_sqr();
            nb += q.norm_sqr();
        }
        let denom = na.sqrt() + lambda.abs() * nb.sqrt();
        Ok(if denom == 0.0 { num.sqrt() } else { num.sqrt() / denom })
    }
}
