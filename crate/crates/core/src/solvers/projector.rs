//! Quadrature approximation of the spectral projector, with one
//! factorization per node reused across columns, moments and passes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contours::{quadrature_for, Contour, QuadratureRule};
use crate::error::{Error, Result};
use crate::linalg::{shifted_factorize, sparse_matmul_block, solve_block, DenseBlock, MatrixPencil, ShiftedFactorization};

pub struct ContourProjector<'a> {
    pencil: &'a MatrixPencil,
    rule: QuadratureRule,
    /// Nodes that are factorized; the rest are conjugates of these.
    active: Vec<usize>,
    /// True when every node's conjugate is also a node with conjugate weight.
    conjugate_pairs: bool,
    factors: Vec<ShiftedFactorization>,
    center: Complex64,
    scale: f64,
    pub(crate) n_linear_solves: usize,
}

/// Quadrature on a contour symmetric about the real axis can be folded in
/// half when the pencil and the block are real.
fn conjugate_partner(rule: &QuadratureRule) -> Option<Vec<usize>> {
    let n = rule.n_q();
    let scale = rule.nodes.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let mut partner = vec![usize::MAX; n];
    for i in 0..n {
        let target = rule.nodes[i].conj();
        let j = (0..n).find(|&j| (rule.nodes[j] - target).norm() <= 1e-13 * scale)?;
        if (rule.weights[j] - rule.weights[i].conj()).norm() > 1e-13 * rule.weights[i].norm().max(1e-300) {
            return None;
        }
        if i == j {
            return None;
        }
        partner[i] = j;
    }
    Some(partner)
}

impl<'a> ContourProjector<'a> {
    pub fn new(pencil: &'a MatrixPencil, rule: QuadratureRule, center: Complex64, scale: f64) -> Result<Self> {
        let n = rule.n_q();
        let (active, conjugate_pairs): (Vec<usize>, bool) = match (pencil.a().is_real() && pencil.b().is_real() && center.im == 0.0, conjugate_partner(&rule)) {
            (true, Some(partner)) => ((0..n).filter(|&i| rule.nodes[i].im > 0.0 || (rule.nodes[i].im == 0.0 && i < partner[i])).collect(), true),
            _ => ((0..n).collect(), false),
        };
        let factors = active
            .par_iter()
            .map(|&j| {
                shifted_factorize(pencil, rule.nodes[j]).map_err(|e| match e {
                    Error::SingularShift { z, .. } => Error::SingularShift { z, node: Some(j) },
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            pencil,
            rule,
            active,
            conjugate_pairs,
            factors,
            center,
            scale,
            n_linear_solves: 0,
        })
    }

    pub fn for_contour(pencil: &'a MatrixPencil, contour: &Contour, n_q: usize) -> Result<Self> {
        let rule = quadrature_for(contour, n_q)?;
        Self::new(pencil, rule, contour.center(), contour.scale())
    }

    pub fn n_factorizations(&self) -> usize {
        self.factors.len()
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// `S_m = Σ_j ω_j ((z_j - c)/ρ)^m (z_j B - A)⁻¹ B V` for `m < n_moments`.
    pub fn moments(&mut self, v: &DenseBlock, n_moments: usize) -> Result<Vec<DenseBlock>> {
        if v.n_rows() != self.pencil.dim() {
            return Err(Error::Dimension(format!(
                "projector: pencil is {}, block has {} rows",
                self.pencil.dim(),
                v.n_rows()
            )));
        }
        let bv = sparse_matmul_block(self.pencil.b(), v)?;
        let fold = self.conjugate_pairs && bv.is_real();
        let nodes: Vec<usize> = if fold { self.active.clone() } else { (0..self.rule.n_q()).collect() };
        let solves: Vec<DenseBlock> = if fold {
            self.factors.par_iter().map(|f| solve_block(f, &bv)).collect::<Result<_>>()?
        } else if self.conjugate_pairs {
            // Real pencil but complex block: factors cover the upper half only.
            let full = (0..self.rule.n_q())
                .map(|j| self.factors.iter().position(|f| f.shift() == self.rule.nodes[j]))
                .collect::<Vec<_>>();
            nodes
                .par_iter()
                .map(|&j| match full[j] {
                    Some(k) => solve_block(&self.factors[k], &bv),
                    None => {
                        // (z̄B - A)⁻¹ y = conj((zB - A)⁻¹ conj(y)) for real A, B.
                        let k = self
                            .factors
                            .iter()
                            .position(|f| f.shift() == self.rule.nodes[j].conj())
                            .expect("conjugate node factorized");
                        let conj_rhs = conj_block(&bv);
                        Ok(conj_block(&solve_block(&self.factors[k], &conj_rhs)?))
                    }
                })
                .collect::<Result<_>>()?
        } else {
            self.factors.par_iter().map(|f| solve_block(f, &bv)).collect::<Result<_>>()?
        };
        self.n_linear_solves += solves.len() * v.n_cols();

        let mut out = vec![DenseBlock::zeros(v.n_rows(), v.n_cols()); n_moments];
        for (y, &j) in solves.iter().zip(&nodes) {
            let t = (self.rule.nodes[j] - self.center) / self.scale;
            let mut wt = self.rule.weights[j];
            for s in out.iter_mut() {
                let coef = if fold { 2.0 * wt } else { wt };
                s.add_scaled(coef, y)?;
                wt *= t;
            }
        }
        if fold {
            for s in out.iter_mut() {
                *s = DenseBlock::from_fn(s.n_rows(), s.n_cols(), |i, k| Complex64::new(s[(i, k)].re, 0.0));
            }
        }
        Ok(out)
    }

    /// `P V ≈ Σ_j ω_j (z_j B - A)⁻¹ B V`.
    pub fn apply(&mut self, v: &DenseBlock) -> Result<DenseBlock> {
        Ok(self.moments(v, 1)?.pop().expect("one moment"))
    }
}

fn conj_block(b: &DenseBlock) -> DenseBlock {
    DenseBlock::from_fn(b.n_rows(), b.n_cols(), |i, j| b[(i, j)].conj())
}

/// Applies the quadrature projector of `rule` to `v`.
pub fn apply_projector(pencil: &MatrixPencil, rule: &QuadratureRule, v: &DenseBlock) -> Result<DenseBlock> {
    let mut p = ContourProjector::new(pencil, rule.clone(), Complex64::new(0.0, 0.0), 1.0)?;
    p.apply(v)
}
