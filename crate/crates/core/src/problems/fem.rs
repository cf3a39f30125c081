//! P1 finite elements on the right-triangle mesh of the unit square.

use num_complex::Complex64;

use super::field::{CoefficientField, Grid2D};
use crate::error::{Error, Result};
use crate::linalg::{MatrixPencil, SparseMatrix};

/// Stiffness and consistent mass with per-element coefficients.
pub(crate) struct Assembled {
    pub stiffness: SparseMatrix,
    pub mass: SparseMatrix,
}

/// Vertices of the mesh are `(i, j)` with `0 <= i <= nx + 1`; interior ones
/// carry unknown `(i - 1) + nx (j - 1)`. Every cell is cut along its
/// lower-left to upper-right diagonal.
fn triangles(grid: Grid2D) -> impl Iterator<Item = [(usize, usize); 3]> {
    let (nx, ny) = (grid.nx, grid.ny);
    (0..=ny).flat_map(move |j| {
        (0..=nx).flat_map(move |i| {
            [
                [(i, j), (i + 1, j), (i + 1, j + 1)],
                [(i, j), (i + 1, j + 1), (i, j + 1)],
            ]
        })
    })
}

fn unknown(grid: Grid2D, (i, j): (usize, usize)) -> Option<usize> {
    (i >= 1 && i <= grid.nx && j >= 1 && j <= grid.ny).then(|| grid.node(i - 1, j - 1))
}

/// Element coefficient: mean of the three vertex values, boundary vertices
/// borrowing the nearest interior sample.
fn element_coefficient(field: &CoefficientField, tri: &[(usize, usize); 3]) -> f64 {
    tri.iter()
        .map(|&(i, j)| field.at_clamped(i as isize - 1, j as isize - 1))
        .sum::<f64>()
        / 3.0
}

pub(crate) fn assemble(grid: Grid2D, stiff_coef: Option<&CoefficientField>, mass_coef: Option<&CoefficientField>) -> Assembled {
    let n = grid.n_nodes();
    let (hx, hy) = (grid.hx(), grid.hy());
    let mut k_trip = Vec::with_capacity(n * 7);
    let mut m_trip = Vec::with_capacity(n * 7);
    for tri in triangles(grid) {
        let xy: Vec<(f64, f64)> = tri.iter().map(|&(i, j)| (i as f64 * hx, j as f64 * hy)).collect();
        let b = [xy[1].1 - xy[2].1, xy[2].1 - xy[0].1, xy[0].1 - xy[1].1];
        let c = [xy[2].0 - xy[1].0, xy[0].0 - xy[2].0, xy[1].0 - xy[0].0];
        let area = 0.5 * (c[2] * b[1] - c[1] * b[2]).abs();
        let kc = stiff_coef.map_or(1.0, |f| element_coefficient(f, &tri));
        let mc = mass_coef.map_or(1.0, |f| element_coefficient(f, &tri));
        let ids: Vec<Option<usize>> = tri.iter().map(|&v| unknown(grid, v)).collect();
        for p in 0..3 {
            let Some(ip) = ids[p] else { continue };
            for q in 0..3 {
                let Some(iq) = ids[q] else { continue };
                let kval = kc * (b[p] * b[q] + c[p] * c[q]) / (4.0 * area);
                let mval = mc * area / 12.0 * if p == q { 2.0 } else { 1.0 };
                k_trip.push((ip, iq, Complex64::new(kval, 0.0)));
                m_trip.push((ip, iq, Complex64::new(mval, 0.0)));
            }
        }
    }
    Assembled {
        stiffness: SparseMatrix::from_triplets(n, n, k_trip).expect("indices in range"),
        mass: SparseMatrix::from_triplets(n, n, m_trip).expect("indices in range"),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be > 0, got {v}")))
    }
}

fn check_field(field: &CoefficientField) -> Result<()> {
    if field.values.len() != field.grid.n_nodes() {
        return Err(Error::Dimension(format!(
            "field has {} values for a {}x{} grid",
            field.values.len(),
            field.grid.nx,
            field.grid.ny
        )));
    }
    if field.values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Parameter("coefficient field must be strictly positive".into()));
    }
    Ok(())
}

/// Heat conduction modes: `K u = λ c M u` with conductivity `k(x)` in `K`.
pub fn assemble_thermal(field_k: &CoefficientField, c: f64) -> Result<MatrixPencil> {
    positive("heat capacity c", c)?;
    check_field(field_k)?;
    let asm = assemble(field_k.grid, Some(field_k), None);
    let grid = field_k.grid;
    MatrixPencil::new(
        asm.stiffness,
        asm.mass.scaled(c),
        true,
        true,
        format!("thermal-{}x{}-s{}", grid.nx, grid.ny, field_k.seed),
    )
}

/// TE cavity modes: `(1/μ) K u = ω² M_ε u`.
pub fn assemble_em_cavity(field_eps: &CoefficientField, mu: f64) -> Result<MatrixPencil> {
    positive("permeability mu", mu)?;
    check_field(field_eps)?;
    let asm = assemble(field_eps.grid, None, Some(field_eps));
    let grid = field_eps.grid;
    MatrixPencil::new(
        asm.stiffness.scaled(1.0 / mu),
        asm.mass,
        true,
        true,
        format!("em-{}x{}-s{}", grid.nx, grid.ny, field_eps.seed),
    )
}

/// Plate bending modes from the mixed form `ψ = Δφ`, condensed with the
/// lumped mass `M_L`: `D K M_L⁻¹ K u = ω² M_{ρh} u`.
pub fn assemble_plate(field_rho: &CoefficientField, bending_d: f64, thickness_h: f64) -> Result<MatrixPencil> {
    positive("bending rigidity D", bending_d)?;
    positive("thickness h", thickness_h)?;
    check_field(field_rho)?;
    let grid = field_rho.grid;
    let plain = assemble(grid, None, None);
    let weighted = assemble(grid, None, Some(field_rho));
    let inv_lumped: Vec<f64> = plain.mass.row_sums().iter().map(|s| 1.0 / s).collect();
    let a = plain
        .stiffness
        .matmul(&plain.stiffness.scale_rows(&inv_lumped)?)?
        .scaled(bending_d);
    let a = symmetrize(&a);
    MatrixPencil::new(
        a,
        weighted.mass.scaled(thickness_h),
        true,
        true,
        format!("plate-{}x{}-s{}", grid.nx, grid.ny, field_rho.seed),
    )
}

/// `(A + Aᴴ) / 2`, removing round-off asymmetry from products.
fn symmetrize(a: &SparseMatrix) -> SparseMatrix {
    let half = Complex64::new(0.5, 0.0);
    a.linear_combination(half, &a.conj_transpose(), half)
        .expect("same shape")
}
