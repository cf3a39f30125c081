//! Finite-element test pencils, random coefficient fields and reference spectra.

mod dataset;
mod fem;
mod field;
mod truth;

pub use dataset::{read_dataset, write_dataset, write_truth, Dataset};
pub use fem::{assemble_em_cavity, assemble_plate, assemble_thermal};
pub use field::{grf_sample, CoefficientField, Grid2D};
pub use truth::{dense_eigenpairs, dense_ground_truth, densify, target_count, GroundTruth, ORACLE_CAP};


use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::MatrixPencil;

/// The three generated problem families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Thermal,
    Plate,
    Em,
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thermal" => Ok(Self::Thermal),
            "plate" => Ok(Self::Plate),
            "em" => Ok(Self::Em),
            _ => Err(Error::Parameter(format!("unknown problem `{s}` (thermal|plate|em)"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::Thermal => "thermal",
            Self::Plate => "plate",
            Self::Em => "em",
        })
    }
}

/// Default random-field and physical parameters for generated instances.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorParams {
    pub mean: f64,
    pub variance: f64,
    pub length_scale: f64,
    pub heat_capacity: f64,
    pub permeability: f64,
    pub bending_d: f64,
    pub thickness: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            mean: 1.0,
            variance: 0.25,
            length_scale: 0.2,
            heat_capacity: 1.0,
            permeability: 1.0,
            bending_d: 1.0,
            thickness: 1.0,
        }
    }
}

/// Samples a coefficient field for `kind` and assembles its pencil.
pub fn generate(kind: ProblemKind, grid: Grid2D, seed: u64, params: &GeneratorParams) -> Result<(MatrixPencil, CoefficientField)> {
    let field = grf_sample(grid, params.mean, params.variance, params.length_scale, seed)?;
    let pencil = match kind {
        ProblemKind::Thermal => assemble_thermal(&field, params.heat_capacity)?,
        ProblemKind::Em => assemble_em_cavity(&field, params.permeability)?,
        ProblemKind::Plate => assemble_plate(&field, params.bending_d, params.thickness)?,
    };
    Ok((pencil, field))
}
