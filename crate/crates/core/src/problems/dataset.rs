//! On-disk datasets: `A.mtx`, `B.mtx` and a `meta.json` sidecar.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::field::{CoefficientField, Grid2D};
use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::linalg::{read_mtx, write_mtx, MatrixPencil};

#[derive(Clone, Debug)]
pub struct Dataset {
    pub pencil: MatrixPencil,
    pub field: Option<CoefficientField>,
    pub truth: Option<GroundTruth>,
}

#[derive(Serialize, Deserialize)]
struct MetaGrid {
    nx: usize,
    ny: usize,
}

#[derive(Serialize, Deserialize)]
struct MetaField {
    mean: f64,
    variance: f64,
    length_scale: f64,
    seed: u64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MetaTruth {
    m: usize,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    problem_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<MetaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<MetaField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    truth: Option<MetaTruth>,
}

pub fn write_dataset(dir: &Path, data: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_mtx(data.pencil.a(), &dir.join("A.mtx"))?;
    write_mtx(data.pencil.b(), &dir.join("B.mtx"))?;
    let meta = Meta {
        problem_id: data.pencil.problem_id().to_string(),
        grid: data.field.as_ref().map(|f| MetaGrid { nx: f.grid.nx, ny: f.grid.ny }),
        field: data.field.as_ref().map(|f| MetaField {
            mean: f.mean,
            variance: f.variance,
            length_scale: f.length_scale,
            seed: f.seed,
            values: f.values.clone(),
        }),
        truth: data.truth.as_ref().map(|t| MetaTruth {
            m: t.m,
            eigenvalues: t.eigenvalues.clone(),
        }),
    };
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::format("meta.json", 0, e.to_string()))?;
    fs::write(dir.join("meta.json"), text)?;
    Ok(())
}

/// Replaces the truth block of an existing dataset's `meta.json`.
pub fn write_truth(dir: &Path, truth: &GroundTruth) -> Result<()> {
    let path = dir.join("meta.json");
    let mut meta = read_meta(&path)?;
    meta.truth = Some(MetaTruth {
        m: truth.m,
        eigenvalues: truth.eigenvalues.clone(),
    });
    let text = serde_json::to_string_pretty(&meta).map_err(|e| Error::format("meta.json", 0, e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

fn read_meta(path: &Path) -> Result<Meta> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::format(&name, 0, format!("cannot read: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::format(&name, e.line(), e.to_string()))
}

pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let a = read_mtx(&dir.join("A.mtx"))?;
    let b = read_mtx(&dir.join("B.mtx"))?;
    let meta = read_meta(&dir.join("meta.json"))?;
    let hermitian = a.is_hermitian(crate::linalg::pencil::HERMITIAN_TOL) && b.is_hermitian(crate::linalg::pencil::HERMITIAN_TOL);
    let pencil = MatrixPencil::new(a, b, hermitian, hermitian, meta.problem_id)?;
    let field = match (meta.grid, meta.field) {
        (Some(g), Some(f)) => {
            let grid = Grid2D::new(g.nx, g.ny)?;
            if f.values.len() != grid.n_nodes() {
                return Err(Error::format("meta.json", 0, "field length does not match grid"));
            }
            Some(CoefficientField {
                grid,
                values: f.values,
                mean: f.mean,
                variance: f.variance,
                length_scale: f.length_scale,
                seed: f.seed,
            })
        }
        _ => None,
    };
    let truth = meta.truth.map(|t| {
        let mut gt = GroundTruth::from_values(t.eigenvalues);
        gt.m = t.m;
        gt
    });
    Ok(Dataset { pencil, field, truth })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{assemble_thermal, grf_sample};

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let field = grf_sample(Grid2D::square(5).unwrap(), 1.0, 0.4, 0.2, 9).unwrap();
        let pencil = assemble_thermal(&field, 1.0).unwrap();
        let truth = GroundTruth::from_values(vec![19.1, 48.0 + 1.0 / 3.0]);
        let data = Dataset { pencil, field: Some(field.clone()), truth: Some(truth.clone()) };
        write_dataset(dir.path(), &data).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        assert_eq!(back.pencil.a().triplets().collect::<Vec<_>>(), data.pencil.a().triplets().collect::<Vec<_>>());
        assert_eq!(back.pencil.b().triplets().collect::<Vec<_>>(), data.pencil.b().triplets().collect::<Vec<_>>());
        assert_eq!(back.field.unwrap(), field);
        assert_eq!(back.truth.unwrap().eigenvalues, truth.eigenvalues);
        assert_eq!(back.pencil.problem_id(), data.pencil.problem_id());
        assert!(back.pencil.hermitian());
    }

    #[test]
    fn missing_b_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let field = CoefficientField::constant(Grid2D::square(3).unwrap(), 1.0);
        let data = Dataset { pencil: assemble_thermal(&field, 1.0).unwrap(), field: None, truth: None };
        write_dataset(dir.path(), &data).unwrap();
        fs::remove_file(dir.path().join("B.mtx")).unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(Error::Format { .. })));
    }

    #[test]
    fn malformed_meta_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let field = CoefficientField::constant(Grid2D::square(3).unwrap(), 1.0);
        let data = Dataset { pencil: assemble_thermal(&field, 1.0).unwrap(), field: None, truth: None };
        write_dataset(dir.path(), &data).unwrap();
        fs::write(dir.path().join("meta.json"), "{\n \"problem_id\": 3,\n}").unwrap();
        match read_dataset(dir.path()).unwrap_err() {
            Error::Format { line, .. } => assert!(line >= 2),
            e => panic!("{e:?}"),
        }
    }
}
