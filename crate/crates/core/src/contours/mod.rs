//! Integration contours: geometry, quadrature, KDE construction, scouting
//! baselines and randomized placement.

mod kde;
mod quadrature;
mod random;
mod scout;

pub use kde::{construct_contours, find_cut, kde_sparsity, KdeParams, Interval, IntervalPartition};
pub use quadrature::{gauss_legendre, quadrature_for, QuadratureRule};
pub use random::{random_contours, RandomContours, MAX_RANDOM_CONTOURS};
pub use scout::{calibrate_margin, scout, scout_contour, RitzEstimate, ScoutContour, ScoutMethod};

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContourSource {
    Kde,
    Scout,
    Random,
    Manual,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Circle { center: Complex64, radius: f64 },
    Rect { re_min: f64, re_max: f64, im_min: f64, im_max: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    #[serde(flatten)]
    pub shape: Shape,
    pub expected_count: usize,
    pub source: ContourSource,
}

impl Contour {
    pub fn circle(center: f64, radius: f64, expected_count: usize, source: ContourSource) -> Result<Self> {
        Self::new(
            Shape::Circle {
                center: Complex64::new(center, 0.0),
                radius,
            },
            expected_count,
            source,
        )
    }

    pub fn rect(re_min: f64, re_max: f64, im_min: f64, im_max: f64, expected_count: usize, source: ContourSource) -> Result<Self> {
        Self::new(Shape::Rect { re_min, re_max, im_min, im_max }, expected_count, source)
    }

    pub fn new(shape: Shape, expected_count: usize, source: ContourSource) -> Result<Self> {
        match shape {
            Shape::Circle { radius, center } => {
                if !(radius > 0.0) || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
                    return Err(Error::Parameter(format!("circle radius must be positive and finite, got {radius}")));
                }
            }
            Shape::Rect { re_min, re_max, im_min, im_max } => {
                if !(re_min < re_max && im_min < im_max) {
                    return Err(Error::Parameter(format!(
                        "rect needs re_min < re_max and im_min < im_max, got [{re_min}, {re_max}] x [{im_min}, {im_max}]"
                    )));
                }
            }
        }
        Ok(Self { shape, expected_count, source })
    }

    /// Strict interior test.
    pub fn contains(&self, z: Complex64) -> bool {
        match self.shape {
            Shape::Circle { center, radius } => (z - center).norm() < radius,
            Shape::Rect { re_min, re_max, im_min, im_max } => {
                z.re > re_min && z.re < re_max && z.im > im_min && z.im < im_max
            }
        }
    }

    pub fn contains_real(&self, x: f64) -> bool {
        self.contains(Complex64::new(x, 0.0))
    }

    /// Interior test with slack `tol` outward.
    pub fn contains_with_slack(&self, z: Complex64, tol: f64) -> bool {
        match self.shape {
            Shape::Circle { center, radius } => (z - center).norm() < radius + tol,
            Shape::Rect { re_min, re_max, im_min, im_max } => {
                z.re > re_min - tol && z.re < re_max + tol && z.im > im_min - tol && z.im < im_max + tol
            }
        }
    }

    /// Real interval cut out of the real axis.
    pub fn real_interval(&self) -> (f64, f64) {
        match self.shape {
            Shape::Circle { center, radius } => {
                let half = (radius * radius - center.im * center.im).max(0.0).sqrt();
                (center.re - half, center.re + half)
            }
            Shape::Rect { re_min, re_max, .. } => (re_min, re_max),
        }
    }

    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius, .. } => PI * radius * radius,
            Shape::Rect { re_min, re_max, im_min, im_max } => (re_max - re_min) * (im_max - im_min),
        }
    }

    /// Point used to normalize moment weights.
    pub fn center(&self) -> Complex64 {
        match self.shape {
            Shape::Circle { center, .. } => center,
            Shape::Rect { re_min, re_max, im_min, im_max } => {
                Complex64::new(0.5 * (re_min + re_max), 0.5 * (im_min + im_max))
            }
        }
    }

    /// Half the largest extent; the scale for normalized moments.
    pub fn scale(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius, .. } => radius,
            Shape::Rect { re_min, re_max, im_min, im_max } => 0.5 * (re_max - re_min).max(im_max - im_min),
        }
    }

    /// Longer side over shorter side (1 for circles).
    pub fn aspect_ratio(&self) -> f64 {
        match self.shape {
            Shape::Circle { .. } => 1.0,
            Shape::Rect { re_min, re_max, im_min, im_max } => {
                let (w, h) = (re_max - re_min, im_max - im_min);
                w.max(h) / w.min(h)
            }
        }
    }
}

pub fn contour_area(contours: &[Contour]) -> f64 {
    contours.iter().map(Contour::area).sum()
}

#[derive(Serialize, Deserialize)]
struct ContourFile {
    contours: Vec<Contour>,
}

pub fn contours_to_json(contours: &[Contour]) -> Result<String> {
    serde_json::to_string_pretty(&ContourFile { contours: contours.to_vec() })
        .map_err(|e| Error::format("contours", 0, e.to_string()))
}

pub fn contours_from_json(text: &str, source_name: &str) -> Result<Vec<Contour>> {
    let file: ContourFile =
        serde_json::from_str(text).map_err(|e| Error::format(source_name, e.line(), e.to_string()))?;
    for c in &file.contours {
        Contour::new(c.shape, c.expected_count, c.source)?;
    }
    Ok(file.contours)
}

pub fn write_contours(path: &Path, contours: &[Contour]) -> Result<()> {
    fs::write(path, contours_to_json(contours)?)?;
    Ok(())
}

pub fn read_contours(path: &Path) -> Result<Vec<Contour>> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::format(&name, 0, format!("cannot read: {e}")))?;
    contours_from_json(&text, &name)
}
