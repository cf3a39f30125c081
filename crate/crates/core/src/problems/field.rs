//! Uniform grids and log-normal random coefficient fields.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior nodes of the unit square with homogeneous Dirichlet boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Parameter(format!("grid needs nx, ny >= 2, got {nx}x{ny}")));
        }
        Ok(Self { nx, ny })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx + 1) as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / (self.ny + 1) as f64
    }

    /// Mesh spacing along x (equal to `hy` on square grids).
    pub fn h(&self) -> f64 {
        self.hx()
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    /// Unknown index of interior node `(i, j)`, both zero-based.
    pub fn node(&self, i: usize, j: usize) -> usize {
        i + self.nx * j
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub length_scale: f64,
    pub seed: u64,
}

impl CoefficientField {
    /// A field equal to `value` everywhere.
    pub fn constant(grid: Grid2D, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.n_nodes()],
            mean: value,
            variance: 0.0,
            length_scale: 1.0,
            seed: 0,
        }
    }

    /// Value at interior node `(i, j)`; indices outside the interior are
    /// clamped to the nearest interior node.
    pub fn at_clamped(&self, i: isize, j: isize) -> f64 {
        let ci = i.clamp(0, self.grid.nx as isize - 1) as usize;
        let cj = j.clamp(0, self.grid.ny as isize - 1) as usize;
        self.values[self.grid.node(ci, cj)]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out.mean *= s;
        out
    }
}

/// Samples `mean · exp(g)` where `g` is a zero-mean stationary Gaussian field
/// with covariance `variance · exp(-r² / (2 ℓ²))`. Uses circulant embedding on
/// a doubled periodic grid; negative embedding eigenvalues are clamped to zero.
pub fn grf_sample(grid: Grid2D, mean: f64, variance: f64, length_scale: f64, seed: u64) -> Result<CoefficientField> {
    if !(mean > 0.0) || !(length_scale > 0.0) || !(variance >= 0.0) {
        return Err(Error::Parameter(format!(
            "grf: need mean > 0, variance >= 0, length_scale > 0 (got {mean}, {variance}, {length_scale})"
        )));
    }
    let mut field = CoefficientField {
        grid,
        values: vec![mean; grid.n_nodes()],
        mean,
        variance,
        length_scale,
        seed,
    };
    if variance == 0.0 {
        return Ok(field);
    }
    let g = gaussian_field(grid, variance, length_scale, seed);
    for (v, gi) in field.values.iter_mut().zip(g) {
        *v = mean * gi.exp();
    }
    Ok(field)
}

fn gaussian_field(grid: Grid2D, variance: f64, length_scale: f64, seed: u64) -> Vec<f64> {
    let (px, py) = (2 * grid.nx, 2 * grid.ny);
    let (hx, hy) = (grid.hx(), grid.hy());
    let total = px * py;
    let mut cov = vec![Complex64::new(0.0, 0.0); total];
    for j in 0..py {
        let dy = j.min(py - j) as f64 * hy;
        for i in 0..px {
            let dx = i.min(px - i) as f64 * hx;
            let r2 = dx * dx + dy * dy;
            cov[i + px * j] = Complex64::new(variance * (-r2 / (2.0 * length_scale * length_scale)).exp(), 0.0);
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    fft2(&mut planner, &mut cov, px, py);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = 1.0 / total as f64;
    let mut w: Vec<Complex64> = cov
        .iter()
        .map(|lam| {
            let s = (lam.re.max(0.0) * norm).sqrt();
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(s * a, s * b)
        })
        .collect();
    fft2(&mut planner, &mut w, px, py);

    let mut out = Vec::with_capacity(grid.n_nodes());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            out.push(w[i + px * j].re);
        }
    }
    out
}

fn fft2(planner: &mut FftPlanner<f64>, data: &mut [Complex64], px: usize, py: usize) {
    let row = planner.plan_fft_forward(px);
    for chunk in data.chunks_exact_mut(px) {
        row.process(chunk);
    }
    let col = planner.plan_fft_forward(py);
    let mut buf = vec![Complex64::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            buf[j] = data[i + px * j];
        }
        col.process(&mut buf);
        for j in 0..py {
            data[i + px * j] = buf[j];
        }
    }
}
