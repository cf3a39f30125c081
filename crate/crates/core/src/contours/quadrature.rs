use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Contour, Shape};
use crate::error::{Error, Result};

/// Nodes and weights with `Σ ω_j f(z_j) ≈ (1/2πi) ∮ f(z) dz`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
}

impl QuadratureRule {
    pub fn n_q(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }
}

/// Trapezoid rule on circles; Gauss-Legendre on each rectangle edge,
/// `n_q / 4` nodes per edge with any remainder going to the horizontal edges.
pub fn quadrature_for(contour: &Contour, n_q: usize) -> Result<QuadratureRule> {
    if n_q < 4 || n_q % 2 != 0 {
        return Err(Error::Parameter(format!("n_q must be even and >= 4, got {n_q}")));
    }
    match contour.shape {
        Shape::Circle { center, radius } => {
            let mut nodes = Vec::with_capacity(n_q);
            let mut weights = Vec::with_capacity(n_q);
            for j in 0..n_q {
                let theta = 2.0 * PI * (j as f64 + 0.5) / n_q as f64;
                let e = Complex64::from_polar(radius, theta);
                nodes.push(center + e);
                weights.push(e / n_q as f64);
            }
            Ok(QuadratureRule { nodes, weights })
        }
        Shape::Rect { re_min, re_max, im_min, im_max } => {
            let base = n_q / 4;
            let extra = (n_q - 4 * base) / 2;
            let corners = [
                Complex64::new(re_min, im_min),
                Complex64::new(re_max, im_min),
                Complex64::new(re_max, im_max),
                Complex64::new(re_min, im_max),
            ];
            let two_pi_i = Complex64::new(0.0, 2.0 * PI);
            let mut nodes = Vec::with_capacity(n_q);
            let mut weights = Vec::with_capacity(n_q);
            for e in 0..4 {
                let (a, b) = (corners[e], corners[(e + 1) % 4]);
                let count = base + if e % 2 == 0 { extra } else { 0 };
                let (x, w) = gauss_legendre(count);
                let mid = 0.5 * (a + b);
                let half = 0.5 * (b - a);
                for (xi, wi) in x.iter().zip(&w) {
                    nodes.push(mid + half * *xi);
                    weights.push(half * *wi / two_pi_i);
                }
            }
            Ok(QuadratureRule { nodes, weights })
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::ContourSource;

    fn circle(c: f64, r: f64) -> Contour {
        Contour::circle(c, r, 1, ContourSource::Manual).unwrap()
    }

    #[test]
    fn centered_pole_is_exact() {
        let rule = quadrature_for(&circle(2.0, 0.7), 8).unwrap();
        let c = Complex64::new(2.0, 0.0);
        let v = rule.apply(|z| 1.0 / (z - c));
        assert!((v - 1.0).norm() < 1e-14);
    }

    #[test]
    fn weights_sum_to_zero() {
        for (c, r, n) in [(0.0, 1.0, 4), (5.0, 3.0, 16), (-1.0, 0.01, 32), (100.0, 50.0, 64)] {
            let rule = quadrature_for(&circle(c, r), n).unwrap();
            let s: Complex64 = rule.weights.iter().sum();
            assert!(s.norm() < 1e-14 * r.max(1.0), "{s}");
        }
    }

    #[test]
    fn outside_pole_decays_geometrically() {
        // Pole at distance d = 2r from the centre: trapezoid error is (r/d)^n / (1 - (r/d)^n).
        let rule_err = |n| {
            let rule = quadrature_for(&circle(0.0, 1.0), n).unwrap();
            rule.apply(|z| 1.0 / (z - 2.0)).norm()
        };
        for n in [8, 16, 32] {
            let rho: f64 = 0.5;
            let bound = rho.powi(n as i32) / (1.0 - rho.powi(n as i32));
            assert!(rule_err(n) <= bound * (1.0 + 1e-6) + 1e-16, "n={n}");
        }
    }

    #[test]
    fn rect_rule_integrates_residues() {
        let r = Contour::rect(0.0, 4.0, -1.0, 1.0, 1, ContourSource::Manual).unwrap();
        let rule = quadrature_for(&r, 64).unwrap();
        assert_eq!(rule.n_q(), 64);
        let inside = rule.apply(|z| 1.0 / (z - 1.3));
        let outside = rule.apply(|z| 1.0 / (z - 6.0));
        assert!((inside - 1.0).norm() < 1e-6, "{inside}");
        assert!(outside.norm() < 1e-10);
        assert_eq!(quadrature_for(&r, 6).unwrap().n_q(), 6);
    }

    #[test]
    fn invalid_node_counts() {
        assert!(quadrature_for(&circle(0.0, 1.0), 7).is_err());
        assert!(quadrature_for(&circle(0.0, 1.0), 2).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let int = |p: i32| x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(8) - 2.0 / 9.0).abs() < 1e-14);
        assert!(int(7).abs() < 1e-14);
    }
}
