//! Knowledge-aware random contour placement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Contour, ContourSource};
use crate::error::{Error, Result};
use crate::problems::GroundTruth;

pub const MAX_RANDOM_CONTOURS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct RandomContours {
    pub contours: Vec<Contour>,
    /// Cut points `λ_min = c_0 < … < c_N = λ_max` of the sub-intervals.
    pub cuts: Vec<f64>,
    /// Set when the log-uniform radius range was empty and radii fell back to `r_min`.
    pub clamped: bool,
}

/// Draws `N ~ U{1..16}` circles: `N - 1` uniform cuts of `[λ_min, λ_max]`,
/// one uniform centre per piece, radii log-uniform on
/// `[span / (2M), span / N]`.
pub fn random_contours(truth: &GroundTruth, seed: u64) -> Result<RandomContours> {
    let values = &truth.eigenvalues;
    let (Some(&lo), Some(&hi)) = (values.first(), values.last()) else {
        return Err(Error::EmptyPrediction);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=MAX_RANDOM_CONTOURS);
    let mut cuts: Vec<f64> = (0..n - 1).map(|_| rng.random_range(lo..=hi)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.insert(0, lo);
    cuts.push(hi);

    let mut span = hi - lo;
    if span <= 0.0 {
        span = 1e-3 * lo.abs().max(1.0);
    }
    let m = truth.m.max(values.len()).max(1) as f64;
    let r_min = span / (2.0 * m);
    let r_max = span / n as f64;
    let clamped = r_min >= r_max;

    let mut contours = Vec::with_capacity(n);
    for piece in cuts.windows(2) {
        let (a, b) = (piece[0], piece[1]);
        let center = if b > a { rng.random_range(a..=b) } else { a };
        let radius = if clamped {
            r_min
        } else {
            (rng.random_range(r_min.ln()..=r_max.ln())).exp()
        };
        let inside = values.iter().filter(|&&v| (v - center).abs() < radius).count();
        contours.push(Contour::circle(center, radius, inside, ContourSource::Random)?);
    }
    Ok(RandomContours { contours, cuts, clamped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> GroundTruth {
        GroundTruth::from_values((0..20).map(|i| 10.0 + (i as f64).powf(1.3)).collect())
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_contours(&truth(), 5).unwrap(), random_contours(&truth(), 5).unwrap());
    }

    #[test]
    fn counts_and_centres_over_many_seeds() {
        let t = truth();
        let mut seen = [false; MAX_RANDOM_CONTOURS + 1];
        for seed in 0..1000 {
            let r = random_contours(&t, seed).unwrap();
            let n = r.contours.len();
            assert!((1..=MAX_RANDOM_CONTOURS).contains(&n));
            seen[n] = true;
            for (c, piece) in r.contours.iter().zip(r.cuts.windows(2)) {
                let x = c.center().re;
                assert!(x >= piece[0] && x <= piece[1]);
                let super::super::Shape::Circle { radius, .. } = c.shape else { panic!() };
                assert!(radius >= t.span() / 40.0 * (1.0 - 1e-12));
                assert!(radius <= t.span() / n as f64 * (1.0 + 1e-12));
            }
        }
        assert!(seen[1..].iter().all(|&s| s), "every N in 1..=16 should occur");
    }

    #[test]
    fn empty_truth_rejected() {
        assert!(random_contours(&GroundTruth::from_values(vec![]), 0).is_err());
    }
}
