//! Gaussian-kernel sparsity function and the adaptive split/merge partition.

use serde::{Deserialize, Serialize};

use super::{Contour, ContourSource};
use crate::error::{Error, Result};
use crate::predictor::SpectrumPrediction;

const SCAN_POINTS: usize = 2048;
const MAX_SWEEPS: usize = 10;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KdeParams {
    pub n_min: usize,
    pub n_max: usize,
    pub w: f64,
    pub margin: f64,
}

impl Default for KdeParams {
    fn default() -> Self {
        Self {
            n_min: 10,
            n_max: 50,
            w: 10.0,
            margin: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalPartition {
    pub intervals: Vec<Interval>,
}

/// `G(t) = Σ_j exp(-w (t - λ_j)² / (end - start)²)`.
pub fn kde_sparsity(start: f64, end: f64, eigs_in: &[f64], w: f64, t: f64) -> Result<f64> {
    if !(end > start) {
        return Err(Error::Parameter(format!("degenerate interval [{start}, {end}]")));
    }
    if !(w > 0.0) {
        return Err(Error::Parameter(format!("kernel weight must be positive, got {w}")));
    }
    Ok(sparsity(start, end, eigs_in, w, t))
}

fn sparsity(start: f64, end: f64, eigs: &[f64], w: f64, t: f64) -> f64 {
    let s = w / ((end - start) * (end - start));
    eigs.iter().map(|&l| (-s * (t - l) * (t - l)).exp()).sum()
}

/// Minimizer of `G` over the open interval; values outside `[start, end]` are ignored.
pub fn find_cut(start: f64, end: f64, eigs_in: &[f64], w: f64) -> Result<f64> {
    kde_sparsity(start, end, &[], w, start)?;
    let inside: Vec<f64> = eigs_in.iter().copied().filter(|&l| l >= start && l <= end).collect();
    if inside.len() < 2 {
        return Err(Error::CutUndefined(inside.len()));
    }
    Ok(argmin_between(start, end, &inside, w, start, end))
}

/// Scan on `(lo, hi)` followed by golden-section refinement, with `G` built
/// on the interval `[start, end]`.
fn argmin_between(start: f64, end: f64, eigs: &[f64], w: f64, lo: f64, hi: f64) -> f64 {
    let g = |t: f64| sparsity(start, end, eigs, w, t);
    let step = (hi - lo) / (SCAN_POINTS + 1) as f64;
    let mut best = (1usize, f64::INFINITY);
    for i in 1..=SCAN_POINTS {
        let v = g(lo + i as f64 * step);
        if v < best.1 {
            best = (i, v);
        }
    }
    let (mut a, mut b) = (lo + (best.0 - 1) as f64 * step, lo + (best.0 + 1) as f64 * step);
    let tol = 1e-10 * (end - start);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    let scanned = lo + best.0 as f64 * step;
    if g(t) <= best.1 { t } else { scanned }
}

/// Working interval: bounds plus its sorted member values.
#[derive(Clone, Debug)]
struct Cell {
    start: f64,
    end: f64,
    members: Vec<f64>,
}

impl Cell {
    /// Splits at the sparsest point. With `min_side` set the cut is confined
    /// so both halves keep at least that many members.
    fn split(&self, w: f64, min_side: usize) -> (Cell, Cell) {
        let n = self.members.len();
        let k = min_side.max(1).min(n / 2);
        let lo = self.members[k - 1];
        let hi = self.members[n - k];
        let t = if hi > lo {
            argmin_between(self.start, self.end, &self.members, w, lo, hi)
        } else {
            lo
        };
        let at = self.members.partition_point(|&v| v < t).clamp(1, n - 1);
        // A cut landing on a member value moves to the gap midpoint.
        let t = if self.members[at - 1] < t && t < self.members[at] {
            t
        } else {
            0.5 * (self.members[at - 1] + self.members[at])
        };
        (
            Cell {
                start: self.start,
                end: t,
                members: self.members[..at].to_vec(),
            },
            Cell {
                start: t,
                end: self.end,
                members: self.members[at..].to_vec(),
            },
        )
    }
}

fn split_all(cells: Vec<Cell>, n_max: usize, w: f64, min_side: usize) -> Vec<Cell> {
    let mut out = Vec::with_capacity(cells.len());
    let mut stack: Vec<Cell> = cells.into_iter().rev().collect();
    while let Some(c) = stack.pop() {
        if c.members.len() > n_max && c.members.first() < c.members.last() {
            let (l, r) = c.split(w, min_side);
            stack.push(r);
            stack.push(l);
        } else {
            out.push(c);
        }
    }
    out
}

/// Merges the smallest undersized cell into its nearer neighbour (gap between
/// adjacent member values) until every cell reaches `n_min` or one cell remains.
fn merge_small(mut cells: Vec<Cell>, n_min: usize) -> (Vec<Cell>, bool) {
    let mut changed = false;
    loop {
        if cells.len() < 2 {
            return (cells, changed);
        }
        let Some(i) = (0..cells.len())
            .filter(|&i| cells[i].members.len() < n_min)
            .min_by_key(|&i| cells[i].members.len())
        else {
            return (cells, changed);
        };
        let gap_left = (i > 0).then(|| cells[i].members[0] - cells[i - 1].members.last().unwrap());
        let gap_right = (i + 1 < cells.len()).then(|| cells[i + 1].members[0] - cells[i].members.last().unwrap());
        let j = match (gap_left, gap_right) {
            (Some(l), Some(r)) => if l <= r { i - 1 } else { i + 1 },
            (Some(_), None) => i - 1,
            _ => i + 1,
        };
        let (a, b) = (i.min(j), i.max(j));
        let right = cells.remove(b);
        let left = &mut cells[a];
        left.end = right.end;
        left.members.extend(right.members);
        changed = true;
    }
}

/// Adaptive partition of a predicted spectrum into circles.
pub fn construct_contours(pred: &SpectrumPrediction, params: &KdeParams) -> Result<(IntervalPartition, Vec<Contour>)> {
    let KdeParams { n_min, n_max, w, margin } = *params;
    if pred.values.is_empty() {
        return Err(Error::EmptyPrediction);
    }
    if n_min < 1 || n_max < n_min {
        return Err(Error::Parameter(format!("need 1 <= n_min <= n_max, got {n_min}, {n_max}")));
    }
    if !(w > 0.0) || !(margin >= 0.0) {
        return Err(Error::Parameter(format!("need w > 0 and margin >= 0, got {w}, {margin}")));
    }
    let mut values = pred.values.clone();
    values.sort_by(f64::total_cmp);
    let m = values.len();
    let (lo, hi) = (values[0], values[m - 1]);
    let mut span = hi - lo;
    if span <= 0.0 {
        span = 1e-3 * lo.abs().max(f64::MIN_POSITIVE);
    }
    let ext = (margin * span / m as f64).max(1e-12 * span);
    let root = Cell {
        start: lo - ext,
        end: hi + ext,
        members: values,
    };

    let mut cells = split_all(vec![root], n_max, w, 1);
    for _ in 0..MAX_SWEEPS {
        let (merged, changed) = merge_small(cells, n_min);
        cells = split_all(merged, n_max, w, n_min);
        if !changed {
            break;
        }
    }

    let intervals: Vec<Interval> = cells
        .iter()
        .map(|c| Interval {
            start: c.start,
            end: c.end,
            count: c.members.len(),
        })
        .collect();
    let contours = intervals
        .iter()
        .map(|iv| {
            Contour::circle(0.5 * (iv.start + iv.end), 0.5 * (iv.end - iv.start), iv.count, ContourSource::Kde)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((IntervalPartition { intervals }, contours))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(values: Vec<f64>) -> SpectrumPrediction {
        SpectrumPrediction::new(values, crate::predictor::PredictionSource::NoisyOracle, "t").unwrap()
    }

    #[test]
    fn sparsity_examples() {
        assert_eq!(kde_sparsity(0.0, 1.0, &[0.5], 3.7, 0.5).unwrap(), 1.0);
        assert_eq!(kde_sparsity(0.0, 1.0, &[], 10.0, 0.3).unwrap(), 0.0);
        let v = kde_sparsity(0.0, 1.0, &[0.0, 1.0], 10.0, 0.5).unwrap();
        assert!((v - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
        assert!(kde_sparsity(1.0, 1.0, &[], 1.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_pair_cuts_at_midpoint() {
        let t = find_cut(0.0, 1.0, &[0.0, 1.0], 10.0).unwrap();
        assert!((t - 0.5).abs() < 1e-8, "{t}");
        let t = find_cut(2.0, 7.0, &[2.0, 7.0], 10.0).unwrap();
        assert!((t - 4.5).abs() < 1e-7, "{t}");
    }

    #[test]
    fn cut_needs_two_values() {
        assert!(matches!(find_cut(0.0, 1.0, &[0.5], 10.0), Err(Error::CutUndefined(1))));
        assert!(matches!(find_cut(0.0, 1.0, &[], 10.0), Err(Error::CutUndefined(0))));
    }

    #[test]
    fn small_prediction_gives_one_contour() {
        let v: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
        let (part, cs) = construct_contours(&pred(v.clone()), &KdeParams::default()).unwrap();
        assert_eq!(cs.len(), 1);
        assert_eq!(part.intervals[0].count, 30);
        assert!(v.iter().all(|&x| cs[0].contains_real(x)));
    }

    #[test]
    fn equispaced_hundred_respects_bounds() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (part, cs) = construct_contours(&pred(v.clone()), &KdeParams::default()).unwrap();
        let total: usize = part.intervals.iter().map(|i| i.count).sum();
        assert_eq!(total, 100);
        for iv in &part.intervals {
            assert!((10..=50).contains(&iv.count), "{part:?}");
        }
        for x in v {
            assert!(cs.iter().any(|c| c.contains_real(x)));
        }
    }
}
