//! Partition a clustered spectrum with the KDE sparsity function.
//!
//! ```bash
//! cargo run --example kde_contours
//! ```

use contour_eig::contours::{construct_contours, kde_sparsity, KdeParams};
use contour_eig::predictor::{PredictionSource, SpectrumPrediction};

fn main() -> contour_eig::Result<()> {
    // Three clusters of 40, 25 and 60 values with clear gaps between them.
    let mut values = Vec::new();
    for (start, count, step) in [(1.0, 40, 0.05), (5.0, 25, 0.08), (9.0, 60, 0.04)] {
        values.extend((0..count).map(|i| start + step * i as f64));
    }
    let pred = SpectrumPrediction::new(values.clone(), PredictionSource::NoisyOracle, "clusters")?;

    let (lo, hi) = (values[0], values[values.len() - 1]);
    println!("G(t) on [{lo}, {hi}] with w = 10:");
    for k in 0..=12 {
        let t = lo + (hi - lo) * k as f64 / 12.0;
        let g = kde_sparsity(lo, hi, &values, 10.0, t)?;
        println!("  t = {t:6.3}  {:<40} {g:.2}", "#".repeat((g / 3.0) as usize));
    }

    for w in [1.0, 10.0, 50.0] {
        let (part, contours) = construct_contours(&pred, &KdeParams { w, ..KdeParams::default() })?;
        println!("w = {w}:");
        for (iv, c) in part.intervals.iter().zip(&contours) {
            println!("  [{:7.3}, {:7.3}] holds {:>2}  area {:.3}", iv.start, iv.end, iv.count, c.area());
        }
    }
    Ok(())
}
