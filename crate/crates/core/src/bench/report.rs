use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{coefficient_of_variation, mean, median, speedup, stdev, BenchRecord, Strategy};
use crate::error::{Error, Result};

pub const METRICS: [&str; 6] = ["prep_time", "solve_time", "total_time", "missed", "found", "contour_area"];

fn metric(r: &BenchRecord, name: &str) -> f64 {
    match name {
        "prep_time" => r.prep_time,
        "solve_time" => r.solve_time,
        "total_time" => r.total_time,
        "missed" => r.missed as f64,
        "found" => r.found as f64,
        "contour_area" => r.contour_area,
        _ => unreachable!("unknown metric {name}"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub strategy: Strategy,
    pub tolerance: f64,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub stdev: f64,
    pub median: f64,
}

/// `baseline / deepcontour` ratios, paired on (problem, seed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub baseline: Strategy,
    pub tolerance: f64,
    pub n_pairs: usize,
    pub e2e_mean: f64,
    pub e2e_median: f64,
    pub solver_mean: f64,
    pub solver_median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub strategy: Strategy,
    pub tolerance: f64,
    pub cv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub aggregates: Vec<Aggregate>,
    pub speedups: Vec<SpeedupRow>,
    pub cv: Vec<CvRow>,
}

fn groups(records: &[BenchRecord]) -> BTreeMap<(Strategy, u64), Vec<&BenchRecord>> {
    let mut g: BTreeMap<(Strategy, u64), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        g.entry((r.strategy, r.tolerance.to_bits())).or_default().push(r);
    }
    g
}

impl BenchReport {
    /// Derives every aggregate from the records.
    pub fn from_records(records: Vec<BenchRecord>) -> Self {
        let mut aggregates = Vec::new();
        let mut cv = Vec::new();
        for ((strategy, tol_bits), rs) in groups(&records) {
            let tolerance = f64::from_bits(tol_bits);
            for name in METRICS {
                let x: Vec<f64> = rs.iter().map(|r| metric(r, name)).collect();
                aggregates.push(Aggregate {
                    strategy,
                    tolerance,
                    metric: name.into(),
                    n: x.len(),
                    mean: mean(&x),
                    stdev: stdev(&x),
                    median: median(&x),
                });
            }
            let t: Vec<f64> = rs.iter().map(|r| r.solve_time).collect();
            cv.push(CvRow { strategy, tolerance, cv: coefficient_of_variation(&t) });
        }

        let mut speedups = Vec::new();
        let ours: Vec<&BenchRecord> = records.iter().filter(|r| r.strategy == Strategy::DeepContour).collect();
        for ((baseline, tol_bits), rs) in groups(&records) {
            if baseline == Strategy::DeepContour {
                continue;
            }
            let (mut e2e, mut solver) = (Vec::new(), Vec::new());
            for b in rs {
                let partner = ours
                    .iter()
                    .find(|o| o.problem_id == b.problem_id && o.seed == b.seed && o.tolerance.to_bits() == tol_bits);
                if let Some(o) = partner {
                    match speedup(b, o) {
                        Ok(s) => {
                            e2e.push(s.e2e);
                            solver.push(s.solver);
                        }
                        Err(e) => log::warn!("skipping pair {}: {e}", b.problem_id),
                    }
                }
            }
            if !e2e.is_empty() {
                speedups.push(SpeedupRow {
                    baseline,
                    tolerance: f64::from_bits(tol_bits),
                    n_pairs: e2e.len(),
                    e2e_mean: mean(&e2e),
                    e2e_median: median(&e2e),
                    solver_mean: mean(&solver),
                    solver_median: median(&solver),
                });
            }
        }
        Self { records, aggregates, speedups, cv }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::format("report", 0, e.to_string()))
    }

    pub fn from_json(text: &str, source_name: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::format(source_name, e.line(), e.to_string()))
    }

    /// Long-format CSV: `problem_id,strategy,tolerance,metric,value`, one row per record metric.
    pub fn to_long_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::format("report.csv", 0, e.to_string());
        w.write_record(["problem_id", "strategy", "tolerance", "metric", "value"]).map_err(io)?;
        for r in &self.records {
            for name in METRICS {
                w.write_record([
                    r.problem_id.clone(),
                    r.strategy.to_string(),
                    format!("{:e}", r.tolerance),
                    name.to_string(),
                    metric(r, name).to_string(),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::format("report.csv", 0, e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Writes `report.json` and `report.csv` into `dir`.
pub fn write_report(dir: &Path, report: &BenchReport) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("report.json"), report.to_json()?)?;
    fs::write(dir.join("report.csv"), report.to_long_csv()?)?;
    Ok(())
}
