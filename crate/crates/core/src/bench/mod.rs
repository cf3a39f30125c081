//! Benchmark harness: pipeline strategies, metrics, the random-contour
//! sensitivity study and report emission.

mod pipeline;
mod report;

pub use pipeline::{
    run_bench, run_pipeline, run_pipeline_on, run_sensitivity, run_sensitivity_seeds, BenchInstance, PipelineConfig,
    SensitivityReport, SensitivityRun,
};
pub use report::{write_report, Aggregate, BenchReport, CvRow, SpeedupRow};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::GroundTruth;

/// Default matching tolerance, relative to the spectral span.
pub const MATCH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "deepcontour")]
    DeepContour,
    #[serde(rename = "scout-arnoldi")]
    ScoutArnoldi,
    #[serde(rename = "scout-lanczos")]
    ScoutLanczos,
    #[serde(rename = "scout-ks")]
    ScoutKs,
    #[serde(rename = "scout+kde")]
    ScoutKde,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "oracle-kde")]
    OracleKde,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Self::DeepContour,
        Self::ScoutArnoldi,
        Self::ScoutLanczos,
        Self::ScoutKs,
        Self::ScoutKde,
        Self::Random,
        Self::OracleKde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::DeepContour => "deepcontour",
            Self::ScoutArnoldi => "scout-arnoldi",
            Self::ScoutLanczos => "scout-lanczos",
            Self::ScoutKs => "scout-ks",
            Self::ScoutKde => "scout+kde",
            Self::Random => "random",
            Self::OracleKde => "oracle-kde",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown strategy `{s}`")))
    }
}

/// One measurement. Times are wall-clock seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub problem_id: String,
    pub strategy: Strategy,
    pub tolerance: f64,
    pub prep_time: f64,
    pub solve_time: f64,
    pub total_time: f64,
    pub missed: usize,
    pub found: usize,
    pub contour_area: f64,
    pub seed: u64,
}

/// Greedy one-to-one matching: candidate pairs within `match_tol · span` are
/// taken in order of increasing distance. Returns `(matched, missed)`.
pub fn match_found(found: &[f64], truth: &GroundTruth, match_tol: f64) -> (usize, usize) {
    let t = &truth.eigenvalues;
    let scale = if truth.span() > 0.0 {
        truth.span()
    } else {
        t.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE)
    };
    let radius = match_tol * scale;
    let mut pairs = Vec::new();
    for (i, &f) in found.iter().enumerate() {
        for (j, &v) in t.iter().enumerate() {
            let d = (f - v).abs();
            if d <= radius {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used_f = vec![false; found.len()];
    let mut used_t = vec![false; t.len()];
    let mut matched = 0;
    for (_, i, j) in pairs {
        if !used_f[i] && !used_t[j] {
            used_f[i] = true;
            used_t[j] = true;
            matched += 1;
        }
    }
    (matched, t.len() - matched)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Speedup {
    pub e2e: f64,
    pub solver: f64,
}

/// `baseline / ours` for total and solve times.
pub fn speedup(baseline: &BenchRecord, ours: &BenchRecord) -> Result<Speedup> {
    if baseline.problem_id != ours.problem_id || baseline.tolerance != ours.tolerance {
        return Err(Error::Metric(format!(
            "records differ in problem or tolerance: {}@{} vs {}@{}",
            baseline.problem_id, baseline.tolerance, ours.problem_id, ours.tolerance
        )));
    }
    if !(ours.total_time > 0.0) || !(ours.solve_time > 0.0) {
        return Err(Error::Metric("zero denominator in speedup".into()));
    }
    Ok(Speedup {
        e2e: baseline.total_time / ours.total_time,
        solver: baseline.solve_time / ours.solve_time,
    })
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub(crate) fn stdev(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub(crate) fn median(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len() / 2;
    if s.len() % 2 == 1 {
        s[k]
    } else {
        0.5 * (s[k - 1] + s[k])
    }
}

/// `stdev / mean`, zero when every sample is zero.
pub(crate) fn coefficient_of_variation(x: &[f64]) -> f64 {
    let (m, s) = (mean(x), stdev(x));
    if s == 0.0 {
        0.0
    } else {
        s / m
    }
}
