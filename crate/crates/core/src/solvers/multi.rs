use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cirr_solve, feast_solve, EigenResult, SolveStats, SolverConfig};
use crate::contours::Contour;
use crate::error::{Error, Result};
use crate::linalg::MatrixPencil;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Cirr,
    Feast,
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cirr" => Ok(Self::Cirr),
            "feast" => Ok(Self::Feast),
            _ => Err(Error::Parameter(format!("unknown solver `{s}` (cirr|feast)"))),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::Cirr => "cirr",
            Self::Feast => "feast",
        })
    }
}

#[derive(Debug)]
pub struct ContourOutcome {
    pub contour: Contour,
    pub result: Result<EigenResult>,
}

#[derive(Debug)]
pub struct MultiResult {
    pub outcomes: Vec<ContourOutcome>,
    /// Union over contours after removing duplicates, ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub stats: SolveStats,
}

#[derive(Serialize)]
struct OutcomeJson<'a> {
    contour: &'a Contour,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<&'a SolveStats>,
}

#[derive(Serialize)]
struct MultiJson<'a> {
    results: Vec<OutcomeJson<'a>>,
    eigenvalues: &'a [f64],
    residuals: &'a [f64],
    stats: &'a SolveStats,
}

impl MultiResult {
    pub fn n_failed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.result.is_err()).count()
    }

    pub fn to_json(&self) -> Result<String> {
        let results = self
            .outcomes
            .iter()
            .map(|o| match &o.result {
                Ok(r) => OutcomeJson {
                    contour: &o.contour,
                    status: "ok".into(),
                    eigenvalues: Some(&r.eigenvalues),
                    residuals: Some(&r.residuals),
                    stats: Some(&r.stats),
                },
                Err(e) => OutcomeJson {
                    contour: &o.contour,
                    status: e.to_string(),
                    eigenvalues: None,
                    residuals: None,
                    stats: None,
                },
            })
            .collect();
        let doc = MultiJson {
            results,
            eigenvalues: &self.eigenvalues,
            residuals: &self.residuals,
            stats: &self.stats,
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::format("result", 0, e.to_string()))
    }
}

fn contour_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Solves every contour independently; a failing contour leaves its siblings intact.
pub fn solve_multi(pencil: &MatrixPencil, contours: &[Contour], cfg: &SolverConfig, solver: SolverKind, seed: u64) -> MultiResult {
    let outcomes: Vec<ContourOutcome> = contours
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let s = contour_seed(seed, i);
            let result = match solver {
                SolverKind::Cirr => cirr_solve(pencil, c, cfg, s),
                SolverKind::Feast => feast_solve(pencil, c, cfg, s),
            };
            ContourOutcome { contour: *c, result }
        })
        .collect();

    let (lo, hi) = contours.iter().map(Contour::real_interval).fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| {
        (a.0.min(b.0), a.1.max(b.1))
    });
    let dedup_tol = 1e-8 * (hi - lo).max(0.0);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    let mut stats = SolveStats::default();
    for o in &outcomes {
        if let Ok(r) = &o.result {
            stats.accumulate(&r.stats);
            pairs.extend(r.eigenvalues.iter().copied().zip(r.residuals.iter().copied()));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for p in pairs {
        match merged.last_mut() {
            Some(last) if (p.0 - last.0).abs() <= dedup_tol => {
                if p.1 < last.1 {
                    *last = p;
                }
            }
            _ => merged.push(p),
        }
    }
    MultiResult {
        outcomes,
        eigenvalues: merged.iter().map(|p| p.0).collect(),
        residuals: merged.iter().map(|p| p.1).collect(),
        stats,
    }
}
