//! Spectrum predictions: the file boundary to external predictors and stub
//! predictors used in place of a trained model.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::contours::RitzEstimate;
use crate::error::{Error, Result};
use crate::problems::GroundTruth;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictionSource {
    Eno,
    NoisyOracle,
    ScoutRitz,
}

impl FromStr for PredictionSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eno" => Ok(Self::Eno),
            "noisy-oracle" => Ok(Self::NoisyOracle),
            "scout-ritz" => Ok(Self::ScoutRitz),
            _ => Err(Error::Validation(format!("unknown prediction source `{s}`"))),
        }
    }
}

impl fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Self::Eno => "eno",
            Self::NoisyOracle => "noisy-oracle",
            Self::ScoutRitz => "scout-ritz",
        })
    }
}

/// Predicted eigenvalues, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumPrediction {
    pub values: Vec<f64>,
    pub source: PredictionSource,
    pub problem_id: String,
}

impl SpectrumPrediction {
    pub fn new(values: Vec<f64>, source: PredictionSource, problem_id: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyPrediction);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("prediction contains non-finite values".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Validation("prediction values must be sorted ascending".into()));
        }
        Ok(Self {
            values,
            source,
            problem_id: problem_id.into(),
        })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }
}

/// On-disk layout, schema version 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionFile {
    pub schema_version: u32,
    pub problem_id: String,
    pub source: String,
    pub values: Vec<f64>,
    pub created_at: String,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

pub fn parse_prediction(text: &str, source_name: &str) -> Result<SpectrumPrediction> {
    let fmt_err = |e: serde_json::Error| Error::format(source_name, e.line(), e.to_string());
    let probe: VersionProbe = serde_json::from_str(text).map_err(fmt_err)?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(Error::Version(probe.schema_version));
    }
    let file: PredictionFile = serde_json::from_str(text).map_err(fmt_err)?;
    let source = file.source.parse()?;
    if file.values.is_empty() {
        return Err(Error::Validation("prediction has no values".into()));
    }
    SpectrumPrediction::new(file.values, source, file.problem_id)
}

pub fn load_prediction(path: &Path) -> Result<SpectrumPrediction> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::format(&name, 0, format!("cannot read: {e}")))?;
    parse_prediction(&text, &name)
}

pub fn prediction_to_json(pred: &SpectrumPrediction) -> Result<String> {
    let file = PredictionFile {
        schema_version: SCHEMA_VERSION,
        problem_id: pred.problem_id.clone(),
        source: pred.source.to_string(),
        values: pred.values.clone(),
        created_at: chrono::Utc::now().to_rfc3339(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::format("prediction", 0, e.to_string()))
}

pub fn write_prediction(path: &Path, pred: &SpectrumPrediction) -> Result<()> {
    fs::write(path, prediction_to_json(pred)?)?;
    Ok(())
}

/// Truth plus Gaussian noise of standard deviation `rel_noise · span`, re-sorted.
pub fn noisy_oracle_predict(truth: &GroundTruth, rel_noise: f64, seed: u64, problem_id: &str) -> Result<SpectrumPrediction> {
    if !(rel_noise >= 0.0) {
        return Err(Error::Parameter(format!("rel_noise must be >= 0, got {rel_noise}")));
    }
    let mut values = truth.eigenvalues.clone();
    let sigma = rel_noise * truth.span();
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, sigma).expect("positive sigma");
        values.iter_mut().for_each(|v| *v += normal.sample(&mut rng));
        values.sort_by(f64::total_cmp);
    }
    SpectrumPrediction::new(values, PredictionSource::NoisyOracle, problem_id)
}

pub fn ritz_as_prediction(ritz: &RitzEstimate, problem_id: &str) -> Result<SpectrumPrediction> {
    let mut values = ritz.ritz_values.clone();
    values.sort_by(f64::total_cmp);
    SpectrumPrediction::new(values, PredictionSource::ScoutRitz, problem_id)
}

/// Mean squared error after standardizing each set by the truth's mean and deviation.
pub fn standardized_mse(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() || truth.len() < 2 {
        return Err(Error::Dimension("standardized_mse needs equal lengths >= 2".into()));
    }
    let n = truth.len() as f64;
    let mean = truth.iter().sum::<f64>() / n;
    let sd = (truth.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return Err(Error::Metric("truth has zero variance".into()));
    }
    Ok(pred.iter().zip(truth).map(|(p, t)| ((p - t) / sd).powi(2)).sum::<f64>() / n)
}
