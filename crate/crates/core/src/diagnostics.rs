//! Residual autocorrelation with ±1.96/√N significance bounds.

use chrono::Duration;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AlignedPair;

pub const DEFAULT_MAX_LAG: usize = 100;
/// Fraction of out-of-bound lags above which residuals are declared
/// autocorrelated.
pub const EXCEED_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfResult {
    /// `coefficients[k - 1]` is r_k for k = 1..=max_lag.
    pub coefficients: Vec<f64>,
    pub bound: f64,
    pub n: usize,
    pub exceed_fraction: f64,
}

impl AcfResult {
    pub fn max_lag(&self) -> usize {
        self.coefficients.len()
    }

    /// r_k, with r_0 = 1.
    pub fn at(&self, lag: usize) -> f64 {
        if lag == 0 {
            1.0
        } else {
            self.coefficients[lag - 1]
        }
    }
}

/// Biased (divide-by-N) sample autocorrelation for lags 1..=max_lag.
pub fn acf(residuals: &[f64], max_lag: usize) -> Result<AcfResult> {
    let n = residuals.len();
    if n < max_lag + 1 || n < 2 {
        return Err(Error::TooShort { n, max_lag });
    }
    let mean = residuals.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = residuals.iter().map(|e| e - mean).collect();
    let denom: f64 = centered.iter().map(|c| c * c).sum();
    if denom == 0.0 || residuals.iter().all(|&e| e == residuals[0]) {
        return Err(Error::ConstantSeries);
    }
    let coefficients: Vec<f64> = (1..=max_lag)
        .map(|k| {
            let num: f64 = centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            num / denom
        })
        .collect();
    let bound = 1.96 / (n as f64).sqrt();
    let exceed = coefficients.iter().filter(|r| r.abs() > bound).count();
    let exceed_fraction = if max_lag == 0 {
        0.0
    } else {
        exceed as f64 / max_lag as f64
    };
    Ok(AcfResult {
        coefficients,
        bound,
        n,
        exceed_fraction,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Autocorrelated,
    ConsistentWithWhiteNoise,
}

impl Verdict {
    pub fn describe(self) -> &'static str {
        match self {
            Verdict::Autocorrelated => "autocorrelated",
            Verdict::ConsistentWithWhiteNoise => "consistent with white noise",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitenessReport {
    pub acf: AcfResult,
    pub verdict: Verdict,
    /// Places where consecutive pairs are more than one hour apart. The
    /// series is concatenated across them, which mixes lags slightly.
    pub gaps: usize,
}

/// ACF of observed-minus-forecast residuals of time-sorted pairs.
pub fn residual_whiteness(pairs: &[AlignedPair], max_lag: usize) -> Result<WhitenessReport> {
    let residuals: Vec<f64> = pairs.iter().map(AlignedPair::residual).collect();
    let gaps = pairs
        .windows(2)
        .filter(|w| w[1].valid_time - w[0].valid_time != Duration::hours(1))
        .count();
    let acf = acf(&residuals, max_lag)?;
    let verdict = if acf.exceed_fraction > EXCEED_LIMIT {
        Verdict::Autocorrelated
    } else {
        Verdict::ConsistentWithWhiteNoise
    };
    Ok(WhitenessReport { acf, verdict, gaps })
}
