//! Bootstrap percentile confidence intervals for mean-type error statistics.
//!
//! Replicate `r` draws from its own ChaCha8 stream `(seed, r)`, so the
//! estimate is bit-identical whatever the thread count.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::AlignedPair;
use crate::metrics::ErrorSample;
use crate::rng::{derive_seed, substream};
use crate::variable::WeatherVariable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub cycles: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            cycles: 2500,
            confidence: 0.95,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::InvalidConfig("bootstrap cycles must be at least 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidence {} is not in (0, 1)",
                self.confidence
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Statistic on the original sample plus percentile bounds. `lower <= upper`
/// always; the point estimate is not guaranteed to lie inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Percentile CI for the mean of `values`.
pub fn bootstrap_ci(values: &[f64], cfg: &BootstrapConfig) -> Result<CiEstimate> {
    bootstrap_ci_with(values, mean, cfg, Execution::default())
}

/// Percentile CI for an arbitrary statistic, with explicit scheduling.
pub fn bootstrap_ci_with<F>(
    values: &[f64],
    statistic: F,
    cfg: &BootstrapConfig,
    exec: Execution,
) -> Result<CiEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    cfg.validate()?;
    let n = values.len();
    let mut replicates = exec.map_indexed_init(
        cfg.cycles,
        || Vec::with_capacity(n),
        |buf: &mut Vec<f64>, r| {
            let mut rng = substream(cfg.seed, r as u64);
            buf.clear();
            buf.extend((0..n).map(|_| values[rng.random_range(0..n)]));
            statistic(buf)
        },
    );
    replicates.sort_by(f64::total_cmp);
    let tail = (1.0 - cfg.confidence) / 2.0;
    Ok(CiEstimate {
        point: statistic(values),
        lower: percentile_sorted(&replicates, tail),
        upper: percentile_sorted(&replicates, 1.0 - tail),
    })
}

/// Empirical quantile with linear interpolation between closest ranks:
/// position `h = (n - 1) p`.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bias and MAE of observed-minus-forecast errors with bootstrap CIs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub variable: WeatherVariable,
    pub lead_day: u8,
    pub n: usize,
    pub bias: f64,
    pub mae: f64,
    pub mae_ci: CiEstimate,
    pub bias_ci: CiEstimate,
}

pub fn error_stats(pairs: &[AlignedPair], cfg: &BootstrapConfig) -> Result<ErrorStats> {
    error_stats_with(pairs, cfg, Execution::default())
}

pub fn error_stats_with(
    pairs: &[AlignedPair],
    cfg: &BootstrapConfig,
    exec: Execution,
) -> Result<ErrorStats> {
    let first = pairs.first().ok_or(Error::EmptySample)?;
    if pairs
        .iter()
        .any(|p| p.variable != first.variable || p.lead_day != first.lead_day)
    {
        return Err(Error::InvalidConfig(
            "error_stats needs pairs of a single variable and lead day".into(),
        ));
    }
    let observed: Vec<f64> = pairs.iter().map(|p| p.observed_value).collect();
    let forecast: Vec<f64> = pairs.iter().map(|p| p.forecast_value).collect();
    let sample = ErrorSample::new(&observed, &forecast)?;
    let residuals: Vec<f64> = pairs.iter().map(AlignedPair::residual).collect();
    let abs: Vec<f64> = residuals.iter().map(|e| e.abs()).collect();
    let mae_ci = bootstrap_ci_with(&abs, mean, &cfg.with_seed(derive_seed(cfg.seed, &[0])), exec)?;
    let bias_ci = bootstrap_ci_with(&residuals, mean, &cfg.with_seed(derive_seed(cfg.seed, &[1])), exec)?;
    Ok(ErrorStats {
        variable: first.variable,
        lead_day: first.lead_day,
        n: pairs.len(),
        bias: sample.bias(),
        mae: sample.mae(),
        mae_ci,
        bias_ci,
    })
}
