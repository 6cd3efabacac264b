//! Lead-day evaluation, perfect-variable sensitivity scenarios and the
//! exhaustive predictor-subset sweep.
//!
//! The model is trained once on observed weather and then fed lead-`d`
//! forecasts. Rows missing a required input are skipped and counted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{PeakDataset, PeakRow, MAX_LEAD_DAY};
use crate::metrics::ErrorSample;
use crate::mlp::{self, FitConfig, LmConfig, MlpModel, SplitSpec};
use crate::rng::derive_seed;
use crate::variable::WeatherVariable;

/// Number of nonempty subsets of the five candidate predictors.
pub const SUBSET_COUNT: usize = 31;

/// MAPE (percent) and MAE (kWh) of peak-energy predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyMetrics {
    pub mape: f64,
    pub mae: f64,
    pub rows_used: usize,
    pub rows_skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadDayMetrics {
    pub lead_day: u8,
    #[serde(flatten)]
    pub metrics: EnergyMetrics,
}

/// Observed-input baseline restricted to the training and validation rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitBaseline {
    pub train: EnergyMetrics,
    pub validation: EnergyMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadDayEvaluation {
    pub inputs: Vec<WeatherVariable>,
    pub dataset_rows: usize,
    pub leads: Vec<LeadDayMetrics>,
    /// Observed inputs on every dataset row.
    pub baseline: EnergyMetrics,
    pub baseline_split: Option<SplitBaseline>,
}

impl LeadDayEvaluation {
    pub fn mape_curve(&self) -> Vec<f64> {
        self.leads.iter().map(|l| l.metrics.mape).collect()
    }
}

/// Where each model input comes from when building a prediction row.
#[derive(Debug, Clone, Copy, PartialEq)]
enum InputSource {
    Observed,
    Forecast { lead: u8, perfect: Option<WeatherVariable> },
}

fn input_vector(model: &MlpModel, row: &PeakRow, source: InputSource) -> Option<Vec<f64>> {
    model
        .inputs
        .iter()
        .map(|&v| match source {
            InputSource::Observed => row.observed.get(v),
            InputSource::Forecast { perfect: Some(p), .. } if p == v => row.observed.get(v),
            InputSource::Forecast { lead, .. } => row.forecast_for(lead).get(v),
        })
        .collect()
}

fn score<'a>(
    model: &MlpModel,
    rows: impl Iterator<Item = &'a PeakRow>,
    source: InputSource,
    lead_day: u8,
) -> Result<EnergyMetrics> {
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    let mut skipped = 0;
    for row in rows {
        match input_vector(model, row, source) {
            Some(x) => {
                actual.push(row.peak_energy_kwh);
                predicted.push(model.predict(&x)?);
            }
            None => skipped += 1,
        }
    }
    if actual.is_empty() {
        return Err(Error::NoUsableRows { lead_day });
    }
    let sample = ErrorSample::new(&actual, &predicted)?;
    Ok(EnergyMetrics {
        mape: sample.mape()?,
        mae: sample.mae(),
        rows_used: actual.len(),
        rows_skipped: skipped,
    })
}

fn lead_curve(model: &MlpModel, dataset: &PeakDataset, perfect: Option<WeatherVariable>) -> Result<Vec<LeadDayMetrics>> {
    (1..=MAX_LEAD_DAY)
        .map(|lead| {
            let metrics = score(model, dataset.rows.iter(), InputSource::Forecast { lead, perfect }, lead)?;
            Ok(LeadDayMetrics { lead_day: lead, metrics })
        })
        .collect()
}

/// Predicts every row from lead-`d` forecasts for d = 1..=6 and from
/// observed weather (baseline). A baseline with no usable rows reports lead
/// day 0.
pub fn evaluate_lead_days(model: &MlpModel, dataset: &PeakDataset) -> Result<LeadDayEvaluation> {
    Ok(LeadDayEvaluation {
        inputs: model.inputs.clone(),
        dataset_rows: dataset.len(),
        leads: lead_curve(model, dataset, None)?,
        baseline: score(model, dataset.rows.iter(), InputSource::Observed, 0)?,
        baseline_split: None,
    })
}

/// As [`evaluate_lead_days`], also reporting the baseline on the training and
/// validation rows (dataset indices).
pub fn evaluate_lead_days_split(
    model: &MlpModel,
    dataset: &PeakDataset,
    train_rows: &[usize],
    validation_rows: &[usize],
) -> Result<LeadDayEvaluation> {
    let pick = |rows: &[usize]| -> Result<Vec<&PeakRow>> {
        rows.iter()
            .map(|&i| {
                dataset.rows.get(i).ok_or(Error::OutOfRange {
                    what: "row index",
                    value: i as f64,
                    min: 0.0,
                    max: dataset.len() as f64 - 1.0,
                })
            })
            .collect()
    };
    let train = score(model, pick(train_rows)?.into_iter(), InputSource::Observed, 0)?;
    let validation = score(model, pick(validation_rows)?.into_iter(), InputSource::Observed, 0)?;
    let mut eval = evaluate_lead_days(model, dataset)?;
    eval.baseline_split = Some(SplitBaseline { train, validation });
    Ok(eval)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Input whose observed value replaces its forecast at every lead day.
    pub perfect_variable: WeatherVariable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioCurve {
    pub perfect_variable: WeatherVariable,
    pub leads: Vec<LeadDayMetrics>,
}

impl ScenarioCurve {
    pub fn mape_curve(&self) -> Vec<f64> {
        self.leads.iter().map(|l| l.metrics.mape).collect()
    }

    pub fn mean_mape(&self) -> f64 {
        self.leads.iter().map(|l| l.metrics.mape).sum::<f64>() / self.leads.len() as f64
    }
}

pub fn sensitivity(model: &MlpModel, dataset: &PeakDataset, spec: ScenarioSpec) -> Result<ScenarioCurve> {
    if !model.inputs.contains(&spec.perfect_variable) {
        return Err(Error::UnknownVariable(format!(
            "{} is not an input of the model ({})",
            spec.perfect_variable,
            model.inputs.iter().map(|v| v.code()).collect::<Vec<_>>().join(",")
        )));
    }
    Ok(ScenarioCurve {
        perfect_variable: spec.perfect_variable,
        leads: lead_curve(model, dataset, Some(spec.perfect_variable))?,
    })
}

/// One scenario per model input, in input order.
pub fn sensitivity_all(model: &MlpModel, dataset: &PeakDataset, exec: Execution) -> Result<Vec<ScenarioCurve>> {
    exec.map_indexed(model.inputs.len(), |k| {
        sensitivity(model, dataset, ScenarioSpec { perfect_variable: model.inputs[k] })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lm: LmConfig,
    pub split: SplitSpec,
    pub hidden: usize,
    pub restarts: usize,
    pub capacity_kwh: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        Self {
            lm: fit.lm,
            split: fit.split,
            hidden: fit.hidden,
            restarts: fit.restarts,
            capacity_kwh: fit.capacity_kwh,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetEntry {
    /// 1-based position after sorting by validation MAPE.
    pub rank: usize,
    /// Bit `i` set when `WeatherVariable::ALL[i]` is included.
    pub mask: u32,
    pub variables: Vec<WeatherVariable>,
    pub validation_mape: f64,
    pub train_mape: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSweepResult {
    /// Sorted by rank.
    pub entries: Vec<SubsetEntry>,
    pub rows_used: usize,
    pub rows_skipped: usize,
}

impl SubsetSweepResult {
    pub fn best(&self) -> &SubsetEntry {
        &self.entries[0]
    }

    pub fn by_mask(&self, mask: u32) -> Option<&SubsetEntry> {
        self.entries.iter().find(|e| e.mask == mask)
    }
}

/// Trains one model per nonempty predictor subset on rows with all five
/// observed variables, sharing one train/validation split. The subset with
/// mask `m` trains with seed `derive_seed(cfg.lm.seed, [m])`. Ties in
/// validation MAPE rank the smaller mask first.
pub fn subset_sweep(dataset: &PeakDataset, cfg: &SweepConfig, exec: Execution) -> Result<SubsetSweepResult> {
    let complete = PeakDataset {
        rows: dataset
            .rows
            .iter()
            .filter(|r| r.observed.select(&WeatherVariable::ALL).is_some())
            .cloned()
            .collect(),
    };
    let results = exec.map_indexed(SUBSET_COUNT, |k| -> Result<SubsetEntry> {
        let mask = k as u32 + 1;
        let seed = derive_seed(cfg.lm.seed, &[u64::from(mask)]);
        let fit_cfg = FitConfig {
            inputs: WeatherVariable::from_mask(mask),
            hidden: cfg.hidden,
            lm: LmConfig { seed, ..cfg.lm },
            split: cfg.split,
            restarts: cfg.restarts,
            capacity_kwh: cfg.capacity_kwh,
        };
        let fit = mlp::fit(&complete, &fit_cfg, Execution::Sequential)?;
        Ok(SubsetEntry {
            rank: 0,
            mask,
            variables: fit_cfg.inputs,
            validation_mape: fit.validation_mape(&complete)?,
            train_mape: fit.train_mape(&complete)?,
            seed,
        })
    });
    let mut entries = results.into_iter().collect::<Result<Vec<_>>>()?;
    entries.sort_by(|a, b| a.validation_mape.total_cmp(&b.validation_mape).then(a.mask.cmp(&b.mask)));
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    Ok(SubsetSweepResult {
        entries,
        rows_used: complete.len(),
        rows_skipped: dataset.len() - complete.len(),
    })
}
