//! Synthetic observed weather, lead-day forecasts and hourly PV energy with
//! known ground truth.
//!
//! Forecast errors follow `forecast = observed - bias + sigma(d) * z(t)`,
//! where `z` is a unit-variance AR(1) series per variable and lead day, so
//! audited Bias recovers the planted sign and MAE grows with lead day.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{
    self, lead_day, EnergyRecord, ForecastRecord, ForecastSeries, ObservationRecord,
    ObservationSeries, SkyCondition, DEFAULT_CAPACITY_KWH, MAX_LEAD_DAY,
};
use crate::rng::{derive_seed, substream};
use crate::variable::WeatherVariable;

pub const GROUND_TRUTH_SCHEMA_VERSION: u32 = 1;

const LEADS: usize = MAX_LEAD_DAY as usize;

// Nominal standardization used by the energy function.
const T_MEAN: f64 = 12.0;
const T_SCALE: f64 = 8.0;
const RH_MEAN: f64 = 65.0;
const RH_SCALE: f64 = 15.0;
const SC_MEAN: f64 = 50.0;
const SC_SCALE: f64 = 30.0;

/// Planted forecast error for one variable. `bias` uses the
/// observed-minus-forecast convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadErrorModel {
    pub bias: f64,
    pub sigma: [f64; LEADS],
}

impl LeadErrorModel {
    pub fn linear(bias: f64, first: f64, step: f64) -> Self {
        Self {
            bias,
            sigma: std::array::from_fn(|d| first + step * d as f64),
        }
    }

    pub fn exact() -> Self {
        Self {
            bias: 0.0,
            sigma: [0.0; LEADS],
        }
    }
}

/// Peak-hour energy as a fraction of capacity:
/// `base + temperature*zT + rel_humidity*zRH + sky_cover*zSC + noise*eps`,
/// clamped to [0.05, 1], with z-scores on fixed nominal scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub base: f64,
    pub sky_cover: f64,
    pub rel_humidity: f64,
    pub temperature: f64,
    pub noise: f64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            base: 0.6,
            sky_cover: -0.07,
            rel_humidity: -0.12,
            temperature: 0.06,
            noise: 0.08,
        }
    }
}

impl EnergyModel {
    fn coefficient(&self, var: WeatherVariable) -> f64 {
        match var {
            WeatherVariable::SkyCover => self.sky_cover,
            WeatherVariable::RelHumidity => self.rel_humidity,
            WeatherVariable::Temperature => self.temperature,
            _ => 0.0,
        }
    }

    /// Input variable with the largest coefficient magnitude.
    pub fn dominant(&self) -> WeatherVariable {
        [
            WeatherVariable::SkyCover,
            WeatherVariable::RelHumidity,
            WeatherVariable::Temperature,
        ]
        .into_iter()
        .max_by(|a, b| self.coefficient(*a).abs().total_cmp(&self.coefficient(*b).abs()))
        .expect("nonempty")
    }

    pub fn informative(&self) -> Vec<WeatherVariable> {
        WeatherVariable::ALL
            .into_iter()
            .filter(|&v| self.coefficient(v) != 0.0)
            .collect()
    }

    fn fraction(&self, sky_pct: f64, rh: f64, t: f64, eps: f64) -> f64 {
        let g = self.base
            + self.temperature * (t - T_MEAN) / T_SCALE
            + self.rel_humidity * (rh - RH_MEAN) / RH_SCALE
            + self.sky_cover * (sky_pct - SC_MEAN) / SC_SCALE
            + self.noise * eps;
        g.clamp(0.05, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub days: usize,
    pub seed: u64,
    pub start: NaiveDate,
    pub capacity_kwh: f64,
    pub energy: EnergyModel,
    /// Indexed by [`WeatherVariable::index`].
    pub errors: [LeadErrorModel; 5],
    /// AR(1) coefficient of the hourly forecast-error series.
    pub ar_coefficient: f64,
    /// 1 derives dew point from temperature and humidity; 0 makes it an
    /// independent series.
    pub dew_point_coupling: f64,
    pub issue_every_hours: u32,
    /// Probability that an observed cell is left empty.
    pub missing_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            days: 365,
            seed: 0,
            start: NaiveDate::from_ymd_opt(2016, 5, 20).expect("valid date"),
            capacity_kwh: DEFAULT_CAPACITY_KWH,
            energy: EnergyModel::default(),
            errors: [
                LeadErrorModel::linear(-6.0, 22.0, 3.0),
                LeadErrorModel::linear(-2.2, 3.0, 0.5),
                LeadErrorModel::linear(-2.0, 10.0, 1.0),
                LeadErrorModel::linear(-2.0, 3.0, 0.5),
                LeadErrorModel::linear(1.8, 3.0, 0.35),
            ],
            ar_coefficient: 0.8,
            dew_point_coupling: 1.0,
            issue_every_hours: 12,
            missing_fraction: 0.0,
        }
    }
}

impl SynthConfig {
    pub fn error(&self, var: WeatherVariable) -> &LeadErrorModel {
        &self.errors[var.index()]
    }

    pub fn error_mut(&mut self, var: WeatherVariable) -> &mut LeadErrorModel {
        &mut self.errors[var.index()]
    }

    /// Forecasts equal to observations.
    pub fn noiseless(mut self) -> Self {
        self.errors = [LeadErrorModel::exact(); 5];
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.days < 30 {
            return Err(Error::InvalidConfig(format!("days = {} < 30", self.days)));
        }
        if !(self.ar_coefficient.abs() < 1.0) {
            return Err(Error::InvalidConfig("|AR coefficient| must be < 1".into()));
        }
        for v in WeatherVariable::ALL {
            let s = &self.error(v).sigma;
            if s.iter().any(|x| *x < 0.0) || s.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "sigma for {v} must be nonnegative and nondecreasing in lead day"
                )));
            }
        }
        if self.issue_every_hours == 0 || self.issue_every_hours > 23 {
            return Err(Error::InvalidConfig("issue interval must be 1..=23 hours".into()));
        }
        if !(0.0..1.0).contains(&self.missing_fraction) {
            return Err(Error::InvalidConfig("missing fraction must lie in [0, 1)".into()));
        }
        if !(self.capacity_kwh > 0.0) {
            return Err(Error::InvalidConfig("capacity must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub days: usize,
    pub start: NaiveDate,
    pub capacity_kwh: f64,
    pub energy: EnergyModel,
    pub dominant_variable: WeatherVariable,
    pub informative_variables: Vec<WeatherVariable>,
    pub errors: Vec<PlantedError>,
    pub ar_coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedError {
    pub variable: WeatherVariable,
    pub bias: f64,
    pub sigma: [f64; LEADS],
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub observed: ObservationSeries,
    pub forecast: ForecastSeries,
    pub energy: Vec<EnergyRecord>,
    pub truth: GroundTruth,
}

impl SynthData {
    /// Writes observed.csv, forecast.csv, energy.csv and ground_truth.json.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.observed
            .write(BufWriter::new(File::create(dir.join("observed.csv"))?))?;
        self.forecast
            .write(BufWriter::new(File::create(dir.join("forecast.csv"))?))?;
        ingest::write_energy(&self.energy, BufWriter::new(File::create(dir.join("energy.csv"))?))?;
        #[derive(Serialize)]
        struct Document<'a> {
            schema_version: u32,
            #[serde(flatten)]
            truth: &'a GroundTruth,
        }
        let doc = Document { schema_version: GROUND_TRUTH_SCHEMA_VERSION, truth: &self.truth };
        let mut json = serde_json::to_string_pretty(&doc)?;
        json.push('\n');
        fs::write(dir.join("ground_truth.json"), json)?;
        Ok(())
    }
}

/// Underlying hourly weather before rounding and categorization.
#[derive(Debug, Clone, Copy)]
struct TrueHour {
    sky_pct: f64,
    dew_point: f64,
    rel_humidity: f64,
    temperature: f64,
    wind_speed: f64,
}

impl TrueHour {
    fn get(&self, var: WeatherVariable) -> f64 {
        match var {
            WeatherVariable::SkyCover => self.sky_pct,
            WeatherVariable::DewPoint => self.dew_point,
            WeatherVariable::RelHumidity => self.rel_humidity,
            WeatherVariable::Temperature => self.temperature,
            WeatherVariable::WindSpeed => self.wind_speed,
        }
    }
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Stationary unit-variance AR(1) series.
fn ar1(rng: &mut ChaCha8Rng, n: usize, phi: f64) -> Vec<f64> {
    let innovation = (1.0 - phi * phi).sqrt();
    let mut out = Vec::with_capacity(n);
    let mut z = normal(rng);
    for _ in 0..n {
        out.push(z);
        z = phi * z + innovation * normal(rng);
    }
    out
}

fn clamp_var(var: WeatherVariable, x: f64) -> f64 {
    match var {
        WeatherVariable::SkyCover | WeatherVariable::RelHumidity => x.clamp(0.0, 100.0),
        WeatherVariable::WindSpeed => x.max(0.0),
        _ => x,
    }
}

/// Daylight fraction of hour `h` (0 at night, 1 at solar noon).
fn daylight(h: u32, day_length: f64) -> f64 {
    let sunrise = 12.0 - day_length / 2.0;
    let x = (f64::from(h) - sunrise) / day_length;
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (PI * x).sin()
    }
}

fn day_length(date: NaiveDate) -> f64 {
    // Longest near the June solstice (day-of-year 172).
    12.0 + 3.0 * (2.0 * PI * (f64::from(date.ordinal()) - 80.0) / 365.0).sin()
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    cfg.validate()?;
    let hours = cfg.days * 24;
    let t0: NaiveDateTime = cfg.start.and_hms_opt(0, 0, 0).expect("midnight");
    let hour_at = |i: usize| t0 + Duration::hours(i as i64);

    let mut weather_rng = substream(derive_seed(cfg.seed, &[1]), 0);
    let mut truth_hours = Vec::with_capacity(hours);
    let mut day_noise = Vec::with_capacity(cfg.days);
    let (mut t_anom, mut rh_anom, mut dp_anom) = (0.0, 0.0, 0.0);
    for day in 0..cfg.days {
        let date = cfg.start + Duration::days(day as i64);
        let season = (2.0 * PI * (f64::from(date.ordinal()) - 110.0) / 365.0).sin();
        t_anom = 0.6 * t_anom + 0.8 * 3.5 * normal(&mut weather_rng);
        rh_anom = 0.5 * rh_anom + 0.866 * 12.0 * normal(&mut weather_rng);
        dp_anom = 0.6 * dp_anom + 0.8 * normal(&mut weather_rng);
        let t_day = T_MEAN + 9.0 * season + t_anom;
        let rh_day = RH_MEAN + rh_anom;
        let sky_day = SC_MEAN + 0.8 * rh_anom + 22.0 * normal(&mut weather_rng);
        let wind_day = 8.0 + 2.5 * normal(&mut weather_rng);
        day_noise.push(normal(&mut weather_rng));
        for h in 0..24u32 {
            let diurnal = (2.0 * PI * (f64::from(h) - 15.0) / 24.0).cos();
            let temperature = t_day + 4.0 * diurnal + 0.4 * normal(&mut weather_rng);
            let rel_humidity =
                (rh_day - 10.0 * diurnal + 1.5 * normal(&mut weather_rng)).clamp(5.0, 100.0);
            let coupled = temperature - (100.0 - rel_humidity) / 5.0 + 1.5 * dp_anom;
            let independent = 5.0 + 6.0 * dp_anom;
            let dew_point = cfg.dew_point_coupling * coupled
                + (1.0 - cfg.dew_point_coupling) * independent
                + 0.3 * normal(&mut weather_rng);
            truth_hours.push(TrueHour {
                sky_pct: (sky_day + 5.0 * normal(&mut weather_rng)).clamp(0.0, 100.0),
                dew_point,
                rel_humidity,
                temperature,
                wind_speed: (wind_day + 1.5 * diurnal + normal(&mut weather_rng)).max(0.2),
            });
        }
    }

    let mut missing_rng = substream(derive_seed(cfg.seed, &[2]), 0);
    let mut blank = |x: f64| {
        if cfg.missing_fraction > 0.0 && missing_rng.random::<f64>() < cfg.missing_fraction {
            None
        } else {
            Some(x)
        }
    };
    let mut obs_records = Vec::with_capacity(hours);
    for (i, w) in truth_hours.iter().enumerate() {
        let sky = SkyCondition::from_cover_pct(w.sky_pct)?;
        obs_records.push(ObservationRecord {
            timestamp: hour_at(i),
            sky_cover: blank(0.0).map(|_| sky),
            dew_point: blank(round_to(w.dew_point, 2)),
            rel_humidity: blank(round_to(w.rel_humidity, 2)),
            temperature: blank(round_to(w.temperature, 2)),
            wind_speed: blank(round_to(w.wind_speed, 2)),
        });
    }

    let mut energy = Vec::with_capacity(hours);
    for (i, w) in truth_hours.iter().enumerate() {
        let ts = hour_at(i);
        let light = daylight(i as u32 % 24, day_length(ts.date()));
        let fraction = cfg
            .energy
            .fraction(w.sky_pct, w.rel_humidity, w.temperature, day_noise[i / 24]);
        energy.push(EnergyRecord {
            timestamp: ts,
            energy_kwh: round_to(cfg.capacity_kwh * light * fraction, 3).min(cfg.capacity_kwh),
        });
    }

    // errors[var][lead - 1][hour]
    let noise: Vec<Vec<Vec<f64>>> = WeatherVariable::ALL
        .iter()
        .map(|v| {
            (1..=LEADS)
                .map(|d| {
                    let mut rng = substream(derive_seed(cfg.seed, &[3, v.index() as u64, d as u64]), 0);
                    ar1(&mut rng, hours, cfg.ar_coefficient)
                })
                .collect()
        })
        .collect();
    let forecast_value = |var: WeatherVariable, lead: u8, i: usize| {
        let model = cfg.error(var);
        let d = usize::from(lead - 1);
        let raw = truth_hours[i].get(var) - model.bias + model.sigma[d] * noise[var.index()][d][i];
        round_to(clamp_var(var, raw), 2)
    };

    let step = i64::from(cfg.issue_every_hours);
    let first_issue = -(i64::from(MAX_LEAD_DAY) * 24);
    let mut fc_records = Vec::new();
    let mut s = first_issue;
    while s < hours as i64 {
        let issue = t0 + Duration::hours(s);
        for offset in 1..(i64::from(MAX_LEAD_DAY) * 24) {
            let idx = s + offset;
            if idx < 0 || idx >= hours as i64 {
                continue;
            }
            let i = idx as usize;
            let valid = hour_at(i);
            let lead = lead_day(issue, valid).expect("offset within six days");
            fc_records.push(ForecastRecord {
                issue_time: issue,
                valid_time: valid,
                sky_cover_pct: Some(forecast_value(WeatherVariable::SkyCover, lead, i)),
                dew_point: Some(forecast_value(WeatherVariable::DewPoint, lead, i)),
                rel_humidity: Some(forecast_value(WeatherVariable::RelHumidity, lead, i)),
                temperature: Some(forecast_value(WeatherVariable::Temperature, lead, i)),
                wind_speed: Some(forecast_value(WeatherVariable::WindSpeed, lead, i)),
            });
        }
        s += step;
    }

    let truth = GroundTruth {
        seed: cfg.seed,
        days: cfg.days,
        start: cfg.start,
        capacity_kwh: cfg.capacity_kwh,
        energy: cfg.energy,
        dominant_variable: cfg.energy.dominant(),
        informative_variables: cfg.energy.informative(),
        errors: WeatherVariable::ALL
            .iter()
            .map(|&v| PlantedError {
                variable: v,
                bias: cfg.error(v).bias,
                sigma: cfg.error(v).sigma,
            })
            .collect(),
        ar_coefficient: cfg.ar_coefficient,
    };
    Ok(SynthData {
        observed: ObservationSeries::from_records(obs_records)?,
        forecast: ForecastSeries::from_records(fc_records)?,
        energy,
        truth,
    })
}
