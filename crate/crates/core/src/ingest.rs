//! CSV ingestion, sky-cover harmonization, lead-day alignment and daily-peak
//! extraction.
//!
//! All timestamps are local standard time written as `YYYY-MM-DDTHH:00`.
//! Missing numeric cells are empty fields.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::variable::WeatherVariable;

pub const OBSERVED_HEADER: &str = "timestamp,sky_cover,dew_point,rel_humidity,temperature,wind_speed";
pub const FORECAST_HEADER: &str =
    "issue_time,valid_time,sky_cover_pct,dew_point,rel_humidity,temperature,wind_speed";
pub const ENERGY_HEADER: &str = "timestamp,energy_kwh";

pub const MAX_LEAD_DAY: u8 = 6;
pub const DEFAULT_CAPACITY_KWH: f64 = 120.0;

const HOUR_FORMAT: &str = "%Y-%m-%dT%H:00";

pub fn parse_hour(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim();
    // chrono's parser would accept a missing zero pad; the format is fixed-width.
    if s.len() != 16 {
        return None;
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M")
        .ok()
        .filter(|t| t.minute() == 0)
}

pub fn format_hour(t: NaiveDateTime) -> String {
    t.format(HOUR_FORMAT).to_string()
}

/// Observed sky condition categories and their percentage category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkyCondition {
    Clear,
    MostlyClear,
    PartlyCloudy,
    MostlyCloudy,
    Cloudy,
}

impl SkyCondition {
    pub const ALL: [SkyCondition; 5] = [
        SkyCondition::Clear,
        SkyCondition::MostlyClear,
        SkyCondition::PartlyCloudy,
        SkyCondition::MostlyCloudy,
        SkyCondition::Cloudy,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SkyCondition::Clear => "Clear",
            SkyCondition::MostlyClear => "Mostly Clear",
            SkyCondition::PartlyCloudy => "Partly Cloudy",
            SkyCondition::MostlyCloudy => "Mostly Cloudy",
            SkyCondition::Cloudy => "Cloudy",
        }
    }

    pub fn percent(self) -> u8 {
        match self {
            SkyCondition::Clear => 0,
            SkyCondition::MostlyClear => 25,
            SkyCondition::PartlyCloudy => 50,
            SkyCondition::MostlyCloudy => 75,
            SkyCondition::Cloudy => 100,
        }
    }

    /// Condition matching a forecast sky-cover percentage.
    pub fn from_cover_pct(pct: f64) -> Result<SkyCondition> {
        let category = categorize_forecast_sky(pct)?;
        Ok(Self::ALL[usize::from(category / 25)])
    }
}

impl FromStr for SkyCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Self::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(key))
            .ok_or_else(|| Error::UnknownCategory(s.to_string()))
    }
}

/// Percentage category for an observed sky condition string.
pub fn categorize_observed_sky(category: &str) -> Result<u8> {
    category.parse::<SkyCondition>().map(SkyCondition::percent)
}

/// Bins a forecast sky-cover percentage into {0, 25, 50, 75, 100}.
///
/// Bins are `[0,12.5)`, `[12.5,37.5)`, `[37.5,62.5)`, `[62.5,87.5)` and
/// `[87.5,100]`.
pub fn categorize_forecast_sky(pct: f64) -> Result<u8> {
    if !(0.0..=100.0).contains(&pct) {
        return Err(Error::OutOfRange {
            what: "sky cover percent",
            value: pct,
            min: 0.0,
            max: 100.0,
        });
    }
    let category = if pct < 12.5 {
        0
    } else if pct < 37.5 {
        25
    } else if pct < 62.5 {
        50
    } else if pct < 87.5 {
        75
    } else {
        100
    };
    Ok(category)
}

/// One value slot per [`WeatherVariable`], in canonical order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeatherVector(pub [Option<f64>; 5]);

impl WeatherVector {
    pub fn get(&self, var: WeatherVariable) -> Option<f64> {
        self.0[var.index()]
    }

    pub fn set(&mut self, var: WeatherVariable, value: Option<f64>) {
        self.0[var.index()] = value;
    }

    /// Values for `vars` in the given order, or `None` if any is missing.
    pub fn select(&self, vars: &[WeatherVariable]) -> Option<Vec<f64>> {
        vars.iter().map(|&v| self.get(v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub timestamp: NaiveDateTime,
    pub sky_cover: Option<SkyCondition>,
    pub dew_point: Option<f64>,
    pub rel_humidity: Option<f64>,
    pub temperature: Option<f64>,
    pub wind_speed: Option<f64>,
}

impl ObservationRecord {
    /// Numeric value of `var`, with sky cover as its percentage category.
    pub fn value(&self, var: WeatherVariable) -> Option<f64> {
        match var {
            WeatherVariable::SkyCover => self.sky_cover.map(|c| f64::from(c.percent())),
            WeatherVariable::DewPoint => self.dew_point,
            WeatherVariable::RelHumidity => self.rel_humidity,
            WeatherVariable::Temperature => self.temperature,
            WeatherVariable::WindSpeed => self.wind_speed,
        }
    }

    pub fn vector(&self) -> WeatherVector {
        WeatherVector(WeatherVariable::ALL.map(|v| self.value(v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRecord {
    pub issue_time: NaiveDateTime,
    pub valid_time: NaiveDateTime,
    pub sky_cover_pct: Option<f64>,
    pub dew_point: Option<f64>,
    pub rel_humidity: Option<f64>,
    pub temperature: Option<f64>,
    pub wind_speed: Option<f64>,
}

impl ForecastRecord {
    /// Lead-day bucket; validated to lie in 1..=6 at parse time.
    pub fn lead_day(&self) -> u8 {
        lead_day(self.issue_time, self.valid_time).expect("validated at construction")
    }

    /// Numeric value of `var`, with sky cover binned to its category.
    pub fn value(&self, var: WeatherVariable) -> Option<f64> {
        match var {
            WeatherVariable::SkyCover => self
                .sky_cover_pct
                .map(|p| f64::from(categorize_forecast_sky(p).expect("validated at parse time"))),
            WeatherVariable::DewPoint => self.dew_point,
            WeatherVariable::RelHumidity => self.rel_humidity,
            WeatherVariable::Temperature => self.temperature,
            WeatherVariable::WindSpeed => self.wind_speed,
        }
    }

    pub fn vector(&self) -> WeatherVector {
        WeatherVector(WeatherVariable::ALL.map(|v| self.value(v)))
    }
}

/// `floor((valid - issue) / 24h) + 1` when `valid > issue` and the bucket is
/// within 1..=6.
pub fn lead_day(issue: NaiveDateTime, valid: NaiveDateTime) -> Option<u8> {
    let hours = (valid - issue).num_hours();
    if hours <= 0 {
        return None;
    }
    let bucket = hours / 24 + 1;
    (1..=i64::from(MAX_LEAD_DAY))
        .contains(&bucket)
        .then_some(bucket as u8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub timestamp: NaiveDateTime,
    pub energy_kwh: f64,
}

/// Hourly observations keyed by timestamp.
#[derive(Debug, Clone, Default)]
pub struct ObservationSeries {
    records: BTreeMap<NaiveDateTime, ObservationRecord>,
}

impl ObservationSeries {
    pub fn from_records(records: impl IntoIterator<Item = ObservationRecord>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for rec in records {
            validate_rel_humidity(rec.rel_humidity)?;
            check_hour(rec.timestamp)?;
            let ts = rec.timestamp;
            if map.insert(ts, rec).is_some() {
                return Err(Error::InvalidConfig(format!(
                    "duplicate observation at {}",
                    format_hour(ts)
                )));
            }
        }
        Ok(Self { records: map })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::from_reader(BufReader::new(file), path)
    }

    pub fn from_reader<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let mut records = BTreeMap::new();
        for_each_row(reader, source, OBSERVED_HEADER, |row| {
            let timestamp = row.hour(0)?;
            let sky_cover = match row.field(1) {
                "" => None,
                s => Some(s.parse::<SkyCondition>().map_err(|e| row.error(e))?),
            };
            let rec = ObservationRecord {
                timestamp,
                sky_cover,
                dew_point: row.number(2)?,
                rel_humidity: row.number(3)?,
                temperature: row.number(4)?,
                wind_speed: row.number(5)?,
            };
            validate_rel_humidity(rec.rel_humidity).map_err(|e| row.error(e))?;
            if records.insert(timestamp, rec).is_some() {
                return Err(row.error(format!("duplicate timestamp {}", format_hour(timestamp))));
            }
            Ok(())
        })?;
        Ok(Self { records })
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{OBSERVED_HEADER}")?;
        for rec in self.records.values() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_hour(rec.timestamp),
                rec.sky_cover.map(SkyCondition::label).unwrap_or(""),
                cell(rec.dew_point),
                cell(rec.rel_humidity),
                cell(rec.temperature),
                cell(rec.wind_speed),
            )?;
        }
        Ok(())
    }

    pub fn get(&self, ts: NaiveDateTime) -> Option<&ObservationRecord> {
        self.records.get(&ts)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ObservationRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Hourly forecasts keyed by `(issue_time, valid_time)`.
#[derive(Debug, Clone, Default)]
pub struct ForecastSeries {
    records: Vec<ForecastRecord>,
}

impl ForecastSeries {
    pub fn from_records(records: impl IntoIterator<Item = ForecastRecord>) -> Result<Self> {
        let records: Vec<_> = records.into_iter().collect();
        for rec in &records {
            validate_forecast(rec)?;
        }
        Ok(Self { records })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path)?;
        Self::from_reader(BufReader::new(file), path)
    }

    pub fn from_reader<R: Read>(reader: R, source: &Path) -> Result<Self> {
        let mut records = Vec::new();
        for_each_row(reader, source, FORECAST_HEADER, |row| {
            let rec = ForecastRecord {
                issue_time: row.hour(0)?,
                valid_time: row.hour(1)?,
                sky_cover_pct: row.number(2)?,
                dew_point: row.number(3)?,
                rel_humidity: row.number(4)?,
                temperature: row.number(5)?,
                wind_speed: row.number(6)?,
            };
            validate_forecast(&rec).map_err(|e| row.error(e))?;
            records.push(rec);
            Ok(())
        })?;
        Ok(Self { records })
    }

    pub fn write<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{FORECAST_HEADER}")?;
        for rec in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                format_hour(rec.issue_time),
                format_hour(rec.valid_time),
                cell(rec.sky_cover_pct),
                cell(rec.dew_point),
                cell(rec.rel_humidity),
                cell(rec.temperature),
                cell(rec.wind_speed),
            )?;
        }
        Ok(())
    }

    pub fn records(&self) -> &[ForecastRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// For one lead day, the most recently issued record per valid hour.
    pub fn latest_by_valid_time(&self, lead: u8) -> BTreeMap<NaiveDateTime, &ForecastRecord> {
        let mut map: BTreeMap<NaiveDateTime, &ForecastRecord> = BTreeMap::new();
        for rec in self.records.iter().filter(|r| r.lead_day() == lead) {
            map.entry(rec.valid_time)
                .and_modify(|cur| {
                    if rec.issue_time > cur.issue_time {
                        *cur = rec;
                    }
                })
                .or_insert(rec);
        }
        map
    }
}

pub fn read_energy(path: &Path, capacity_kwh: f64) -> Result<Vec<EnergyRecord>> {
    let file = File::open(path)?;
    energy_from_reader(BufReader::new(file), path, capacity_kwh)
}

/// Parses energy.csv. Negative values are errors; values above
/// `capacity_kwh` only log a warning.
pub fn energy_from_reader<R: Read>(
    reader: R,
    source: &Path,
    capacity_kwh: f64,
) -> Result<Vec<EnergyRecord>> {
    let mut records = Vec::new();
    let mut seen = BTreeMap::new();
    let mut over_capacity = 0usize;
    for_each_row(reader, source, ENERGY_HEADER, |row| {
        let timestamp = row.hour(0)?;
        let energy_kwh = row
            .number(1)?
            .ok_or_else(|| row.error("missing energy_kwh"))?;
        if energy_kwh < 0.0 {
            return Err(row.error(format!("negative energy {energy_kwh}")));
        }
        if energy_kwh > capacity_kwh {
            over_capacity += 1;
        }
        if seen.insert(timestamp, ()).is_some() {
            return Err(row.error(format!("duplicate timestamp {}", format_hour(timestamp))));
        }
        records.push(EnergyRecord {
            timestamp,
            energy_kwh,
        });
        Ok(())
    })?;
    if over_capacity > 0 {
        log::warn!(
            "{}: {over_capacity} hourly values exceed the panel capacity of {capacity_kwh} kWh",
            source.display()
        );
    }
    Ok(records)
}

pub fn write_energy<W: Write>(records: &[EnergyRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{ENERGY_HEADER}")?;
    for rec in records {
        writeln!(out, "{},{}", format_hour(rec.timestamp), rec.energy_kwh)?;
    }
    Ok(())
}

/// An observed/forecast value pair for one variable, lead day and valid hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub variable: WeatherVariable,
    pub lead_day: u8,
    pub valid_time: NaiveDateTime,
    pub observed_value: f64,
    pub forecast_value: f64,
}

impl AlignedPair {
    /// Observed minus forecast.
    pub fn residual(&self) -> f64 {
        self.observed_value - self.forecast_value
    }
}

#[derive(Debug, Clone, Default)]
pub struct Alignment {
    /// Sorted by `valid_time`.
    pub pairs: Vec<AlignedPair>,
    /// Valid hours present on one side only, or with the variable missing.
    pub dropped: usize,
}

/// Pairs observations with lead-`lead` forecasts of `var`.
pub fn align(
    obs: &ObservationSeries,
    fc: &ForecastSeries,
    var: WeatherVariable,
    lead: u8,
) -> Alignment {
    let latest = fc.latest_by_valid_time(lead);
    let mut out = Alignment::default();
    let mut hours: Vec<NaiveDateTime> = obs.records.keys().copied().collect();
    hours.extend(latest.keys().filter(|t| !obs.records.contains_key(t)));
    hours.sort_unstable();
    for t in hours {
        let o = obs.get(t).and_then(|r| r.value(var));
        let f = latest.get(&t).and_then(|r| r.value(var));
        match (o, f) {
            (Some(observed_value), Some(forecast_value)) => out.pairs.push(AlignedPair {
                variable: var,
                lead_day: lead,
                valid_time: t,
                observed_value,
                forecast_value,
            }),
            _ => out.dropped += 1,
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakRow {
    pub date: NaiveDate,
    pub peak_hour: u32,
    pub peak_energy_kwh: f64,
    pub observed: WeatherVector,
    /// Index `d - 1` holds the lead-`d` forecast at the peak hour.
    pub forecast: [WeatherVector; MAX_LEAD_DAY as usize],
}

impl PeakRow {
    pub fn forecast_for(&self, lead: u8) -> &WeatherVector {
        &self.forecast[usize::from(lead - 1)]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakDataset {
    pub rows: Vec<PeakRow>,
}

impl PeakDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.peak_energy_kwh).collect()
    }
}

/// One row per day with positive generation: daily peak energy plus the
/// observed and per-lead forecast weather at the peak hour (earliest hour on
/// ties).
pub fn extract_peaks(
    energy: &[EnergyRecord],
    obs: &ObservationSeries,
    fc: &ForecastSeries,
) -> Result<PeakDataset> {
    let mut days: BTreeMap<NaiveDate, (NaiveDateTime, f64)> = BTreeMap::new();
    let mut sorted: Vec<&EnergyRecord> = energy.iter().collect();
    sorted.sort_by_key(|r| r.timestamp);
    for rec in sorted {
        let best = days
            .entry(rec.timestamp.date())
            .or_insert((rec.timestamp, rec.energy_kwh));
        if rec.energy_kwh > best.1 {
            *best = (rec.timestamp, rec.energy_kwh);
        }
    }

    let latest: Vec<_> = (1..=MAX_LEAD_DAY)
        .map(|d| fc.latest_by_valid_time(d))
        .collect();
    let rows: Vec<PeakRow> = days
        .into_iter()
        .filter(|(_, (_, e))| *e > 0.0)
        .map(|(date, (ts, peak))| PeakRow {
            date,
            peak_hour: ts.hour(),
            peak_energy_kwh: peak,
            observed: obs.get(ts).map(ObservationRecord::vector).unwrap_or_default(),
            forecast: std::array::from_fn(|i| {
                latest[i]
                    .get(&ts)
                    .map(|r| r.vector())
                    .unwrap_or_default()
            }),
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::NoGeneration);
    }
    Ok(PeakDataset { rows })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn check_hour(ts: NaiveDateTime) -> Result<()> {
    if ts.minute() != 0 || ts.second() != 0 || ts.nanosecond() != 0 {
        return Err(Error::InvalidConfig(format!("{ts} is not on an hour boundary")));
    }
    Ok(())
}

fn validate_rel_humidity(rh: Option<f64>) -> Result<()> {
    match rh {
        Some(v) if !(0.0..=100.0).contains(&v) => Err(Error::OutOfRange {
            what: "relative humidity",
            value: v,
            min: 0.0,
            max: 100.0,
        }),
        _ => Ok(()),
    }
}

fn validate_forecast(rec: &ForecastRecord) -> Result<()> {
    check_hour(rec.issue_time)?;
    check_hour(rec.valid_time)?;
    if rec.valid_time <= rec.issue_time {
        return Err(Error::InvalidConfig(format!(
            "valid time {} is not after issue time {}",
            format_hour(rec.valid_time),
            format_hour(rec.issue_time)
        )));
    }
    if lead_day(rec.issue_time, rec.valid_time).is_none() {
        return Err(Error::InvalidConfig(format!(
            "valid time {} is more than {MAX_LEAD_DAY} days after issue time {}",
            format_hour(rec.valid_time),
            format_hour(rec.issue_time)
        )));
    }
    if let Some(p) = rec.sky_cover_pct {
        categorize_forecast_sky(p)?;
    }
    validate_rel_humidity(rec.rel_humidity)
}

struct Row<'a> {
    source: &'a Path,
    line: u64,
    record: &'a csv::StringRecord,
}

impl Row<'_> {
    fn field(&self, i: usize) -> &str {
        self.record.get(i).unwrap_or("").trim()
    }

    fn error(&self, message: impl ToString) -> Error {
        Error::Parse {
            file: self.source.to_path_buf(),
            line: self.line,
            message: message.to_string(),
        }
    }

    fn hour(&self, i: usize) -> Result<NaiveDateTime> {
        let s = self.field(i);
        parse_hour(s).ok_or_else(|| self.error(format!("bad timestamp {s:?}, expected YYYY-MM-DDTHH:00")))
    }

    fn number(&self, i: usize) -> Result<Option<f64>> {
        match self.field(i) {
            "" => Ok(None),
            s => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| self.error(format!("bad number {s:?}"))),
        }
    }
}

fn for_each_row<R, F>(reader: R, source: &Path, header: &str, mut f: F) -> Result<()>
where
    R: Read,
    F: FnMut(&Row<'_>) -> Result<()>,
{
    let parse_err = |line: u64, message: String| Error::Parse {
        file: PathBuf::from(source),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let got = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",");
    if got != header {
        return Err(parse_err(1, format!("expected header `{header}`, found `{got}`")));
    }
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                f(&Row {
                    source,
                    line,
                    record: &record,
                })?;
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(parse_err(line, e.to_string()));
            }
        }
    }
    Ok(())
}
