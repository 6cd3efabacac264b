//! Pearson correlation between peak energy and weather predictors, and
//! threshold-based predictor selection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PeakDataset;
use crate::variable::WeatherVariable;

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooFewRows { n: x.len(), min: 3 });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantVector);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Column {
    Energy,
    Weather(WeatherVariable),
}

impl Column {
    pub const CANONICAL: [Column; 6] = [
        Column::Energy,
        Column::Weather(WeatherVariable::SkyCover),
        Column::Weather(WeatherVariable::DewPoint),
        Column::Weather(WeatherVariable::RelHumidity),
        Column::Weather(WeatherVariable::Temperature),
        Column::Weather(WeatherVariable::WindSpeed),
    ];

    pub fn code(self) -> &'static str {
        match self {
            Column::Energy => "E",
            Column::Weather(v) => v.code(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Column::Energy => "Energy",
            Column::Weather(v) => v.label(),
        }
    }

    pub fn parse(s: &str) -> Result<Column> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("energy") || t.eq_ignore_ascii_case("e") {
            Ok(Column::Energy)
        } else {
            t.parse().map(Column::Weather)
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Symmetric correlation matrix with unit diagonal, addressed by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrMatrix {
    labels: Vec<Column>,
    values: Vec<Vec<f64>>,
}

impl CorrMatrix {
    pub fn new(labels: Vec<Column>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidConfig("correlation matrix is not square".into()));
        }
        for (i, a) in labels.iter().enumerate() {
            if labels[..i].contains(a) {
                return Err(Error::InvalidConfig(format!("duplicate label {a}")));
            }
        }
        for i in 0..n {
            if values[i][i] != 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "diagonal entry for {} is {}, expected 1",
                    labels[i], values[i][i]
                )));
            }
            for j in 0..n {
                let v = values[i][j];
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::InvalidConfig(format!("entry ({i}, {j}) = {v} outside [-1, 1]")));
                }
                if v != values[j][i] {
                    return Err(Error::InvalidConfig(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { labels, values })
    }

    pub fn labels(&self) -> &[Column] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    fn position(&self, c: Column) -> Option<usize> {
        self.labels.iter().position(|&l| l == c)
    }

    pub fn get(&self, a: Column, b: Column) -> Option<f64> {
        Some(self.values[self.position(a)?][self.position(b)?])
    }

    /// Same matrix with rows and columns reordered by `order` (indices into
    /// the current labels).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let labels = order.iter().map(|&i| self.labels[i]).collect();
        let values = order
            .iter()
            .map(|&i| order.iter().map(|&j| self.values[i][j]).collect())
            .collect();
        Self::new(labels, values)
    }
}

/// Energy plus the five weather variables, pairwise over rows where both
/// columns are present.
pub fn correlation_matrix(dataset: &PeakDataset) -> Result<CorrMatrix> {
    let column = |c: Column, row: &crate::ingest::PeakRow| match c {
        Column::Energy => Some(row.peak_energy_kwh),
        Column::Weather(v) => row.observed.get(v),
    };
    let labels = Column::CANONICAL.to_vec();
    let n = labels.len();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y): (Vec<f64>, Vec<f64>) = dataset
                .rows
                .iter()
                .filter_map(|r| Some((column(labels[i], r)?, column(labels[j], r)?)))
                .unzip();
            let r = pearson(&x, &y)?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrMatrix::new(labels, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionThresholds {
    pub target: f64,
    pub collinearity: f64,
}

impl Default for SelectionThresholds {
    fn default() -> Self {
        Self {
            target: 0.2,
            collinearity: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ExclusionReason {
    LowTargetCorrelation { r_target: f64 },
    CollinearWithStronger { kept: WeatherVariable, r: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub variable: WeatherVariable,
    #[serde(flatten)]
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Canonical order.
    pub selected: Vec<WeatherVariable>,
    pub excluded: Vec<Exclusion>,
    pub thresholds: SelectionThresholds,
}

/// Drops predictors with `|r(energy)| < target`; then, walking the survivors
/// from strongest to weakest target correlation (canonical order on ties),
/// drops any predictor with `|r| > collinearity` against one already kept.
pub fn select_predictors(m: &CorrMatrix, thresholds: &SelectionThresholds) -> Result<SelectionReport> {
    let candidates: Vec<WeatherVariable> = WeatherVariable::ALL
        .into_iter()
        .filter(|&v| m.position(Column::Weather(v)).is_some())
        .collect();
    if m.position(Column::Energy).is_none() {
        return Err(Error::InvalidConfig("correlation matrix has no energy column".into()));
    }
    let target = |v: WeatherVariable| m.get(Column::Energy, Column::Weather(v)).expect("present");

    let mut excluded = Vec::new();
    let mut strong = Vec::new();
    for v in candidates {
        let r_target = target(v);
        if r_target.abs() < thresholds.target {
            excluded.push(Exclusion {
                variable: v,
                reason: ExclusionReason::LowTargetCorrelation { r_target },
            });
        } else {
            strong.push(v);
        }
    }
    // Stable sort keeps canonical order among equal |r|.
    strong.sort_by(|a, b| target(*b).abs().total_cmp(&target(*a).abs()));

    let mut kept: Vec<WeatherVariable> = Vec::new();
    for v in strong {
        let clash = kept.iter().find_map(|&k| {
            let r = m.get(Column::Weather(k), Column::Weather(v)).expect("present");
            (r.abs() > thresholds.collinearity).then_some((k, r))
        });
        match clash {
            Some((k, r)) => excluded.push(Exclusion {
                variable: v,
                reason: ExclusionReason::CollinearWithStronger { kept: k, r },
            }),
            None => kept.push(v),
        }
    }
    kept.sort();
    excluded.sort_by_key(|e| e.variable);
    Ok(SelectionReport {
        selected: kept,
        excluded,
        thresholds: *thresholds,
    })
}

/// Correlations between energy and weather variables as reported for the
/// study-year case (rows/columns in [`Column::CANONICAL`] order).
pub fn reference_table() -> CorrMatrix {
    let values = vec![
        vec![1.0, -0.42, 0.18, -0.61, 0.44, -0.09],
        vec![-0.42, 1.0, 0.14, 0.35, -0.09, 0.14],
        vec![0.18, 0.14, 1.0, 0.28, 0.9, -0.17],
        vec![-0.61, 0.35, 0.28, 1.0, -0.15, -0.02],
        vec![0.44, -0.09, 0.9, -0.15, 1.0, 0.17],
        vec![-0.09, 0.14, -0.17, -0.02, 0.17, 1.0],
    ];
    CorrMatrix::new(Column::CANONICAL.to_vec(), values).expect("reference table is valid")
}
