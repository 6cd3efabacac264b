//! One-hidden-layer feedforward network trained with Levenberg-Marquardt.
//!
//! Parameters are stored flat as `[W1 (hidden × inputs, row-major), b1,
//! w2, b2]`. Inputs and target are min-max scaled to [-1, 1] with ranges
//! taken from the training split.

use std::io;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{PeakDataset, DEFAULT_CAPACITY_KWH};
use crate::metrics::ErrorSample;
use crate::rng::derive_seed;
use crate::variable::WeatherVariable;

pub const MODEL_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_HIDDEN: usize = 3;
/// Scaled values are clipped to this magnitude.
pub const CLIP: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    /// Makes the whole network linear; used to check the trainer against
    /// ordinary least squares.
    Identity,
}

impl Activation {
    fn apply(self, a: f64) -> f64 {
        match self {
            Activation::Tanh => a.tanh(),
            Activation::Identity => a,
        }
    }

    /// Derivative expressed through the activation output `z`.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - z * z,
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    pub n_inputs: usize,
    pub hidden: usize,
    pub activation: Activation,
}

impl NetworkShape {
    pub fn n_params(&self) -> usize {
        self.hidden * self.n_inputs + 2 * self.hidden + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    shape: NetworkShape,
    params: Vec<f64>,
}

impl Network {
    pub fn from_params(shape: NetworkShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.n_params() {
            return Err(Error::DimensionMismatch {
                expected: shape.n_params(),
                got: params.len(),
            });
        }
        Ok(Self { shape, params })
    }

    pub fn zeros(shape: NetworkShape) -> Self {
        Self {
            shape,
            params: vec![0.0; shape.n_params()],
        }
    }

    /// Weights drawn uniformly from [-0.5, 0.5].
    pub fn random(shape: NetworkShape, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..shape.n_params())
            .map(|_| rng.random_range(-0.5..=0.5))
            .collect();
        Self { shape, params }
    }

    pub fn shape(&self) -> NetworkShape {
        self.shape
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.params[..self.shape.hidden * self.shape.n_inputs]
    }

    pub fn hidden_biases(&self) -> &[f64] {
        let start = self.shape.hidden * self.shape.n_inputs;
        &self.params[start..start + self.shape.hidden]
    }

    pub fn output_weights(&self) -> &[f64] {
        let start = self.shape.hidden * (self.shape.n_inputs + 1);
        &self.params[start..start + self.shape.hidden]
    }

    pub fn output_bias(&self) -> f64 {
        self.params[self.params.len() - 1]
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.eval(x, None))
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.shape.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.shape.n_inputs,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Output for `x`; when `grad` is given, also writes ∂output/∂param.
    fn eval(&self, x: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let NetworkShape {
            n_inputs,
            hidden,
            activation,
        } = self.shape;
        let w1 = self.hidden_weights();
        let b1 = self.hidden_biases();
        let w2 = self.output_weights();
        let mut out = self.output_bias();
        for j in 0..hidden {
            let row = &w1[j * n_inputs..(j + 1) * n_inputs];
            let a = b1[j] + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
            let z = activation.apply(a);
            out += w2[j] * z;
            if let Some(g) = grad.as_deref_mut() {
                let delta = w2[j] * activation.derivative(z);
                for (i, xi) in x.iter().enumerate() {
                    g[j * n_inputs + i] = delta * xi;
                }
                g[hidden * n_inputs + j] = delta;
                g[hidden * (n_inputs + 1) + j] = z;
            }
        }
        if let Some(g) = grad {
            g[hidden * (n_inputs + 2)] = 1.0;
        }
        out
    }
}

/// Scaled training inputs and targets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalizedRows {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl NormalizedRows {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

/// Jacobian of the residuals `f(x) - y` with respect to the parameters, one
/// row per sample. Residuals depend on `y` only through a constant, so the
/// targets are not needed.
pub fn jacobian(net: &Network, inputs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let p = net.shape.n_params();
    let mut j = DMatrix::zeros(inputs.len(), p);
    let mut g = vec![0.0; p];
    for (r, x) in inputs.iter().enumerate() {
        net.check_input(x)?;
        net.eval(x, Some(&mut g));
        for (c, v) in g.iter().enumerate() {
            j[(r, c)] = *v;
        }
    }
    Ok(j)
}

fn mse(net: &Network, rows: &NormalizedRows) -> f64 {
    rows.inputs
        .iter()
        .zip(&rows.targets)
        .map(|(x, y)| {
            let e = net.eval(x, None) - y;
            e * e
        })
        .sum::<f64>()
        / rows.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmConfig {
    pub lambda0: f64,
    pub lambda_up: f64,
    pub lambda_down: f64,
    pub lambda_max: f64,
    pub max_iterations: usize,
    pub min_relative_mse_improvement: f64,
    pub seed: u64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            lambda0: 1e-3,
            lambda_up: 10.0,
            lambda_down: 0.1,
            lambda_max: 1e10,
            max_iterations: 200,
            min_relative_mse_improvement: 1e-9,
            seed: 0,
        }
    }
}

impl LmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0) {
            return Err(Error::InvalidConfig("lambda0 must be positive".into()));
        }
        if !(self.lambda_up > 1.0) {
            return Err(Error::InvalidConfig("lambda_up must exceed 1".into()));
        }
        if !(self.lambda_down > 0.0 && self.lambda_down < 1.0) {
            return Err(Error::InvalidConfig("lambda_down must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    DampingLimit,
    SmallImprovement,
    ZeroError,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    /// Initial MSE followed by the MSE after each accepted step.
    pub mse_history: Vec<f64>,
    pub iterations: usize,
    pub stop: StopReason,
}

impl TrainOutcome {
    pub fn final_mse(&self) -> f64 {
        *self.mse_history.last().expect("history holds the initial MSE")
    }
}

/// Trains a freshly initialized network of `shape` (seeded from `cfg.seed`).
pub fn train_lm(rows: &NormalizedRows, shape: NetworkShape, cfg: &LmConfig) -> Result<TrainOutcome> {
    train_lm_from(Network::random(shape, cfg.seed), rows, cfg)
}

/// Levenberg-Marquardt from the given starting weights.
///
/// Each iteration solves `(JᵀJ + λI) Δ = Jᵀr` and tries `p - Δ`. A step is
/// accepted only if it lowers the MSE (then λ shrinks by `lambda_down`),
/// otherwise λ grows by `lambda_up` and the solve is retried.
pub fn train_lm_from(mut net: Network, rows: &NormalizedRows, cfg: &LmConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    if rows.inputs.len() != rows.targets.len() {
        return Err(Error::LengthMismatch {
            left: rows.inputs.len(),
            right: rows.targets.len(),
        });
    }
    let p = net.shape.n_params();
    if rows.len() < p {
        log::warn!("training on {} rows for {p} parameters", rows.len());
    }

    let mut current = mse(&net, rows);
    let mut history = vec![current];
    let mut lambda = cfg.lambda0;
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;

    while iterations < cfg.max_iterations {
        if current == 0.0 {
            stop = StopReason::ZeroError;
            break;
        }
        let j = jacobian(&net, &rows.inputs)?;
        let r = DVector::from_iterator(
            rows.len(),
            rows.inputs
                .iter()
                .zip(&rows.targets)
                .map(|(x, y)| net.eval(x, None) - y),
        );
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * r;

        let mut solved_any = false;
        let accepted = loop {
            let mut damped = jtj.clone();
            for d in 0..p {
                damped[(d, d)] += lambda;
            }
            if let Some(step) = damped.cholesky().map(|c| c.solve(&jtr)) {
                solved_any = true;
                let trial = Network {
                    shape: net.shape,
                    params: net.params.iter().zip(step.iter()).map(|(a, s)| a - s).collect(),
                };
                let trial_mse = mse(&trial, rows);
                if trial_mse < current {
                    lambda *= cfg.lambda_down;
                    break Some((trial, trial_mse));
                }
            }
            lambda *= cfg.lambda_up;
            if lambda > cfg.lambda_max {
                break None;
            }
        };
        let Some((trial, trial_mse)) = accepted else {
            if !solved_any {
                return Err(Error::SingularSystem { lambda });
            }
            stop = StopReason::DampingLimit;
            break;
        };
        let improvement = (current - trial_mse) / current;
        net = trial;
        current = trial_mse;
        history.push(current);
        iterations += 1;
        if improvement < cfg.min_relative_mse_improvement {
            stop = StopReason::SmallImprovement;
            break;
        }
    }
    Ok(TrainOutcome {
        network: net,
        mse_history: history,
        iterations,
        stop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min < max) {
            return Err(Error::DegenerateRange(min));
        }
        Ok(Self { min, max })
    }

    pub fn of(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let (min, max) = values
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if min.is_infinite() {
            return Err(Error::EmptySample);
        }
        Self::new(min, max)
    }

    /// `2 (x - min) / (max - min) - 1`, clipped to ±1.2.
    pub fn normalize(&self, x: f64) -> f64 {
        (2.0 * (x - self.min) / (self.max - self.min) - 1.0).clamp(-CLIP, CLIP)
    }

    pub fn denormalize(&self, s: f64) -> f64 {
        (s + 1.0) / 2.0 * (self.max - self.min) + self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.train_fraction > 0.0
            && self.validation_fraction > 0.0
            && (self.train_fraction + self.validation_fraction - 1.0).abs() < 1e-9;
        if !ok {
            return Err(Error::InvalidConfig(
                "split fractions must be positive and sum to 1".into(),
            ));
        }
        Ok(())
    }

    /// Shuffles `0..n` once and returns sorted (train, validation) indices.
    pub fn split(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.validate()?;
        if n < 2 {
            return Err(Error::TooFewRows { n, min: 2 });
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let n_train = ((n as f64 * self.train_fraction).round() as usize).clamp(1, n - 1);
        let mut train = idx[..n_train].to_vec();
        let mut val = idx[n_train..].to_vec();
        train.sort_unstable();
        val.sort_unstable();
        Ok((train, val))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub iterations: usize,
    pub final_mse: f64,
    pub stop_reason: StopReason,
    pub train_rows: usize,
    pub validation_rows: usize,
    /// Validation MSE in kWh² of the kept restart.
    pub validation_mse: f64,
    pub restarts: usize,
    pub split: SplitSpec,
}

/// Trained network plus everything needed to map raw weather to kWh.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub inputs: Vec<WeatherVariable>,
    pub network: Network,
    pub input_ranges: Vec<FeatureRange>,
    pub target_range: FeatureRange,
    pub capacity_kwh: f64,
    pub metadata: TrainingMetadata,
}

impl MlpModel {
    pub fn normalize_inputs(&self, raw: &[f64]) -> Result<Vec<f64>> {
        if raw.len() != self.inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.inputs.len(),
                got: raw.len(),
            });
        }
        Ok(raw
            .iter()
            .zip(&self.input_ranges)
            .map(|(x, r)| r.normalize(*x))
            .collect())
    }

    /// Peak energy in kWh for raw weather values ordered as `self.inputs`,
    /// clamped to `[0, capacity_kwh]`.
    pub fn predict(&self, raw: &[f64]) -> Result<f64> {
        let x = self.normalize_inputs(raw)?;
        let y = self.target_range.denormalize(self.network.forward(&x)?);
        Ok(y.clamp(0.0, self.capacity_kwh))
    }

    pub fn to_json(&self) -> String {
        let doc = ModelDocument::from(self);
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats::default());
        doc.serialize(&mut ser).expect("model serializes");
        out.push(b'\n');
        String::from_utf8(out).expect("json is utf-8")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// On-disk layout of a model. Field order is fixed.
#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    inputs: Vec<WeatherVariable>,
    hidden: usize,
    hidden_activation: Activation,
    output_activation: String,
    hidden_weights: Vec<Vec<f64>>,
    hidden_biases: Vec<f64>,
    output_weights: Vec<f64>,
    output_bias: f64,
    input_ranges: Vec<FeatureRange>,
    target_range: FeatureRange,
    capacity_kwh: f64,
    training: TrainingMetadata,
}

impl From<&MlpModel> for ModelDocument {
    fn from(m: &MlpModel) -> Self {
        let shape = m.network.shape;
        Self {
            schema_version: MODEL_SCHEMA_VERSION,
            inputs: m.inputs.clone(),
            hidden: shape.hidden,
            hidden_activation: shape.activation,
            output_activation: "identity".into(),
            hidden_weights: m
                .network
                .hidden_weights()
                .chunks(shape.n_inputs)
                .map(<[f64]>::to_vec)
                .collect(),
            hidden_biases: m.network.hidden_biases().to_vec(),
            output_weights: m.network.output_weights().to_vec(),
            output_bias: m.network.output_bias(),
            input_ranges: m.input_ranges.clone(),
            target_range: m.target_range,
            capacity_kwh: m.capacity_kwh,
            training: m.metadata.clone(),
        }
    }
}

impl TryFrom<ModelDocument> for MlpModel {
    type Error = Error;

    fn try_from(d: ModelDocument) -> Result<Self> {
        if d.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported model schema version {}",
                d.schema_version
            )));
        }
        let shape = NetworkShape {
            n_inputs: d.inputs.len(),
            hidden: d.hidden,
            activation: d.hidden_activation,
        };
        if d.hidden_weights.len() != d.hidden
            || d.hidden_weights.iter().any(|r| r.len() != shape.n_inputs)
            || d.input_ranges.len() != shape.n_inputs
        {
            return Err(Error::InvalidConfig("model arrays do not match its shape".into()));
        }
        let mut params: Vec<f64> = d.hidden_weights.into_iter().flatten().collect();
        params.extend(d.hidden_biases);
        params.extend(d.output_weights);
        params.push(d.output_bias);
        for r in &d.input_ranges {
            FeatureRange::new(r.min, r.max)?;
        }
        FeatureRange::new(d.target_range.min, d.target_range.max)?;
        Ok(Self {
            inputs: d.inputs,
            network: Network::from_params(shape, params)?,
            input_ranges: d.input_ranges,
            target_range: d.target_range,
            capacity_kwh: d.capacity_kwh,
            metadata: d.training,
        })
    }
}

/// Writes every f64 with 17 significant digits.
#[derive(Default)]
struct ExactFloats(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Everything that determines a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub inputs: Vec<WeatherVariable>,
    pub hidden: usize,
    pub lm: LmConfig,
    pub split: SplitSpec,
    pub restarts: usize,
    pub capacity_kwh: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            inputs: vec![
                WeatherVariable::SkyCover,
                WeatherVariable::RelHumidity,
                WeatherVariable::Temperature,
            ],
            hidden: DEFAULT_HIDDEN,
            lm: LmConfig::default(),
            split: SplitSpec::default(),
            restarts: 1,
            capacity_kwh: DEFAULT_CAPACITY_KWH,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub model: MlpModel,
    /// Dataset row indices.
    pub train_rows: Vec<usize>,
    pub validation_rows: Vec<usize>,
    pub outcome: TrainOutcome,
}

impl Fit {
    pub fn validation_mape(&self, dataset: &PeakDataset) -> Result<f64> {
        rows_mape(&self.model, dataset, &self.validation_rows)
    }

    pub fn train_mape(&self, dataset: &PeakDataset) -> Result<f64> {
        rows_mape(&self.model, dataset, &self.train_rows)
    }
}

/// MAPE of the model on observed-weather inputs for the given rows.
pub fn rows_mape(model: &MlpModel, dataset: &PeakDataset, rows: &[usize]) -> Result<f64> {
    let (actual, predicted) = observed_predictions(model, dataset, rows)?;
    ErrorSample::new(&actual, &predicted)?.mape()
}

fn observed_predictions(
    model: &MlpModel,
    dataset: &PeakDataset,
    rows: &[usize],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut actual = Vec::with_capacity(rows.len());
    let mut predicted = Vec::with_capacity(rows.len());
    for &i in rows {
        let row = &dataset.rows[i];
        let x = row.observed.select(&model.inputs).ok_or(Error::EmptySample)?;
        actual.push(row.peak_energy_kwh);
        predicted.push(model.predict(&x)?);
    }
    Ok((actual, predicted))
}

/// Dataset row indices (train, validation) among rows whose observed weather
/// has every one of `inputs`.
pub fn split_rows(
    dataset: &PeakDataset,
    inputs: &[WeatherVariable],
    split: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let usable: Vec<usize> = dataset
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.observed.select(inputs).is_some())
        .map(|(i, _)| i)
        .collect();
    let (train_pos, val_pos) = split.split(usable.len())?;
    Ok((
        train_pos.iter().map(|&k| usable[k]).collect(),
        val_pos.iter().map(|&k| usable[k]).collect(),
    ))
}

/// Trains on the observed weather of the training split. With
/// `restarts > 1`, trains that many seeds and keeps the lowest validation MSE.
pub fn fit(dataset: &PeakDataset, cfg: &FitConfig, exec: Execution) -> Result<Fit> {
    if cfg.inputs.is_empty() {
        return Err(Error::InvalidConfig("model needs at least one input".into()));
    }
    if cfg.hidden == 0 {
        return Err(Error::InvalidConfig("hidden layer needs at least one neuron".into()));
    }
    let (train_rows, validation_rows) = split_rows(dataset, &cfg.inputs, &cfg.split)?;

    let raw = |i: usize| dataset.rows[i].observed.select(&cfg.inputs).expect("usable row");
    let input_ranges = (0..cfg.inputs.len())
        .map(|k| FeatureRange::of(train_rows.iter().map(|&i| raw(i)[k])))
        .collect::<Result<Vec<_>>>()?;
    let target_range = FeatureRange::of(train_rows.iter().map(|&i| dataset.rows[i].peak_energy_kwh))?;
    let normalized = NormalizedRows {
        inputs: train_rows
            .iter()
            .map(|&i| raw(i).iter().zip(&input_ranges).map(|(x, r)| r.normalize(*x)).collect())
            .collect(),
        targets: train_rows
            .iter()
            .map(|&i| target_range.normalize(dataset.rows[i].peak_energy_kwh))
            .collect(),
    };
    let shape = NetworkShape {
        n_inputs: cfg.inputs.len(),
        hidden: cfg.hidden,
        activation: Activation::Tanh,
    };

    let restarts = cfg.restarts.max(1);
    let attempts = exec.map_indexed(restarts, |k| -> Result<(MlpModel, TrainOutcome)> {
        let seed = if k == 0 {
            cfg.lm.seed
        } else {
            derive_seed(cfg.lm.seed, &[k as u64])
        };
        let outcome = train_lm(&normalized, shape, &LmConfig { seed, ..cfg.lm })?;
        let mut model = MlpModel {
            inputs: cfg.inputs.clone(),
            network: outcome.network.clone(),
            input_ranges: input_ranges.clone(),
            target_range,
            capacity_kwh: cfg.capacity_kwh,
            metadata: TrainingMetadata {
                seed,
                iterations: outcome.iterations,
                final_mse: outcome.final_mse(),
                stop_reason: outcome.stop,
                train_rows: train_rows.len(),
                validation_rows: validation_rows.len(),
                validation_mse: 0.0,
                restarts,
                split: cfg.split,
            },
        };
        let (actual, predicted) = observed_predictions(&model, dataset, &validation_rows)?;
        model.metadata.validation_mse = actual
            .iter()
            .zip(&predicted)
            .map(|(a, p)| (a - p) * (a - p))
            .sum::<f64>()
            / actual.len() as f64;
        Ok((model, outcome))
    });
    let mut best: Option<(MlpModel, TrainOutcome)> = None;
    for attempt in attempts {
        let (model, outcome) = attempt?;
        let better = best
            .as_ref()
            .is_none_or(|(b, _)| model.metadata.validation_mse < b.metadata.validation_mse);
        if better {
            best = Some((model, outcome));
        }
    }
    let (model, outcome) = best.expect("at least one restart");
    Ok(Fit {
        model,
        train_rows,
        validation_rows,
        outcome,
    })
}
