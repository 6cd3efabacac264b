use std::fs;
use std::path::{Path, PathBuf};

use helios_core::diagnostics::residual_whiteness;
use helios_core::experiment::{
    evaluate_lead_days_split, sensitivity_all, subset_sweep, LeadDayEvaluation, ScenarioCurve,
    SubsetSweepResult, SweepConfig,
};
use helios_core::ingest::{
    align, extract_peaks, read_energy, ForecastSeries, ObservationSeries, PeakDataset, MAX_LEAD_DAY,
};
use helios_core::mlp::{self, FitConfig, LmConfig, MlpModel, SplitSpec, TrainingMetadata};
use helios_core::resample::{error_stats, BootstrapConfig, ErrorStats};
use helios_core::rng::derive_seed;
use helios_core::select::{
    correlation_matrix, select_predictors, Column, CorrMatrix, SelectionReport, SelectionThresholds,
};
use helios_core::synth::{self, SynthConfig};
use helios_core::{Error, Execution, WeatherVariable};
use log::{info, warn};
use serde::Serialize;

use crate::report::{audit_row, num, write_json, Csv, AUDIT_HEADER};
use crate::svg::{Bar, BarChart, LineChart, ScatterPlot, Series, StemPlot};
use crate::{CliError, Command, Options};

type CmdResult<T = ()> = std::result::Result<T, CliError>;

// Substream tags fanned out from --seed.
const TAG_AUDIT: u64 = 1;
const TAG_TRAIN: u64 = 2;
const TAG_SPLIT: u64 = 3;
const TAG_SWEEP: u64 = 4;

const OBSERVED: &str = "observed.csv";
const FORECAST: &str = "forecast.csv";
const ENERGY: &str = "energy.csv";
const MODEL: &str = "model.json";

pub fn execute(cmd: Command, opts: &Options) -> CmdResult {
    let ctx = Context::new(cmd, opts)?;
    match cmd {
        Command::Audit => audit(&ctx),
        Command::Select => select(&ctx),
        Command::Train => train(&ctx),
        Command::Evaluate => evaluate(&ctx),
        Command::Sensitivity => sensitivity(&ctx),
        Command::Sweep => sweep(&ctx),
        Command::Synth => synth_cmd(&ctx),
    }
}

struct Context<'a> {
    opts: &'a Options,
    input: PathBuf,
    out: PathBuf,
}

impl<'a> Context<'a> {
    fn new(cmd: Command, opts: &'a Options) -> CmdResult<Self> {
        let out = opts
            .out
            .clone()
            .ok_or_else(|| CliError::Input("--out DIR is required".into()))?;
        let needs_input = !matches!(cmd, Command::Synth) && !(cmd == Command::Select && opts.corr_matrix.is_some());
        let input = match &opts.input {
            Some(dir) => dir.clone(),
            None if needs_input => return Err(CliError::Input("--in DIR is required".into())),
            None => PathBuf::new(),
        };
        let ctx = Context { opts, input, out };
        let files: &[&str] = match cmd {
            Command::Audit => &[OBSERVED, FORECAST],
            Command::Synth => &[],
            Command::Select if opts.corr_matrix.is_some() => &[],
            _ => &[OBSERVED, FORECAST, ENERGY],
        };
        if needs_input && !ctx.input.is_dir() {
            return Err(CliError::Input(format!("input directory {} does not exist", ctx.input.display())));
        }
        for f in files {
            let p = ctx.input.join(f);
            if !p.is_file() {
                return Err(CliError::Input(format!("missing input file {}", p.display())));
            }
        }
        for p in [&opts.model, &opts.corr_matrix].into_iter().flatten() {
            if !p.is_file() {
                return Err(CliError::Input(format!("missing file {}", p.display())));
            }
        }
        fs::create_dir_all(&ctx.out)?;
        Ok(ctx)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn figure(&self, name: &str, svg: impl FnOnce() -> String) -> CmdResult {
        if !self.opts.no_figures {
            fs::write(self.out(name), svg())?;
        }
        Ok(())
    }

    fn observed(&self) -> CmdResult<ObservationSeries> {
        Ok(ObservationSeries::read(&self.input.join(OBSERVED))?)
    }

    fn forecast(&self) -> CmdResult<ForecastSeries> {
        Ok(ForecastSeries::read(&self.input.join(FORECAST))?)
    }

    fn peaks(&self) -> CmdResult<PeakDataset> {
        let obs = self.observed()?;
        let fc = self.forecast()?;
        let energy = read_energy(&self.input.join(ENERGY), self.opts.capacity)?;
        let ds = extract_peaks(&energy, &obs, &fc)?;
        info!("{} daily peak rows", ds.len());
        Ok(ds)
    }

    fn thresholds(&self) -> SelectionThresholds {
        SelectionThresholds {
            target: self.opts.target_threshold,
            collinearity: self.opts.collinearity_threshold,
        }
    }

    fn split(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.opts.train_fraction,
            validation_fraction: 1.0 - self.opts.train_fraction,
            seed: derive_seed(self.opts.seed, &[TAG_SPLIT]),
        }
    }

    fn lm(&self, tag: u64) -> LmConfig {
        LmConfig {
            max_iterations: self.opts.max_iter,
            seed: derive_seed(self.opts.seed, &[tag]),
            ..LmConfig::default()
        }
    }
}

fn lead_label(d: u8) -> String {
    format!("D#{d}")
}

// ---------------------------------------------------------------- audit

#[derive(Serialize)]
struct WhitenessSummary {
    max_lag: usize,
    bound: f64,
    exceed_fraction: f64,
    verdict: String,
    gaps: usize,
}

#[derive(Serialize)]
struct AuditCell {
    #[serde(flatten)]
    stats: ErrorStats,
    dropped: usize,
    /// Absent when the residual series is constant.
    whiteness: Option<WhitenessSummary>,
}

#[derive(Serialize)]
struct AuditReport {
    seed: u64,
    cycles: usize,
    confidence: f64,
    max_lag: usize,
    cells: Vec<AuditCell>,
}

fn audit(ctx: &Context) -> CmdResult {
    let opts = ctx.opts;
    let obs = ctx.observed()?;
    let fc = ctx.forecast()?;
    let mut cells = Vec::new();
    let mut csv = Csv::new(AUDIT_HEADER);
    let mut acf_csv = Csv::new("variable,lead_day,lag,coefficient,bound");
    for v in WeatherVariable::ALL {
        for d in 1..=MAX_LEAD_DAY {
            let a = align(&obs, &fc, v, d);
            if a.pairs.is_empty() {
                return Err(CliError::Input(format!(
                    "no overlapping hours between {OBSERVED} and {FORECAST} for {v} at lead day {d} ({} unmatched hours)",
                    a.dropped
                )));
            }
            let cfg = BootstrapConfig {
                cycles: opts.cycles,
                confidence: opts.confidence,
                seed: derive_seed(opts.seed, &[TAG_AUDIT, v.index() as u64, u64::from(d)]),
            };
            let stats = error_stats(&a.pairs, &cfg)?;
            csv.line(&audit_row(&stats, a.dropped));
            let lag = opts.max_lag.min(a.pairs.len().saturating_sub(1));
            if lag < opts.max_lag {
                warn!("{v} lead {d}: only {} pairs, ACF limited to lag {lag}", a.pairs.len());
            }
            let whiteness = match residual_whiteness(&a.pairs, lag) {
                Ok(w) => {
                    for (k, r) in w.acf.coefficients.iter().enumerate() {
                        acf_csv.row(&[v.code().to_string(), d.to_string(), (k + 1).to_string(), num(*r), num(w.acf.bound)]);
                    }
                    if d == 1 {
                        ctx.figure(&format!("acf_{}_d1.svg", v.code()), || {
                            StemPlot {
                                title: format!("ACF of {} forecast residuals, lead day 1", v.label().to_lowercase()),
                                values: w.acf.coefficients.clone(),
                                bound: w.acf.bound,
                            }
                            .render()
                        })?;
                    }
                    Some(WhitenessSummary {
                        max_lag: w.acf.max_lag(),
                        bound: w.acf.bound,
                        exceed_fraction: w.acf.exceed_fraction,
                        verdict: w.verdict.describe().to_string(),
                        gaps: w.gaps,
                    })
                }
                Err(Error::ConstantSeries) | Err(Error::TooShort { .. }) => {
                    warn!("{v} lead {d}: residual ACF undefined");
                    None
                }
                Err(e) => return Err(e.into()),
            };
            cells.push(AuditCell { stats, dropped: a.dropped, whiteness });
        }
    }
    csv.write(&ctx.out("audit.csv"))?;
    acf_csv.write(&ctx.out("acf.csv"))?;
    for v in WeatherVariable::ALL {
        ctx.figure(&format!("mae_{}.svg", v.code()), || {
            BarChart {
                title: format!("MAE of forecasted {} by lead day", v.label().to_lowercase()),
                x_label: "Lead day".into(),
                y_label: format!("MAE ({:.0}% CI)", opts.confidence * 100.0),
                bars: cells
                    .iter()
                    .filter(|c| c.stats.variable == v)
                    .map(|c| Bar {
                        label: lead_label(c.stats.lead_day),
                        value: c.stats.mae,
                        whisker: Some((c.stats.mae_ci.lower, c.stats.mae_ci.upper)),
                        accent: false,
                    })
                    .collect(),
            }
            .render()
        })?;
    }
    let report = AuditReport {
        seed: opts.seed,
        cycles: opts.cycles,
        confidence: opts.confidence,
        max_lag: opts.max_lag,
        cells,
    };
    write_json(&ctx.out("audit.json"), "audit", &report)?;
    Ok(())
}

// ---------------------------------------------------------------- select

#[derive(Serialize)]
struct SelectionDocument<'a> {
    source: &'a str,
    rows: Option<usize>,
    #[serde(flatten)]
    selection: &'a SelectionReport,
    matrix: MatrixDocument,
}

#[derive(Serialize)]
struct MatrixDocument {
    labels: Vec<&'static str>,
    values: Vec<Vec<f64>>,
}

fn matrix_csv(m: &CorrMatrix) -> Csv {
    let labels: Vec<&str> = m.labels().iter().map(|c| c.code()).collect();
    let mut csv = Csv::new(&format!("column,{}", labels.join(",")));
    for (label, row) in labels.iter().zip(m.values()) {
        let mut fields = vec![label.to_string()];
        fields.extend(row.iter().map(|x| num(*x)));
        csv.row(&fields);
    }
    csv
}

fn read_matrix(path: &Path) -> CmdResult<CorrMatrix> {
    let text = fs::read_to_string(path)?;
    let bad = |line: usize, msg: &str| CliError::Input(format!("{}:{line}: {msg}", path.display()));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let labels = header
        .split(',')
        .skip(1)
        .map(|s| Column::parse(s.trim()).map_err(|e| bad(1, &e.to_string())))
        .collect::<CmdResult<Vec<_>>>()?;
    let mut values = Vec::new();
    for (i, line) in lines {
        let mut fields = line.split(',');
        let name = fields.next().unwrap_or_default().trim();
        let col = Column::parse(name).map_err(|e| bad(i + 1, &e.to_string()))?;
        if labels.get(values.len()) != Some(&col) {
            return Err(bad(i + 1, "row labels must follow the header order"));
        }
        let row = fields
            .map(|f| f.trim().parse::<f64>().map_err(|_| bad(i + 1, &format!("not a number: {f:?}"))))
            .collect::<CmdResult<Vec<_>>>()?;
        values.push(row);
    }
    Ok(CorrMatrix::new(labels, values)?)
}

fn scatter(
    ctx: &Context,
    ds: &PeakDataset,
    name: &str,
    x: Column,
    y: Column,
) -> CmdResult {
    let value = |row: &helios_core::ingest::PeakRow, c: Column| match c {
        Column::Energy => Some(row.peak_energy_kwh),
        Column::Weather(v) => row.observed.get(v),
    };
    let mut csv = Csv::new(&format!("date,{},{}", x.code(), y.code()));
    let mut points = Vec::new();
    for row in &ds.rows {
        if let (Some(a), Some(b)) = (value(row, x), value(row, y)) {
            csv.row(&[row.date.to_string(), num(a), num(b)]);
            points.push((a, b));
        }
    }
    csv.write(&ctx.out(&format!("{name}.csv")))?;
    ctx.figure(&format!("{name}.svg"), || {
        ScatterPlot {
            title: format!("{} vs {}", y.label(), x.label().to_lowercase()),
            x_label: x.label().into(),
            y_label: y.label().into(),
            points,
        }
        .render()
    })
}

fn select(ctx: &Context) -> CmdResult {
    let (matrix, rows, source) = match &ctx.opts.corr_matrix {
        Some(path) => (read_matrix(path)?, None, "matrix"),
        None => {
            let ds = ctx.peaks()?;
            let m = correlation_matrix(&ds)?;
            use WeatherVariable::*;
            let e = Column::Energy;
            scatter(ctx, &ds, "scatter_energy_dp", Column::Weather(DewPoint), e)?;
            scatter(ctx, &ds, "scatter_energy_w", Column::Weather(WindSpeed), e)?;
            scatter(ctx, &ds, "scatter_energy_rh", Column::Weather(RelHumidity), e)?;
            scatter(ctx, &ds, "scatter_dp_t", Column::Weather(Temperature), Column::Weather(DewPoint))?;
            (m, Some(ds.len()), "data")
        }
    };
    let selection = select_predictors(&matrix, &ctx.thresholds())?;
    matrix_csv(&matrix).write(&ctx.out("corr.csv"))?;
    let doc = SelectionDocument {
        source,
        rows,
        selection: &selection,
        matrix: MatrixDocument {
            labels: matrix.labels().iter().map(|c| c.code()).collect(),
            values: matrix.values().to_vec(),
        },
    };
    write_json(&ctx.out("selection.json"), "select", &doc)?;
    info!("selected {:?}", selection.selected);
    Ok(())
}

// ---------------------------------------------------------------- train

#[derive(Serialize)]
struct TrainReport<'a> {
    inputs: &'a [WeatherVariable],
    input_source: &'a str,
    training: &'a TrainingMetadata,
    train_mape: f64,
    validation_mape: f64,
    mse_history: &'a [f64],
}

fn fit_config(ctx: &Context, inputs: Vec<WeatherVariable>) -> FitConfig {
    FitConfig {
        inputs,
        hidden: ctx.opts.hidden,
        lm: ctx.lm(TAG_TRAIN),
        split: ctx.split(),
        restarts: ctx.opts.restarts,
        capacity_kwh: ctx.opts.capacity,
    }
}

fn model_inputs(ctx: &Context, ds: &PeakDataset) -> CmdResult<(Vec<WeatherVariable>, &'static str)> {
    if let Some(list) = &ctx.opts.inputs {
        let vars = list
            .iter()
            .map(|s| s.trim().parse::<WeatherVariable>())
            .collect::<Result<Vec<_>, _>>()?;
        return Ok((vars, "inputs"));
    }
    let report = select_predictors(&correlation_matrix(ds)?, &ctx.thresholds())?;
    if report.selected.is_empty() {
        return Err(CliError::Input("no predictor passed selection; pass --inputs".into()));
    }
    Ok((report.selected, "selection"))
}

fn train_model(ctx: &Context, ds: &PeakDataset) -> CmdResult<(mlp::Fit, &'static str)> {
    let (inputs, source) = model_inputs(ctx, ds)?;
    info!("training on {} from {source}", inputs.iter().map(|v| v.code()).collect::<Vec<_>>().join(","));
    Ok((mlp::fit(ds, &fit_config(ctx, inputs), Execution::default())?, source))
}

fn train(ctx: &Context) -> CmdResult {
    let ds = ctx.peaks()?;
    let (fit, source) = train_model(ctx, &ds)?;
    fs::write(ctx.out(MODEL), fit.model.to_json())?;
    let report = TrainReport {
        inputs: &fit.model.inputs,
        input_source: source,
        training: &fit.model.metadata,
        train_mape: fit.train_mape(&ds)?,
        validation_mape: fit.validation_mape(&ds)?,
        mse_history: &fit.outcome.mse_history,
    };
    write_json(&ctx.out("train.json"), "train", &report)?;
    Ok(())
}

/// `--model`, else `OUT/model.json`, else a model trained in-process.
fn resolve_model(ctx: &Context, ds: &PeakDataset) -> CmdResult<(MlpModel, String)> {
    let path = ctx.opts.model.clone().or_else(|| Some(ctx.out(MODEL)).filter(|p| p.is_file()));
    match path {
        Some(p) => {
            let text = fs::read_to_string(&p)?;
            let model = MlpModel::from_json(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            info!("using model {}", p.display());
            let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            Ok((model, name))
        }
        None => {
            info!("no model.json found; training in-process");
            Ok((train_model(ctx, ds)?.0.model, "trained in-process".into()))
        }
    }
}

// ---------------------------------------------------------------- evaluate

#[derive(Serialize)]
struct EvaluateReport<'a> {
    model: &'a str,
    #[serde(flatten)]
    evaluation: &'a LeadDayEvaluation,
}

fn evaluation(ds: &PeakDataset, model: &MlpModel) -> CmdResult<LeadDayEvaluation> {
    let (train_rows, validation_rows) = mlp::split_rows(ds, &model.inputs, &model.metadata.split)?;
    Ok(evaluate_lead_days_split(model, ds, &train_rows, &validation_rows)?)
}

fn evaluate(ctx: &Context) -> CmdResult {
    let ds = ctx.peaks()?;
    let (model, source) = resolve_model(ctx, &ds)?;
    let eval = evaluation(&ds, &model)?;
    let mut csv = Csv::new("series,lead_day,mape,mae,rows_used,rows_skipped");
    let metrics_row = |series: &str, lead: String, m: &helios_core::experiment::EnergyMetrics| {
        vec![series.to_string(), lead, num(m.mape), num(m.mae), m.rows_used.to_string(), m.rows_skipped.to_string()]
    };
    for l in &eval.leads {
        csv.row(&metrics_row("forecast", l.lead_day.to_string(), &l.metrics));
    }
    csv.row(&metrics_row("observed", String::new(), &eval.baseline));
    if let Some(split) = &eval.baseline_split {
        csv.row(&metrics_row("observed_train", String::new(), &split.train));
        csv.row(&metrics_row("observed_validation", String::new(), &split.validation));
    }
    csv.write(&ctx.out("leadday.csv"))?;
    ctx.figure("leadday.svg", || {
        let mut bars: Vec<Bar> = eval
            .leads
            .iter()
            .map(|l| Bar { label: lead_label(l.lead_day), value: l.metrics.mape, whisker: None, accent: false })
            .collect();
        bars.push(Bar { label: "Observed".into(), value: eval.baseline.mape, whisker: None, accent: true });
        BarChart {
            title: "Peak energy MAPE with forecast and observed weather".into(),
            x_label: "Weather input".into(),
            y_label: "MAPE (%)".into(),
            bars,
        }
        .render()
    })?;
    write_json(&ctx.out("leadday.json"), "evaluate", &EvaluateReport { model: &source, evaluation: &eval })?;
    Ok(())
}

// ---------------------------------------------------------------- sensitivity

#[derive(Serialize)]
struct SensitivityReport<'a> {
    model: &'a str,
    inputs: &'a [WeatherVariable],
    baseline: &'a [helios_core::experiment::LeadDayMetrics],
    scenarios: &'a [ScenarioCurve],
    /// Scenario with the lowest mean MAPE over lead days.
    lowest: Option<WeatherVariable>,
}

fn sensitivity(ctx: &Context) -> CmdResult {
    let ds = ctx.peaks()?;
    let (model, source) = resolve_model(ctx, &ds)?;
    let eval = evaluation(&ds, &model)?;
    let curves = sensitivity_all(&model, &ds, Execution::default())?;
    let mut csv = Csv::new("scenario,lead_day,mape,mae,rows_used,rows_skipped");
    let mut push = |name: &str, leads: &[helios_core::experiment::LeadDayMetrics]| {
        for l in leads {
            let m = &l.metrics;
            csv.row(&[
                name.to_string(),
                l.lead_day.to_string(),
                num(m.mape),
                num(m.mae),
                m.rows_used.to_string(),
                m.rows_skipped.to_string(),
            ]);
        }
    };
    push("forecast", &eval.leads);
    for c in &curves {
        push(&format!("observed_{}", c.perfect_variable.code()), &c.leads);
    }
    csv.write(&ctx.out("sensitivity.csv"))?;
    ctx.figure("sensitivity.svg", || {
        let mut series = vec![Series { name: "All forecast".into(), values: eval.mape_curve() }];
        series.extend(curves.iter().map(|c| Series {
            name: format!("Observed {}", c.perfect_variable.label().to_lowercase()),
            values: c.mape_curve(),
        }));
        LineChart {
            title: "Peak energy MAPE with one observed input".into(),
            x_label: "Lead day".into(),
            y_label: "MAPE (%)".into(),
            categories: (1..=MAX_LEAD_DAY).map(lead_label).collect(),
            series,
        }
        .render()
    })?;
    let lowest = curves
        .iter()
        .min_by(|a, b| a.mean_mape().total_cmp(&b.mean_mape()))
        .map(|c| c.perfect_variable);
    let report = SensitivityReport {
        model: &source,
        inputs: &model.inputs,
        baseline: &eval.leads,
        scenarios: &curves,
        lowest,
    };
    write_json(&ctx.out("sensitivity.json"), "sensitivity", &report)?;
    Ok(())
}

// ---------------------------------------------------------------- sweep

fn sweep(ctx: &Context) -> CmdResult {
    let ds = ctx.peaks()?;
    let cfg = SweepConfig {
        lm: ctx.lm(TAG_SWEEP),
        split: ctx.split(),
        hidden: ctx.opts.hidden,
        restarts: ctx.opts.restarts,
        capacity_kwh: ctx.opts.capacity,
    };
    let result: SubsetSweepResult = subset_sweep(&ds, &cfg, Execution::default())?;
    let mut csv = Csv::new("rank,subset,mask,validation_mape,train_mape,seed");
    for e in &result.entries {
        let subset: Vec<&str> = e.variables.iter().map(|v| v.code()).collect();
        csv.row(&[
            e.rank.to_string(),
            subset.join("+"),
            e.mask.to_string(),
            num(e.validation_mape),
            num(e.train_mape),
            e.seed.to_string(),
        ]);
    }
    csv.write(&ctx.out("sweep.csv"))?;
    write_json(&ctx.out("sweep.json"), "sweep", &result)?;
    Ok(())
}

// ---------------------------------------------------------------- synth

fn synth_cmd(ctx: &Context) -> CmdResult {
    let mut cfg = SynthConfig {
        days: ctx.opts.days,
        seed: ctx.opts.seed,
        capacity_kwh: ctx.opts.capacity,
        ..SynthConfig::default()
    };
    if ctx.opts.noiseless {
        cfg = cfg.noiseless();
    }
    let data = synth::generate(&cfg)?;
    data.write_dir(&ctx.out)?;
    info!("wrote {} days to {}", cfg.days, ctx.out.display());
    Ok(())
}
