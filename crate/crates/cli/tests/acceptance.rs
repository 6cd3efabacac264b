//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p helios-cli --test acceptance`.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use helios_core::diagnostics::acf;
use helios_core::experiment::{evaluate_lead_days, sensitivity_all};
use helios_core::ingest::{align, categorize_forecast_sky, categorize_observed_sky, extract_peaks};
use helios_core::metrics::ErrorSample;
use helios_core::mlp::{
    fit, jacobian, train_lm, Activation, FitConfig, LmConfig, Network, NetworkShape, NormalizedRows,
};
use helios_core::resample::{bootstrap_ci_with, error_stats, BootstrapConfig};
use helios_core::select::{reference_table, select_predictors, Column, CorrMatrix, SelectionThresholds};
use helios_core::synth::{generate, SynthConfig};
use helios_core::{Execution, WeatherVariable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: [(&str, &str, Duration, Check); 11] = [
        ("AC1", "sky-cover categories", Duration::from_secs(1), ac1_sky_categories),
        ("AC2", "metric oracle equivalence", Duration::from_secs(5), ac2_metric_oracle),
        ("AC3", "correlation table selection replay", Duration::from_secs(1), ac3_selection_replay),
        ("AC4", "bootstrap coverage", Duration::from_secs(300), ac4_bootstrap_coverage),
        ("AC5", "bootstrap determinism across threads", Duration::from_secs(60), ac5_bootstrap_determinism),
        ("AC6", "ACF correctness", Duration::from_secs(10), ac6_acf),
        ("AC7", "Jacobian vs central differences", Duration::from_secs(10), ac7_jacobian),
        ("AC8", "LM matches least squares", Duration::from_secs(10), ac8_lm_ols),
        ("AC9", "LM descent", Duration::from_secs(60), ac9_lm_descent),
        ("AC10", "end-to-end synthetic replication", Duration::from_secs(120), ac10_end_to_end),
        ("AC11", "byte-identical reruns", Duration::from_secs(600), ac11_reproducibility),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {id} {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn ac1_sky_categories() -> Result<String, String> {
    // k tenths of a percent; bin edges at 12.5, 37.5, 62.5, 87.5.
    let expected = |k: u32| match k {
        0..=124 => 0,
        125..=374 => 25,
        375..=624 => 50,
        625..=874 => 75,
        _ => 100,
    };
    for k in 0..=1000u32 {
        let pct = f64::from(k) / 10.0;
        let got = categorize_forecast_sky(pct).map_err(|e| format!("{pct}: {e}"))?;
        ensure(got == expected(k), || format!("{pct}% -> {got}, expected {}", expected(k)))?;
    }
    for (edge, below, above) in [(12.5, 0, 25), (37.5, 25, 50), (62.5, 50, 75), (87.5, 75, 100)] {
        let lo = categorize_forecast_sky(edge - 1e-9).unwrap();
        let at = categorize_forecast_sky(edge).unwrap();
        ensure(lo == below && at == above, || format!("edge {edge}: {lo}/{at}"))?;
    }
    ensure(categorize_forecast_sky(-0.1).is_err() && categorize_forecast_sky(100.1).is_err(), || {
        "out-of-range percent accepted".into()
    })?;
    let labels = [("Clear", 0), ("Mostly Clear", 25), ("Partly Cloudy", 50), ("Mostly Cloudy", 75), ("Cloudy", 100)];
    for (label, pct) in labels {
        let got = categorize_observed_sky(label).map_err(|e| e.to_string())?;
        ensure(got == pct, || format!("{label} -> {got}"))?;
    }
    ensure(categorize_observed_sky("Overcast-ish").is_err(), || "unknown label accepted".into())?;
    Ok("1001 grid points, 4 edges, 5 labels".into())
}

fn ac2_metric_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let n = rng.random_range(1..=10_000);
        let actual: Vec<f64> = (0..n)
            .map(|_| {
                let sign = if rng.random_bool(0.1) { -1.0 } else { 1.0 };
                sign * rng.random_range(0.5..150.0)
            })
            .collect();
        let predicted: Vec<f64> = actual.iter().map(|a| a + rng.random_range(-30.0..30.0)).collect();
        // Oracle: reverse-order accumulation of each term, one metric at a time.
        let (mut ape, mut ae, mut e) = (0.0, 0.0, 0.0);
        for i in (0..n).rev() {
            let diff = actual[i] - predicted[i];
            ape += (diff / actual[i]).abs();
            ae += diff.abs();
            e += diff;
        }
        let oracle = (100.0 * ape / n as f64, ae / n as f64, e / n as f64);
        let s = ErrorSample::new(&actual, &predicted).map_err(|e| e.to_string())?;
        let got = (s.mape().map_err(|e| e.to_string())?, s.mae(), s.bias());
        for (name, g, o) in [("MAPE", got.0, oracle.0), ("MAE", got.1, oracle.1), ("Bias", got.2, oracle.2)] {
            let r = rel(g, o);
            worst = worst.max(r);
            ensure(r <= 1e-12, || format!("trial {trial} n {n}: {name} {g} vs {o} (rel {r:e})"))?;
        }
    }
    Ok(format!("100 samples, worst relative difference {worst:.1e}"))
}

fn ac3_selection_replay() -> Result<String, String> {
    use WeatherVariable::*;
    let labels = vec![
        Column::Energy,
        Column::Weather(SkyCover),
        Column::Weather(DewPoint),
        Column::Weather(RelHumidity),
        Column::Weather(Temperature),
        Column::Weather(WindSpeed),
    ];
    let values = vec![
        vec![1.0, -0.42, 0.18, -0.61, 0.44, -0.09],
        vec![-0.42, 1.0, 0.14, 0.35, -0.09, 0.14],
        vec![0.18, 0.14, 1.0, 0.28, 0.9, -0.17],
        vec![-0.61, 0.35, 0.28, 1.0, -0.15, -0.02],
        vec![0.44, -0.09, 0.9, -0.15, 1.0, 0.17],
        vec![-0.09, 0.14, -0.17, -0.02, 0.17, 1.0],
    ];
    let m = CorrMatrix::new(labels, values).map_err(|e| e.to_string())?;
    ensure(m == reference_table(), || "built-in reference table differs from the typed-in values".into())?;
    let report = select_predictors(&m, &SelectionThresholds::default()).map_err(|e| e.to_string())?;
    let mut selected = report.selected.clone();
    selected.sort();
    let mut excluded: Vec<WeatherVariable> = report.excluded.iter().map(|e| e.variable).collect();
    excluded.sort();
    ensure(selected == [SkyCover, RelHumidity, Temperature], || format!("selected {selected:?}"))?;
    ensure(excluded == [DewPoint, WindSpeed], || format!("excluded {excluded:?}"))?;
    Ok("selected SC,RH,T; excluded DP,W".into())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn ac4_bootstrap_coverage() -> Result<String, String> {
    let normal = Normal::new(5.0, 2.0).unwrap();
    let mut covered = 0;
    for trial in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let sample: Vec<f64> = (0..300).map(|_| normal.sample(&mut rng)).collect();
        let cfg = BootstrapConfig { cycles: 2500, confidence: 0.95, seed: trial };
        let ci = bootstrap_ci_with(&sample, mean, &cfg, Execution::default()).map_err(|e| e.to_string())?;
        if ci.lower <= 5.0 && 5.0 <= ci.upper {
            covered += 1;
        }
    }
    let rate = f64::from(covered) / 500.0;
    ensure((0.93..=0.97).contains(&rate), || format!("coverage {rate:.3}"))?;
    Ok(format!("coverage {rate:.3} over 500 trials"))
}

fn ac5_bootstrap_determinism() -> Result<String, String> {
    let normal = Normal::new(5.0, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample: Vec<f64> = (0..2000).map(|_| normal.sample(&mut rng)).collect();
    let cfg = BootstrapConfig { cycles: 2500, confidence: 0.95, seed: 77 };
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| bootstrap_ci_with(&sample, mean, &cfg, Execution::Parallel).unwrap())
    };
    let one = run_with(1);
    let eight = run_with(8);
    let sequential = bootstrap_ci_with(&sample, mean, &cfg, Execution::Sequential).unwrap();
    for (name, other) in [("8 threads", eight), ("sequential", sequential)] {
        ensure(
            one.lower.to_bits() == other.lower.to_bits() && one.upper.to_bits() == other.upper.to_bits(),
            || format!("1 thread {one:?} vs {name} {other:?}"),
        )?;
    }
    Ok(format!("CI [{}, {}] identical for 1 thread, 8 threads, sequential", one.lower, one.upper))
}

fn ac6_acf() -> Result<String, String> {
    let r = acf(&[1.0, -1.0, 1.0, -1.0], 1).map_err(|e| e.to_string())?;
    ensure((r.at(1) + 0.75).abs() < 1e-12, || format!("r1 = {}", r.at(1)))?;

    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let white: Vec<f64> = (0..1000).map(|_| normal.sample(&mut rng)).collect();
        let a = acf(&white, 100).map_err(|e| e.to_string())?;
        worst = worst.max(a.exceed_fraction);
        ensure(a.exceed_fraction <= 0.10, || format!("seed {seed}: exceed fraction {}", a.exceed_fraction))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let mut x = 0.0;
    let ar: Vec<f64> = (0..1000)
        .map(|_| {
            x = 0.8 * x + normal.sample(&mut rng);
            x
        })
        .collect();
    let a = acf(&ar, 100).map_err(|e| e.to_string())?;
    ensure((0.7..=0.9).contains(&a.at(1)), || format!("AR(1) r1 = {}", a.at(1)))?;
    Ok(format!(
        "r1(alternating) = -0.75; white-noise exceed fraction <= {worst:.2} over 10 series; AR(1) r1 = {:.3}",
        a.at(1)
    ))
}

fn ac7_jacobian() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for config in 0..20 {
        let activation = if config % 4 == 3 { Activation::Identity } else { Activation::Tanh };
        let shape = NetworkShape {
            n_inputs: rng.random_range(1..=5),
            hidden: rng.random_range(1..=6),
            activation,
        };
        let params: Vec<f64> = (0..shape.n_params()).map(|_| rng.random_range(-1.5..1.5)).collect();
        let net = Network::from_params(shape, params.clone()).map_err(|e| e.to_string())?;
        let rows: Vec<Vec<f64>> = (0..rng.random_range(3..=15))
            .map(|_| (0..shape.n_inputs).map(|_| rng.random_range(-1.2..1.2)).collect())
            .collect();
        let j = jacobian(&net, &rows).map_err(|e| e.to_string())?;
        let h = 1e-6;
        for k in 0..params.len() {
            let shifted = |delta: f64| {
                let mut p = params.clone();
                p[k] += delta;
                Network::from_params(shape, p).unwrap()
            };
            let (plus, minus) = (shifted(h), shifted(-h));
            for (i, x) in rows.iter().enumerate() {
                let fd = (plus.forward(x).unwrap() - minus.forward(x).unwrap()) / (2.0 * h);
                let an = j[(i, k)];
                let scale = an.abs().max(fd.abs());
                let err = if scale < 1e-8 { (an - fd).abs() } else { (an - fd).abs() / scale };
                worst = worst.max(err);
                ensure(err <= 1e-4, || format!("config {config}, row {i}, param {k}: {an} vs {fd}"))?;
            }
        }
    }
    Ok(format!("20 configurations, worst relative error {worst:.1e}"))
}

/// Least squares with intercept via normal equations and Gauss-Jordan
/// elimination with partial pivoting. Returns [intercept, slopes...].
fn ols(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len() + 1;
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &t) in x.iter().zip(y) {
        let z: Vec<f64> = std::iter::once(1.0).chain(row.iter().copied()).collect();
        for i in 0..p {
            for j in 0..p {
                a[i][j] += z[i] * z[j];
            }
            a[i][p] += z[i] * t;
        }
    }
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        for i in 0..p {
            if i != col {
                let f = a[i][col] / a[col][col];
                for j in col..=p {
                    a[i][j] -= f * a[col][j];
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

fn ac8_lm_ols() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let beta = [0.3, -0.7, 0.45, 0.1];
    let inputs: Vec<Vec<f64>> = (0..50)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let targets: Vec<f64> = inputs
        .iter()
        .map(|x| beta[0] + beta[1] * x[0] + beta[2] * x[1] + beta[3] * x[2] + noise.sample(&mut rng))
        .collect();
    let exact = ols(&inputs, &targets);
    let shape = NetworkShape { n_inputs: 3, hidden: 2, activation: Activation::Identity };
    let cfg = LmConfig { max_iterations: 500, min_relative_mse_improvement: 0.0, seed: 8, ..LmConfig::default() };
    let rows = NormalizedRows { inputs: inputs.clone(), targets };
    let out = train_lm(&rows, shape, &cfg).map_err(|e| e.to_string())?;
    // The identity network is linear: f(x) = w2·(W1 x + b1) + b2.
    let net = &out.network;
    let (w1, b1, w2, b2) = (net.hidden_weights(), net.hidden_biases(), net.output_weights(), net.output_bias());
    let mut effective = vec![b2 + w2.iter().zip(b1).map(|(a, b)| a * b).sum::<f64>()];
    for k in 0..3 {
        effective.push((0..2).map(|h| w2[h] * w1[h * 3 + k]).sum());
    }
    let worst = effective.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-6, || format!("LM {effective:?} vs OLS {exact:?} (max diff {worst:e}, stop {:?})", out.stop))?;
    Ok(format!("max coefficient difference {worst:.1e} after {} iterations ({:?})", out.iterations, out.stop))
}

fn ac9_lm_descent() -> Result<String, String> {
    let mut runs = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let inputs: Vec<Vec<f64>> = (0..120)
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let targets: Vec<f64> = inputs
        .iter()
        .map(|x| (1.5 * x[0]).tanh() - 0.6 * x[1] * x[2] + 0.2 * (3.0 * x[2]).sin())
        .collect();
    let rows = NormalizedRows { inputs, targets };
    for hidden in [1, 3, 5, 8] {
        for activation in [Activation::Tanh, Activation::Identity] {
            for seed in 0..10 {
                let shape = NetworkShape { n_inputs: 3, hidden, activation };
                let cfg = LmConfig { seed, ..LmConfig::default() };
                let out = train_lm(&rows, shape, &cfg).map_err(|e| e.to_string())?;
                let h = &out.mse_history;
                ensure(h.len() == out.iterations + 1, || "history length mismatch".into())?;
                if let Some(i) = (1..h.len()).find(|&i| h[i] >= h[i - 1]) {
                    return Err(format!("hidden {hidden} {activation:?} seed {seed}: MSE rose at step {i}"));
                }
                runs += 1;
            }
        }
    }
    let data = generate(&SynthConfig { days: 120, ..SynthConfig::default() }).unwrap();
    let ds = extract_peaks(&data.energy, &data.observed, &data.forecast).unwrap();
    for seed in 0..5 {
        let cfg = FitConfig { lm: LmConfig { seed, ..LmConfig::default() }, ..FitConfig::default() };
        let f = fit(&ds, &cfg, Execution::Sequential).map_err(|e| e.to_string())?;
        let h = &f.outcome.mse_history;
        ensure(h.windows(2).all(|w| w[1] < w[0]), || format!("peak model seed {seed}: MSE not decreasing"))?;
        runs += 1;
    }
    Ok(format!("{runs} seeded runs strictly decreasing"))
}

fn spearman_trend(y: &[f64]) -> f64 {
    let n = y.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    let mut rank = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && y[order[j + 1]] == y[order[i]] {
            j += 1;
        }
        for k in i..=j {
            rank[order[k]] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    let m = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (k, r) in rank.iter().enumerate() {
        let x = k as f64 + 1.0;
        sxy += (x - m) * (r - m);
        sxx += (x - m) * (x - m);
        syy += (r - m) * (r - m);
    }
    sxy / (sxx * syy).sqrt()
}

fn ac10_end_to_end() -> Result<String, String> {
    let data = generate(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    // (a) and (b)
    let mut min_rho: f64 = 1.0;
    for v in WeatherVariable::ALL {
        let planted = data.truth.errors[v.index()].bias;
        let mut mae = Vec::new();
        for d in 1..=6 {
            let pairs = align(&data.observed, &data.forecast, v, d).pairs;
            let st = error_stats(&pairs, &BootstrapConfig { seed: d.into(), ..BootstrapConfig::default() })
                .map_err(|e| e.to_string())?;
            ensure(st.bias.signum() == planted.signum(), || {
                format!("(a) {v} lead {d}: bias {} vs planted {planted}", st.bias)
            })?;
            mae.push(st.mae);
        }
        let rho = spearman_trend(&mae);
        min_rho = min_rho.min(rho);
        ensure(rho >= 0.9, || format!("(b) {v}: MAE {mae:?}, rho {rho}"))?;
    }
    notes.push(format!("(a) signs match, (b) min rho {min_rho:.2}"));
    // (c)
    let ds = extract_peaks(&data.energy, &data.observed, &data.forecast).map_err(|e| e.to_string())?;
    let f = fit(&ds, &FitConfig::default(), Execution::default()).map_err(|e| e.to_string())?;
    let eval = evaluate_lead_days(&f.model, &ds).map_err(|e| e.to_string())?;
    for l in &eval.leads {
        ensure(l.metrics.mape > eval.baseline.mape, || {
            format!("(c) lead {}: {} <= baseline {}", l.lead_day, l.metrics.mape, eval.baseline.mape)
        })?;
    }
    let min_gap = eval.leads.iter().map(|l| l.metrics.mape - eval.baseline.mape).fold(f64::INFINITY, f64::min);
    notes.push(format!("(c) forecast MAPE exceeds baseline {:.2}% by >= {min_gap:.2}", eval.baseline.mape));
    // (d)
    let curves = sensitivity_all(&f.model, &ds, Execution::default()).map_err(|e| e.to_string())?;
    let dominant = data.truth.dominant_variable;
    let dom = curves
        .iter()
        .find(|c| c.perfect_variable == dominant)
        .ok_or("(d) dominant variable is not a model input")?;
    for c in &curves {
        ensure(c.mean_mape() >= dom.mean_mape(), || {
            format!("(d) {} mean {} below {dominant} {}", c.perfect_variable, c.mean_mape(), dom.mean_mape())
        })?;
        for (a, b) in dom.leads.iter().zip(&c.leads) {
            ensure(a.metrics.mape <= b.metrics.mape, || format!("(d) lead {}: {} beats {dominant}", a.lead_day, c.perfect_variable))?;
        }
    }
    notes.push(format!("(d) {dominant} curve lowest at every lead, mean {:.2}%", dom.mean_mape()));
    Ok(notes.join("; "))
}

fn run_cli(args: &[&str], threads: &str) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_helios-audit"))
        .args(args)
        .env_remove("HELIOS_SEED")
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn ac11_reproducibility() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for (name, threads) in [("first", "1"), ("second", "4")] {
        let data = tmp.path().join(name).join("data");
        let out = tmp.path().join(name).join("out");
        let (d, o) = (data.to_str().unwrap(), out.to_str().unwrap());
        run_cli(&["synth", "--out", d, "--seed", "11", "--days", "120"], threads)?;
        for cmd in ["audit", "select", "train", "evaluate", "sensitivity", "sweep"] {
            run_cli(&[cmd, "--in", d, "--out", o, "--seed", "11", "--cycles", "300", "--max-iter", "60"], threads)?;
        }
        runs.push((snapshot(&data), snapshot(&out)));
    }
    let (a, b) = (&runs[0], &runs[1]);
    let mut compared = 0;
    for (x, y) in [(&a.0, &b.0), (&a.1, &b.1)] {
        ensure(x.len() == y.len(), || "different file sets".into())?;
        for ((na, ca), (nb, cb)) in x.iter().zip(y) {
            ensure(na == nb, || format!("{na} vs {nb}"))?;
            ensure(ca == cb, || format!("{na} differs between reruns"))?;
            compared += 1;
        }
    }
    let kinds = ["json", "csv", "svg"]
        .iter()
        .map(|ext| format!("{} {ext}", a.1.iter().filter(|(n, _)| n.ends_with(ext)).count()))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(format!("{compared} files identical across reruns with 1 and 4 threads ({kinds} outputs)"))
}
