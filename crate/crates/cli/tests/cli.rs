use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_helios-audit");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("HELIOS_SEED")
        .output()
        .expect("binary runs")
}

fn run_in(cmd: &str, input: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--in", input.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn audit_writes_thirty_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "40", "--seed", "2"]);
    let o = run_in("audit", &data, &out, &["--cycles", "200", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = lines(&out.join("audit.csv"));
    assert_eq!(rows.len(), 31);
    assert!(rows[0].starts_with("variable,lead_day,bias,mae,"));
    assert!(rows[1].starts_with("SC,1,"));
    assert!(rows[30].starts_with("W,6,"));
    let acf = lines(&out.join("acf.csv"));
    assert_eq!(acf.len(), 1 + 30 * 100);
    for v in ["SC", "DP", "RH", "T", "W"] {
        assert!(out.join(format!("mae_{v}.svg")).is_file());
        assert!(out.join(format!("acf_{v}_d1.svg")).is_file());
    }
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("audit.json")).unwrap()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["cells"].as_array().unwrap().len(), 30);
}

#[test]
fn no_figures_skips_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "30"]);
    let o = run_in("audit", &data, &out, &["--cycles", "50", "--no-figures"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let svgs = fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    assert_eq!(svgs, 0);
}

#[test]
fn missing_input_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in("audit", &tmp.path().join("nope"), &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not exist"));
    let o = run(&["audit", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_row_reports_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "30"]);
    let path = data.join("forecast.csv");
    let mut text: Vec<String> = lines(&path);
    text[2] = text[2].replacen(',', ",not-a-time,", 1);
    fs::write(&path, text.join("\n") + "\n").unwrap();
    let o = run_in("audit", &data, &out, &["--cycles", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("forecast.csv:3:"), "{}", stderr(&o));
}

#[test]
fn disjoint_files_report_the_gap() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "30"]);
    let obs = lines(&data.join("observed.csv"));
    let shifted: Vec<String> = std::iter::once(obs[0].clone())
        .chain(obs[1..].iter().map(|l| l.replacen("2016-", "2015-", 1)))
        .collect();
    fs::write(data.join("observed.csv"), shifted.join("\n") + "\n").unwrap();
    let o = run_in("audit", &data, &out, &["--cycles", "50"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no overlapping hours"), "{}", stderr(&o));
}

#[test]
fn injected_table_selects_sc_rh_t() {
    let tmp = tempfile::tempdir().unwrap();
    let matrix = tmp.path().join("table.csv");
    fs::write(
        &matrix,
        "column,E,SC,DP,RH,T,W\n\
         E,1,-0.42,0.18,-0.61,0.44,-0.09\n\
         SC,-0.42,1,0.14,0.35,-0.09,0.14\n\
         DP,0.18,0.14,1,0.28,0.9,-0.17\n\
         RH,-0.61,0.35,0.28,1,-0.15,-0.02\n\
         T,0.44,-0.09,0.9,-0.15,1,0.17\n\
         W,-0.09,0.14,-0.17,-0.02,0.17,1\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = run(&["select", "--out", out.to_str().unwrap(), "--corr-matrix", matrix.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("selection.json")).unwrap()).unwrap();
    assert_eq!(v["selected"], serde_json::json!(["SkyCover", "RelHumidity", "Temperature"]));
    let excluded: Vec<&str> = v["excluded"].as_array().unwrap().iter().map(|e| e["variable"].as_str().unwrap()).collect();
    assert_eq!(excluded, ["DewPoint", "WindSpeed"]);
    assert_eq!(fs::read_to_string(out.join("corr.csv")).unwrap(), fs::read_to_string(&matrix).unwrap());
}

#[test]
fn select_on_synth_writes_matrix_and_scatter_data() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &[]);
    let o = run_in("select", &data, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let corr = lines(&out.join("corr.csv"));
    assert_eq!(corr.len(), 7);
    assert!(corr.iter().all(|l| l.split(',').count() == 7));
    for name in ["scatter_energy_dp", "scatter_energy_w", "scatter_energy_rh", "scatter_dp_t"] {
        assert_eq!(lines(&out.join(format!("{name}.csv"))).len(), 366, "{name}");
        assert!(out.join(format!("{name}.svg")).is_file());
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("selection.json")).unwrap()).unwrap();
    let truth: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(data.join("ground_truth.json")).unwrap()).unwrap();
    assert_eq!(v["selected"], truth["informative_variables"]);
}

#[test]
fn too_few_days_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "30"]);
    let energy = lines(&data.join("energy.csv"));
    fs::write(data.join("energy.csv"), energy[..1 + 48].join("\n") + "\n").unwrap();
    let o = run_in("select", &data, &out, &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn noiseless_forecasts_match_observed_bar() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &["--days", "90", "--noiseless"]);
    let o = run_in("train", &data, &out, &["--max-iter", "50"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("model.json").is_file());
    let o = run_in("evaluate", &data, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = lines(&out.join("leadday.csv"));
    assert_eq!(rows.len(), 1 + 6 + 3);
    let metrics = |row: &str| row.split(',').skip(2).map(str::to_string).collect::<Vec<_>>();
    let observed = metrics(&rows[7]);
    assert!(rows[7].starts_with("observed,,"));
    for row in &rows[1..7] {
        assert_eq!(metrics(row), observed, "{row}");
    }
}

#[test]
fn sensitivity_and_sweep_on_default_synth() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, out) = (tmp.path().join("data"), tmp.path().join("out"));
    synth(&data, &[]);
    let o = run_in("sensitivity", &data, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sensitivity.json")).unwrap()).unwrap();
    assert_eq!(v["lowest"], "RelHumidity");
    assert_eq!(v["model"], "trained in-process");
    assert_eq!(lines(&out.join("sensitivity.csv")).len(), 1 + 4 * 6);
    let o = run_in("sweep", &data, &out, &["--max-iter", "40"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = lines(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 32);
    assert!(rows[1].starts_with("1,"));
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    synth(&a, &["--days", "30", "--seed", "9"]);
    let o = Command::new(BIN)
        .args(["synth", "--days", "30", "--out", b.to_str().unwrap()])
        .env("HELIOS_SEED", "9")
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["observed.csv", "forecast.csv", "energy.csv", "ground_truth.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}
