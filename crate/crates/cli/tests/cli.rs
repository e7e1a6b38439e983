use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn morrey(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn samples(dir: &Path, name: &str, n: usize, f: impl Fn(f64) -> f64) -> PathBuf {
    let mut s = String::from("t,value\n");
    for i in 0..=n {
        let t = i as f64 / n as f64;
        s.push_str(&format!("{t},{}\n", f(t)));
    }
    write(dir, name, &s)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn norm_of_the_indicator() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "chi01.csv", 256, |_| 1.0);
    let o = morrey(
        dir.path(),
        &["norm", "--p", "2", "--lambda", "0.5", "--theta", "1", "--side", "plus", "--weight", "const:1", "--input", "chi01.csv"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-2, "{v}");
    assert_eq!(v["argmax_x0"], 0.0);
    assert_eq!(v["argmax_h"], 1.0);
}

#[test]
fn weak_norm_reports_the_level() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "f.csv", 128, |t| t);
    let o = morrey(dir.path(), &["norm", "--p", "1", "--lambda", "0.25", "--side", "minus", "--input", "f.csv", "--weak"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["argmax_gamma"].as_f64().is_some(), "{v}");
    assert_eq!(v["weak"], true);
}

#[test]
fn malformed_csv_is_a_data_error_with_the_row() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.csv", "t,value\n0,1\n0.5,1\n0.7,1\n1,1\n");
    let o = morrey(dir.path(), &["norm", "--p", "2", "--lambda", "0.5", "--side", "plus", "--input", "bad.csv"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let o = morrey(dir.path(), &["norm", "--p", "2", "--lambda", "0.5", "--side", "plus", "--input", "none.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn bad_parameters_exit_2_and_name_the_parameter() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "f.csv", 64, |t| t);
    let o = morrey(dir.path(), &["norm", "--p", "0.5", "--lambda", "0.5", "--side", "plus", "--input", "f.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`p`"), "{}", stderr(&o));
    let o = morrey(dir.path(), &["norm", "--p", "2", "--lambda", "0.5", "--side", "up", "--input", "f.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("side"), "{}", stderr(&o));
    let o = morrey(dir.path(), &["norm", "--p", "2", "--lambda", "0.5", "--side", "plus", "--weight", "cos", "--input", "f.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("weight"), "{}", stderr(&o));
}

#[test]
fn scaling_fit_needs_four_horizons() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2, "horizons": [0.5, 1, 2]}"#);
    let o = morrey(dir.path(), &["verify", "--experiment", "rl-scaling", "--config", "exp.json", "--out", "r.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("horizons"), "{}", stderr(&o));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2, "sigma": 1}"#);
    let o = morrey(dir.path(), &["verify", "--experiment", "rl-bound", "--config", "exp.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("sigma"), "{}", stderr(&o));
    write(dir.path(), "fde.json", r#"{"alpha": 0.5, "rhs": {"name": "constant", "c": 1, "k": 2}, "horizon": 1}"#);
    let o = morrey(dir.path(), &["fde", "solve", "--config", "fde.json", "--out", "u.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`k`"), "{}", stderr(&o));
}

#[test]
fn unparseable_config_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", "{ alpha: ");
    let o = morrey(dir.path(), &["verify", "--experiment", "rl-bound", "--config", "exp.json"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn violated_hypothesis_is_a_parameter_error() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2, "mu": 0.5}"#);
    let o = morrey(dir.path(), &["verify", "--experiment", "rl-bound", "--config", "exp.json"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`mu`"), "{}", stderr(&o));
}

#[test]
fn failed_verdict_exits_4_after_writing_the_report() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "exp.json",
        r#"{"probes": [{"id": "u", "exponent": -0.36, "p": 1.25, "lambda": 0.5, "weight": "pow:-0.5", "expect": "diverging"}], "n0": 64}"#,
    );
    let o = morrey(dir.path(), &["verify", "--experiment", "membership", "--config", "exp.json", "--out", "r.csv"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let report = read(dir.path(), "r.csv");
    assert!(report.starts_with("experiment,row_id,parameters,source_norm,target_norm,ratio,verdict\n"));
    assert!(report.contains("converging"), "{report}");
    assert!(dir.path().join("r.csv.manifest.json").exists());
}

#[test]
fn passing_experiments_exit_0() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "weak.json", r#"{"lambda": 0.25}"#);
    write(dir.path(), "eq.json", r#"{"alpha": 0.8, "p": 2, "q": 4, "n": 256}"#);
    write(dir.path(), "comp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2, "family": ["t", "bump:0.5:0.25"]}"#);
    for (exp, cfg) in [("weak11", "weak.json"), ("equicont-rate", "eq.json"), ("compactness", "comp.json")] {
        let o = morrey(dir.path(), &["verify", "--experiment", exp, "--config", cfg, "--n", "64", "--out", "r.csv"]);
        assert_eq!(code(&o), 0, "{exp}: {}", stderr(&o));
        assert!(read(dir.path(), "r.csv").lines().skip(1).all(|l| l.starts_with(exp)));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2, "weight": "exp"}"#);
    let run = |out: &str| {
        let o = morrey(dir.path(), &["verify", "--experiment", "rl-bound", "--config", "exp.json", "--n", "64", "--out", out]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        (read(dir.path(), out), read(dir.path(), &format!("{out}.manifest.json")))
    };
    let (a, ma) = run("a.csv");
    let (b, mb) = run("b.csv");
    assert_eq!(a, b);
    assert_eq!(ma.replace("a.csv", "b.csv"), mb);
}

#[test]
fn csv_and_json_reports_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2}"#);
    for (out, fmt) in [("r.csv", "csv"), ("r.json", "json")] {
        let o = morrey(
            dir.path(),
            &["verify", "--experiment", "rl-bound", "--config", "exp.json", "--n", "64", "--format", fmt, "--out", out],
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let csv_text = read(dir.path(), "r.csv");
    let json: Value = serde_json::from_str(&read(dir.path(), "r.json")).unwrap();
    let rows = json["rows"].as_array().unwrap();
    let lines: Vec<&str> = csv_text.lines().skip(1).collect();
    assert_eq!(rows.len(), lines.len());
    for (line, row) in lines.iter().zip(rows) {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
        let rec = rdr.records().next().unwrap().unwrap();
        for (cell, value) in rec.iter().zip(row.as_array().unwrap()) {
            match value {
                Value::Number(n) => assert_eq!(cell, n.to_string()),
                Value::String(s) => assert_eq!(cell, s),
                Value::Null => assert_eq!(cell, ""),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn manifest_echoes_the_resolved_config() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "exp.json", r#"{"alpha": 0.8, "p": 1.5, "q": 2}"#);
    let o = morrey(dir.path(), &["verify", "--experiment", "rl-bound", "--config", "exp.json", "--n", "32", "--out", "r.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m: Value = serde_json::from_str(&read(dir.path(), "r.csv.manifest.json")).unwrap();
    assert_eq!(m["resolved"]["n"], 32);
    assert_eq!(m["resolved"]["weight"], "const:1");
    assert_eq!(m["resolved"]["family"].as_array().unwrap().len(), 10);
    assert_eq!(m["invocation"]["command"]["verify"]["experiment"], "rl-bound");
}

#[test]
fn unwritable_output_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "f.csv", 64, |t| t);
    let o = morrey(
        dir.path(),
        &["norm", "--p", "2", "--lambda", "0.5", "--side", "plus", "--input", "f.csv", "--out", "missing/dir/x.json"],
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn rl_integral_of_one() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "one.csv", 128, |_| 1.0);
    let o = morrey(dir.path(), &["ops", "apply", "--op", "rl-int", "--alpha", "0.5", "--input", "one.csv", "--out", "g.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = read(dir.path(), "g.csv");
    let last = text.lines().last().unwrap();
    let v: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12, "{v}");
}

#[test]
fn whole_line_operators_pad_the_output() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "f.csv", 32, |t| t);
    for op in ["maximal+", "maximal-", "singular", "majorant"] {
        let o = morrey(dir.path(), &["ops", "apply", "--op", op, "--input", "f.csv", "--format", "json"]);
        assert_eq!(code(&o), 0, "{op}: {}", stderr(&o));
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), 97, "{op}");
        assert_eq!(v["t"][0], -1.0);
    }
    let o = morrey(dir.path(), &["ops", "apply", "--op", "weyl+", "--input", "f.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha"));
    let o = morrey(dir.path(), &["ops", "apply", "--op", "meanvalue", "--window", "0.25", "--input", "f.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn abel_solve_writes_phi_and_diagnostics() {
    let dir = TempDir::new().unwrap();
    samples(dir.path(), "f.csv", 256, |t| t);
    let o = morrey(dir.path(), &["abel", "solve", "--alpha", "0.5", "--lambda", "0.25", "--input", "f.csv", "--out", "phi.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solvable"], true);
    assert!(v["residual_sup"].as_f64().unwrap() < 1e-3);
    assert_eq!(v["diagnostics"]["label"], "proxy");
    assert!(read(dir.path(), "phi.csv").starts_with("t,value\n"));

    let o = morrey(dir.path(), &["abel", "solve", "--alpha", "0.5", "--lambda", "0.25", "--input", "f.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`out`"));
}

#[test]
fn unsolvable_abel_data_needs_force() {
    let dir = TempDir::new().unwrap();
    let h = 1.0 / 256.0;
    samples(dir.path(), "f.csv", 256, |t| t.max(h / 2.0).powf(-0.6));
    let args = ["abel", "solve", "--alpha", "0.5", "--lambda", "0.25", "--input", "f.csv", "--origin-power", "-0.6", "--out", "phi.csv"];
    let o = morrey(dir.path(), &args);
    assert_eq!(code(&o), 3);
    let mut forced = args.to_vec();
    forced.push("--force");
    let o = morrey(dir.path(), &forced);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["solvable"], false);
}

#[test]
fn fde_solve_constant_rhs() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.json", r#"{"alpha": 0.5, "rhs": {"name": "constant", "c": 1}, "horizon": 1}"#);
    let o = morrey(dir.path(), &["fde", "solve", "--config", "p.json", "--n", "256", "--out", "u.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["converged"], true);
    assert_eq!(v["iterations"], 2);
    let text = read(dir.path(), "u.csv");
    let u1: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((u1 - std::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-9, "{u1}");
    let m: Value = serde_json::from_str(&read(dir.path(), "u.csv.manifest.json")).unwrap();
    assert_eq!(m["resolved"]["n"], 256);
    assert_eq!(m["resolved"]["lipschitz"], 0.0);
}

#[test]
fn fde_horizon_from_the_contraction_bound() {
    let dir = TempDir::new().unwrap();
    write(
        dir.path(),
        "p.json",
        r#"{"alpha": 0.8, "rhs": {"name": "linear-manufactured", "c": 1}, "contraction": {"p": 2, "q": 4}}"#,
    );
    let o = morrey(dir.path(), &["fde", "solve", "--config", "p.json", "--n", "128", "--out", "u.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let m: Value = serde_json::from_str(&read(dir.path(), "u.csv.manifest.json")).unwrap();
    let h = m["resolved"]["horizon"].as_f64().unwrap();
    assert!((h - 0.828685).abs() < 1e-5, "{h}");

    write(dir.path(), "q.json", r#"{"alpha": 0.8, "rhs": {"name": "constant", "c": 1}}"#);
    let o = morrey(dir.path(), &["fde", "solve", "--config", "q.json", "--out", "u.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("horizon"));
}

#[test]
fn fde_exact_and_delta() {
    let dir = TempDir::new().unwrap();
    let o = morrey(dir.path(), &["fde", "exact", "--alpha", "0.8", "--gamma", "0.1", "--n", "1024"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["max_relative_residual"].as_f64().unwrap() < 2e-2);
    let o = morrey(dir.path(), &["fde", "exact", "--alpha", "0.5", "--gamma", "0"]);
    assert_eq!(code(&o), 2);
    let o = morrey(dir.path(), &["fde", "delta", "--alpha", "0.8", "--p", "2", "--q", "4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["existence"].as_f64().unwrap() - 0.8287).abs() < 1e-3);
    let o = morrey(dir.path(), &["fde", "delta", "--alpha", "0.8", "--p", "2", "--q", "4", "--format", "csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn weight_constants() {
    let dir = TempDir::new().unwrap();
    let o = morrey(dir.path(), &["weights", "--weight", "const:3", "--class", "ap", "--p", "2", "--n", "64"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // sup (b−a)(c−b)/(c−a)^2 = 1/4 whatever the constant
    assert!((v["constant_estimate"].as_f64().unwrap() - 0.25).abs() < 1e-12, "{v}");
    let o = morrey(dir.path(), &["weights", "--weight", "exp", "--class", "apq", "--n", "64"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("`q`"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let o = morrey(dir.path(), &["norm", "--p", "2"]);
    assert_eq!(code(&o), 2);
    let o = morrey(dir.path(), &["verify", "--experiment", "nope", "--config", "x.json"]);
    assert_eq!(code(&o), 2);
}
