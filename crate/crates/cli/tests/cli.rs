use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_couplecrack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    serde_json::from_str::<Value>(&text).unwrap()["summary"].clone()
}

fn error_line(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with('{')).collect();
    assert_eq!(lines.len(), 1, "{text}");
    serde_json::from_str(lines[0]).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&["solve", "--nu", "0.3", "--p", "10", "--n", "128", "--out", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["densities.csv", "profiles.csv", "near_tip.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let s = summary(dir.path(), "summary.json");
    let k = s["K_I_ratio"].as_f64().unwrap();
    assert!(k > 1.0 && k < 1.35, "{k}");
    assert!((k - 1.21580460717).abs() < 1e-9, "{k}");
    assert_eq!(s["n"], 128);

    let text = std::fs::read_to_string(dir.path().join("densities.csv")).unwrap();
    assert!(text.starts_with("# couplecrack solve densities\n# config {"));
    let (header, rows) = csv_rows(&dir.path().join("densities.csv"));
    assert_eq!(header[0], "i");
    assert_eq!(rows.len(), 128);
    let first_value = text.lines().nth(3).unwrap().split(',').nth(1).unwrap();
    assert_eq!(first_value.split('e').next().unwrap().len(), 13);

    let (_, tip) = csv_rows(&dir.path().join("near_tip.csv"));
    assert!(tip.windows(2).all(|w| w[1][4] < w[0][4]));
}

#[test]
fn solve_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().to_str().unwrap();
    let files = ["densities.csv", "profiles.csv", "near_tip.csv", "summary.json"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        assert!(run(&["solve", "--p", "3", "--n", "48", "--out", out]).status.success());
        runs.push(files.map(|f| std::fs::read(d.path().join(f)).unwrap()));
    }
    for (f, (x, y)) in files.iter().zip(runs[0].iter().zip(&runs[1])) {
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn json_format_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(run(&["solve", "--p", "2", "--n", "32", "--format", "json", "--out", out]).status.success());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("profiles.json")).unwrap()).unwrap();
    assert_eq!(doc["columns"][0], "x");
    assert_eq!(doc["config"]["p"], 2.0);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 101);
}

#[test]
fn malformed_config_gives_one_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["solve", "--n", "4", "--out", out],
        vec!["solve", "--p", "-1", "--out", out],
        vec!["solve", "--nu", "0.7", "--out", out],
        vec!["solve", "--p", "abc"],
        vec!["solve", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        let res = run(&args);
        assert_eq!(res.status.code(), Some(1), "{args:?}");
        assert_eq!(error_line(&res)["error"], "config", "{args:?}");
    }
}

#[test]
fn sweep_sorted_with_trend_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&[
        "sweep", "--p-min", "0.5", "--p-max", "20", "--p-steps", "5", "--log-spaced", "--nu-list", "0,0.5", "--n",
        "64", "--out", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("sweep.csv"));
    assert_eq!(header[0], "ell_over_a");
    assert_eq!(rows.len(), 10);
    assert!(rows.windows(2).all(|w| w[0][0] <= w[1][0]));
    let s = summary(dir.path(), "sweep_summary.json");
    for t in s["trends"].as_array().unwrap() {
        assert_eq!(t["k_ratio_decreasing"], true);
        assert_eq!(t["j_ratio_decreasing"], true);
        assert_eq!(t["j_below_classical"], true);
    }
}

#[test]
fn empty_sweep_is_rejected() {
    for args in [
        vec!["sweep", "--p-steps", "0"],
        vec!["sweep", "--p-min", "5", "--p-max", "1"],
        vec!["sweep", "--p-min", "2", "--p-max", "2", "--p-steps", "3"],
    ] {
        let res = run(&args);
        assert_eq!(res.status.code(), Some(1));
        let e = error_line(&res);
        assert!(e["message"].as_str().unwrap().contains("empty"), "{e}");
    }
}

#[test]
fn field_grid_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&[
        "field", "--b", "1", "--x-min", "-3", "--x-max", "3", "--nx", "4", "--y-min", "0", "--y-max", "0", "--ny",
        "1", "--out", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = csv_rows(&dir.path().join("field.csv"));
    let omega = header.iter().position(|h| h == "omega").unwrap();
    assert!(rows.iter().all(|r| r[omega].abs() < 1e-6));

    let res = run(&[
        "field", "--omega", "1", "--x-min", "-50", "--x-max", "50", "--nx", "2", "--y-min", "0", "--y-max", "0",
        "--ny", "1", "--out", out,
    ]);
    assert!(res.status.success());
    let (header, rows) = csv_rows(&dir.path().join("field.csv"));
    let myz = header.iter().position(|h| h == "myz").unwrap();
    assert!((rows[0][myz] - 1.0).abs() < 1e-6 && (rows[1][myz] + 1.0).abs() < 1e-6);
}

#[test]
fn field_rejects_core_and_empty_grids() {
    let res = run(&["field", "--b", "1", "--x-min", "-1", "--x-max", "1", "--nx", "3", "--y-min", "0", "--ny", "2"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(error_line(&res)["message"].as_str().unwrap().contains("(0, 0)"));
    let res = run(&["field", "--b", "1", "--nx", "0"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(error_line(&res)["message"].as_str().unwrap().contains("empty grid"));
}

#[test]
fn baseline_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = run(&["baseline", "--nu", "0.25", "--sigma0", "2", "--a", "0.5", "--out", out]);
    assert!(res.status.success());
    let s = summary(dir.path(), "baseline_summary.json");
    assert!(s["K_rel_error"].as_f64().unwrap() < 1e-6);
    assert!(s["J_rel_error"].as_f64().unwrap() < 1e-6);
    let (_, rows) = csv_rows(&dir.path().join("baseline.csv"));
    assert!(rows.iter().all(|r| (r[2] - r[3]).abs() < 1e-9 * (1.0 + r[2])));
}
