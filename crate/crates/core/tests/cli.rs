use std::fs;
use std::path::Path;
use std::process::{Command, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = r#"{"pieces": [
    {"lo": -1, "hi": 0, "kind": "affine", "params": {"a": 1, "b": 1}},
    {"lo": 0, "hi": 1, "kind": "affine", "params": {"a": 1, "b": -1}}]}"#;

fn run(dir: &Path, config: &str, args: &[&str]) -> i32 {
    let cfg = dir.join("config.json");
    fs::write(&cfg, config).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_mapbayes"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .stderr(Stdio::null())
        .status()
        .unwrap();
    status.code().unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn csv_rows(dir: &Path, name: &str) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join("out").join(name))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn map_on_counterexample_and_triangle() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), r#"{"density": {"counterexample": {"max_bump": 20}}}"#, &["map"]), 0);
    let m = json(dir.path(), "map.json");
    assert_eq!(m["canonical"][0].as_f64(), Some(0.0));
    assert_eq!(m["sup_value"].as_f64(), Some(1.0));

    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}}}"#), &["map"]), 0);
    assert_eq!(json(dir.path(), "map.json")["canonical"][0].as_f64(), Some(0.0));
}

#[test]
fn map_on_grid_matches_brute_scan() {
    let dir = TempDir::new().unwrap();
    let values = [[0.1, 0.2, 0.3], [0.5, 0.9, 0.4], [0.2, 0.6, 0.8]];
    let cfg = format!(
        r#"{{"density": {{"dim": 2, "origin": [0, 0], "spacing": [1, 1], "values": {}, "normalize": true}},
            "search_box": [[0, 0], [3, 3]]}}"#,
        serde_json::to_string(&values).unwrap()
    );
    assert_eq!(run(dir.path(), &cfg, &["map"]), 0);
    let m = json(dir.path(), "map.json");
    let (x, y) = (m["canonical"][0].as_f64().unwrap(), m["canonical"][1].as_f64().unwrap());
    // brute argmax is cell (1, 1) = [1, 2] x [1, 2]; its nearest point to the origin is (1, 1)
    assert!((x - 1.0).abs() < 1e-6 && (y - 1.0).abs() < 1e-6);
}

#[test]
fn density_may_live_in_its_own_file() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("tri.json"), TRIANGLE).unwrap();
    assert_eq!(run(dir.path(), r#"{"density": "tri.json", "c": 4}"#, &["bayes"]), 0);
    let b = json(dir.path(), "bayes.json");
    assert_eq!(b["c"].as_f64(), Some(4.0));
    assert!(b["estimate"]["canonical"][0].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn sweep_verdicts() {
    let dir = TempDir::new().unwrap();
    let ce = r#"{"density": {"counterexample": {"max_bump": 20}}, "nu_max": 4, "search_box": [-1, 10]}"#;
    assert_eq!(run(dir.path(), ce, &["sweep"]), 0);
    assert_eq!(json(dir.path(), "verdict.json")["verdict"], "diverges_from_map");
    let rows = csv_rows(dir.path(), "sweep.csv");
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap().abs() >= 0.5));

    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}, "nu_max": 6}}"#), &["sweep"]), 0);
    let v = json(dir.path(), "verdict.json")["verdict"].as_str().unwrap().to_owned();
    assert!(v == "converges_to_map" || v == "limit_point_is_map");

    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}, "ladder": [100]}}"#), &["sweep"]), 0);
    assert_eq!(csv_rows(dir.path(), "sweep.csv").len(), 1);
    assert_eq!(json(dir.path(), "verdict.json")["verdict"], "inconclusive");

    let geo = format!(r#"{{"density": {TRIANGLE}, "ladder": {{"base": 1, "factor": 10, "count": 3}}}}"#);
    assert_eq!(run(dir.path(), &geo, &["sweep"]), 0);
    let cs: Vec<f64> = csv_rows(dir.path(), "sweep.csv").iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(cs, vec![10.0, 100.0, 1000.0]);
}

#[test]
fn sweep_csv_header_and_precision() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}, "ladder": [3, 7]}}"#), &["sweep"]), 0);
    let text = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,canonical,sup_value,dist_to_map,argmax_lo,argmax_hi"));
    for line in lines {
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
        }
    }
}

#[test]
fn check_reports() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), r#"{"density": {"counterexample": {"max_bump": 20}}}"#, &["check"]), 0);
    assert_eq!(json(dir.path(), "conditions.json")["level_set_condition"], false);

    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}}}"#), &["check"]), 0);
    let c = json(dir.path(), "conditions.json");
    assert_eq!(c["level_set_condition"], true);
    assert_eq!(c["quasiconcave"], true);
    assert_eq!(c["log_concave"], true);

    let ramp = r#"{"density": {"pieces": [{"lo": 0, "hi": 1, "kind": "affine", "params": {"a": 0, "b": 2}}]}}"#;
    assert_eq!(run(dir.path(), ramp, &["check", "--seed", "9"]), 0);
    let c = json(dir.path(), "conditions.json");
    assert_eq!(c["quasiconcave"], true);
    assert_eq!(c["log_concave"], true);
}

#[test]
fn hypo_report() {
    let dir = TempDir::new().unwrap();
    let cfg = format!(r#"{{"density": {TRIANGLE}, "nu_list": [1, 10], "boxes": [[-0.5, 0.5]], "opens": [[-1, 1]]}}"#);
    assert_eq!(run(dir.path(), &cfg, &["hypo"]), 0);
    let h = json(dir.path(), "hypo.json");
    assert_eq!(h["violations"], 0);
    assert_eq!(h["records"].as_array().unwrap().len(), 4);
}

#[test]
fn counterexample_suite() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), "{}", &["counterexample"]), 0);
    let rows = csv_rows(dir.path(), "domination.csv");
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let v: Vec<f64> = r[1..].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[1] > v[0], "{r:?}");
        assert!(v[3].abs() > 0.5);
    }
    assert_eq!(json(dir.path(), "verdict.json")["trace"]["verdict"], "diverges_from_map");
    assert!(dir.path().join("out/counterexample.json").exists());

    assert_eq!(run(dir.path(), r#"{"nu_max": 1}"#, &["counterexample"]), 0);
    let rows = csv_rows(dir.path(), "domination.csv");
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1].parse::<f64>().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.17578125);
}

#[test]
fn dump_writes_reloadable_pieces() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), "{}", &["counterexample", "dump", "--max-bump", "3"]), 0);
    let spec = fs::read_to_string(dir.path().join("out/counterexample.json")).unwrap();
    let d = mapbayes_core::format::density_from_json(&spec).unwrap();
    assert_eq!(d.evaluate(&[2.125]), 0.75);
    let csv = fs::read_to_string(dir.path().join("out/counterexample.csv")).unwrap();
    assert!(csv.starts_with("theta,value\n"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let t: Vec<f64> = rows[..2].iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!((t[1] - t[0] - 1e-3).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), "not json", &["map"]), 2);
    assert_eq!(run(dir.path(), r#"{"density": 5}"#, &["map"]), 2);
    assert_eq!(run(dir.path(), r#"{"densty": {}}"#, &["map"]), 2);
    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}}}"#), &["bayes"]), 2);
    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}}}"#), &["frobnicate"]), 2);
    assert_eq!(run(dir.path(), &format!(r#"{{"density": {TRIANGLE}, "search_box": [1, -1]}}"#), &["map"]), 3);
    assert_eq!(run(dir.path(), r#"{"nu_max": 4, "max_bump": 5}"#, &["counterexample"]), 2);
}

#[test]
fn outputs_are_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let grid = r#"{"density": {"dim": 2, "origin": [0, 0], "spacing": [1, 1], "values": [[1, 0.1], [0.1, 1]], "normalize": true}, "seed": 17}"#;
    for cmd in ["sweep", "check"] {
        assert_eq!(run(a.path(), grid, &[cmd]), 0);
        assert_eq!(run(b.path(), grid, &[cmd]), 0);
    }
    for name in ["sweep.csv", "verdict.json", "conditions.json"] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}
