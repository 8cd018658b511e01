use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn tractdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tractdim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn default_certificate_exits_zero() {
    let out = tractdim(&["--config", &config("dim.json"), "dim"]);
    assert_eq!(out.status.code(), Some(0));
    let cert = json(&out);
    assert_eq!(cert["verdict"], "certified");
    assert_eq!(cert["schema_version"], 1);
    assert_eq!(cert["config"]["D_auto"], true);
    assert!(cert["runtime_ms"].is_null());
    assert!(cert["t_lo"].as_f64().unwrap() > 1.0);
}

#[test]
fn timing_flag_records_runtime() {
    let out = tractdim(&["--config", &config("dim.json"), "--timing", "dim"]);
    assert!(json(&out)["runtime_ms"].is_u64());
}

#[test]
fn small_radius_is_not_certified() {
    let out = tractdim(&["--config", &config("dim_small.json"), "dim"]);
    assert_eq!(out.status.code(), Some(2));
    let cert = json(&out);
    assert_eq!(cert["verdict"], "not-certified");
    assert!(cert["reason"].as_str().unwrap().contains("P_lo(1)"));
}

#[test]
fn mode_flag_overrides_config() {
    let out = tractdim(&["--config", &config("dim_small.json"), "--mode", "tail", "dim"]);
    assert_eq!(json(&out)["mode"], "tail");
}

#[test]
fn negative_epsilon_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("dim_small.json"))
        .unwrap()
        .replace("\"epsilon\": 0.1", "\"epsilon\": -0.1");
    let path = write_config(dir.path(), "bad.json", &text);
    let out = tractdim(&["--config", &path, "dim"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
}

#[test]
fn depth_above_quarter_radius_is_a_geometry_error() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("dim_small.json"))
        .unwrap()
        .replace("\"D\": 1", "\"D\": 4");
    let path = write_config(dir.path(), "deep.json", &text);
    let out = tractdim(&["--config", &path, "lemmas"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("geometry"));
}

#[test]
fn missing_config_and_bad_flags() {
    assert_eq!(tractdim(&["dim"]).status.code(), Some(1));
    assert_eq!(tractdim(&["--config", "/nonexistent.json", "dim"]).status.code(), Some(1));
    assert_eq!(tractdim(&["--bogus"]).status.code(), Some(1));
    assert_eq!(tractdim(&["--workers", "0", "--config", &config("dim.json"), "dim"]).status.code(), Some(1));
}

#[test]
fn lemmas_pass_and_rerun_identically() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = tractdim(&["--config", &config("lemmas.json"), "--out", p.to_str().unwrap(), "lemmas"]);
        assert_eq!(out.status.code(), Some(0));
    }
    let (ra, rb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["config"]["R"], 40.0);
    for check in report["checks"].as_array().unwrap() {
        assert!(check["margin"].as_f64().unwrap() >= 0.0, "{check}");
    }
}

#[test]
fn sample_writes_two_rows_per_point() {
    let dir = TempDir::new().unwrap();
    let out = |name: &str, seed: &str| {
        let p = dir.path().join(name);
        let o = tractdim(&["--config", &config("sample.json"), "--seed", seed, "--out", p.to_str().unwrap(), "sample"]);
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(p).unwrap()
    };
    let a = out("a.csv", "42");
    assert_eq!(a, out("b.csv", "42"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "re,im,space,depth,word_rank");
    assert_eq!(lines.len(), 1 + 200_000);
    assert!(lines[1].contains(",lifted,8,"));
    assert!(lines[2].contains(",plane,8,"));
    let c = out("c.csv", "43");
    assert_ne!(a, c);

    // the share of points in the upper half of Q is a cell statistic
    let upper = |text: &str| {
        let rows: Vec<f64> = text
            .lines()
            .skip(1)
            .filter(|l| l.contains(",lifted,"))
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        rows.iter().filter(|&&im| im > 0.0).count() as f64 / rows.len() as f64
    };
    assert!((upper(&a) - upper(&c)).abs() < 0.05);
}

#[test]
fn oracles_agree_with_the_pipeline() {
    let out = tractdim(&["--config", &config("oracle_middle_thirds.json"), "oracle", "box-dim"]);
    assert_eq!(out.status.code(), Some(0));
    let slope = json(&out)["estimate"]["slope"].as_f64().unwrap();
    assert!((slope - 0.6309).abs() < 0.05);

    let out = tractdim(&["--config", &config("oracle_subsystem.json"), "oracle", "brute-pressure"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn impossible_expectation_is_an_oracle_failure() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("oracle_middle_thirds.json"))
        .unwrap()
        .replace("\"tolerance\": 0.05", "\"tolerance\": 0.05, \"expected\": [0.9, 1.0]");
    let path = write_config(dir.path(), "wrong.json", &text);
    let out = tractdim(&["--config", &path, "oracle", "box-dim"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["pass"], false);
}

#[test]
fn box_dim_reads_sampled_csv() {
    let dir = TempDir::new().unwrap();
    let cloud = dir.path().join("cloud.csv");
    let o = tractdim(&["--config", &config("sample.json"), "--out", cloud.to_str().unwrap(), "sample"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(configs().join("oracle_subsystem.json"))
        .unwrap()
        .replace(
            "{ \"kind\": \"subsystem\" }",
            &format!("{{ \"kind\": \"csv\", \"path\": {:?} }}", cloud.to_str().unwrap()),
        );
    let path = write_config(dir.path(), "csv.json", &text);
    let out = tractdim(&["--config", &path, "oracle", "box-dim"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["source"], "csv");
    assert_eq!(report["points"], 100_000);
}
