use std::path::PathBuf;
use std::process::{Command, Output};

use fracsim_cli::experiments::{build_bank, WaveletOptions};
use fracsim_core::models::ProcessModel;

fn fracsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsim")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("fracsim-cli-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn ar1_path_has_requested_length() {
    let s = stdout(&fracsim(&[
        "simulate",
        "--process",
        "ou",
        "--zeta",
        "1",
        "--method",
        "ar1",
        "--n",
        "1024",
        "--seed",
        "7",
    ]));
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "index,value");
    assert_eq!(lines.len(), 1025);
}

#[test]
fn wavelet_path_length_and_determinism() {
    let args = [
        "simulate",
        "--process",
        "fou",
        "--d",
        "0.25",
        "--zeta",
        "1",
        "--method",
        "wavelet",
        "--J",
        "6",
        "--init",
        "cme",
        "--seed",
        "1",
    ];
    let a = stdout(&fracsim(&args));
    let model = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
    let l = build_bank(&model, 6, &WaveletOptions::default()).unwrap().filter_len();
    assert_eq!(a.lines().count() - 1, (64 - 1) + (l + 1));
    assert_eq!(a, stdout(&fracsim(&args)));
    let other = stdout(&fracsim(&[&args[..14], &["2"]].concat()));
    assert_ne!(a, other);
}

#[test]
fn filter_dump_matches_library() {
    let s =
        stdout(&fracsim(&["filters", "--process", "fou", "--d", "0.25", "--J", "3", "--scale", "2", "--which", "v"]));
    let model = ProcessModel::fou(1.0, 1.0, 0.25).unwrap();
    let bank = build_bank(&model, 3, &WaveletOptions::default()).unwrap();
    let v = &bank.scales[2].v;
    let rows: Vec<Vec<f64>> = s.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), v.len());
    for (r, &want) in rows.iter().zip(v) {
        assert_eq!(r[1], want);
    }
    assert_eq!(rows[0][0], -(bank.half() as f64));
}

#[test]
fn flag_errors_exit_with_two() {
    for args in [
        vec!["simulate", "--process", "fou", "--method", "wavelet"],
        vec!["simulate", "--process", "ou", "--method", "bogus"],
        vec!["simulate", "--process", "fou", "--d", "0.7", "--method", "cme"],
        vec!["simulate", "--process", "fou", "--d", "0.2", "--method", "ar1"],
        vec!["validate", "table9"],
    ] {
        let o = fracsim(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn numeric_failure_exits_with_three_and_names_the_error() {
    // Tail order 1.5: the continuous acvf integral has no usable tail bound.
    let o = fracsim(&["acvf", "--process", "fou", "--d", "-0.25", "--kind", "continuous", "--lags", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TailBoundUnavailable"));
}

#[test]
fn output_directory_has_manifest_and_replays() {
    let dir = scratch_dir("replay");
    let d = dir.to_str().unwrap();
    let args = ["--out", d, "--svg", "simulate", "--process", "fou", "--d", "-0.25", "--method", "cme", "--n", "300"];
    assert!(fracsim(&args).status.success());
    let first = std::fs::read_to_string(dir.join("path.csv")).unwrap();
    assert!(dir.join("plot.svg").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    let command: Vec<String> =
        manifest["command"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    std::fs::remove_file(dir.join("path.csv")).unwrap();
    let replay: Vec<&str> = command.iter().skip(1).map(String::as_str).collect();
    assert!(fracsim(&replay).status.success());
    assert_eq!(first, std::fs::read_to_string(dir.join("path.csv")).unwrap());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn validate_smoke_run_is_reproducible() {
    let args = ["--format", "json", "validate", "table4", "--replicates", "2", "--length", "128", "--seed", "4"];
    let a = stdout(&fracsim(&args));
    let report: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(report["baseline"], "iterative");
    let rows = report["rows"].as_array().unwrap();
    assert!(rows[0]["t"].is_null());
    assert!(rows[1..].iter().all(|r| r["t"].as_f64().is_some()));
    assert_eq!(a, stdout(&fracsim(&args)));
}

#[test]
fn validate_text_table_layout() {
    let s = stdout(&fracsim(&["validate", "table3", "--replicates", "2", "--no-cme", "--J", "2"]));
    let lines: Vec<&str> = s.lines().collect();
    assert!(lines[0].contains("|t| statistic"));
    assert!(lines[1].starts_with("Cholesky") && lines[1].trim_end().ends_with('-'));
    assert!(lines[2].starts_with("wavelet (CME init, J=2)"));
}

#[test]
fn gof_reads_a_simulated_path() {
    let dir = scratch_dir("gof");
    let d = dir.to_str().unwrap();
    assert!(fracsim(&["--out", d, "simulate", "--process", "fou", "--d", "0.25", "--method", "cme", "--n", "512"])
        .status
        .success());
    let p = dir.join("path.csv");
    let s = stdout(&fracsim(&["gof", "--process", "fou", "--d", "0.25", "--input", p.to_str().unwrap()]));
    let row: Vec<f64> = s.lines().nth(1).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 512.0);
    assert!(row[1].is_finite() && row[1].abs() < 6.0);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn density_and_acvf_dumps() {
    let s = stdout(&fracsim(&["density", "--process", "ou", "--kind", "velocity", "--points", "8"]));
    assert_eq!(s.lines().count(), 9);
    let s = stdout(&fracsim(&["--format", "json", "acvf", "--process", "ou", "--kind", "velocity", "--lags", "3"]));
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    let r0 = v[0]["value"].as_f64().unwrap();
    assert!((r0 - 0.5).abs() < 1e-9);
}
