//! Behavior of the binary itself: exit codes, output formats, config files.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectralab")).args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("spectralab-test-{}-{name}", std::process::id()))
}

#[test]
fn exit_zero_on_pass_with_report_on_stdout() {
    let output = run(&["partition"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    for key in ["config", "rows", "fits", "flags"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["config"]["experiment"], "partition");
    // Timing goes to stderr only, keeping stdout reproducible.
    assert!(String::from_utf8_lossy(&output.stderr).contains("finished in"));
}

#[test]
fn exit_one_when_a_tolerance_fails() {
    // The growth slope is correct to ~1e-3, so an absurd tolerance must
    // flip the flag without turning into a usage error.
    let output = run(&["growth", "--tol", "1e-12"]);
    assert_eq!(output.status.code(), Some(1));
    let report = stdout_json(&output);
    assert_eq!(report["flags"]["slope-within-tol"], Value::Bool(false));
}

#[test]
fn exit_two_on_config_errors() {
    for args in [
        &["weyl", "--model", "klein"][..],
        &["weyl", "--bogus"][..],
        &["weyl", "--format", "xml"][..],
        &["growth", "--m-min", "9", "--m-max", "3"][..],
        &["besov", "--model", "sphere2"][..],
        &["poly-span", "--r", "0.5"][..],
        &["kernel-decay", "--t-list", "1,-0.5"][..],
    ] {
        let output = run(args);
        assert_eq!(output.status.code(), Some(2), "args {args:?}");
        assert!(output.stdout.is_empty(), "no report on config error: {args:?}");
    }
}

#[test]
fn csv_and_json_agree_on_row_values() {
    let json_out = run(&["band-norms", "--format", "json"]);
    let csv_out = run(&["band-norms", "--format", "csv"]);
    assert_eq!(json_out.status.code(), Some(0));
    assert_eq!(csv_out.status.code(), Some(0));

    let report = stdout_json(&json_out);
    let columns: Vec<&str> =
        report["rows"]["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    let data = report["rows"]["data"].as_array().unwrap();

    let csv_text = String::from_utf8(csv_out.stdout).unwrap();
    let mut lines = csv_text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, columns);

    let mut csv_rows = 0;
    for (line, json_row) in lines.zip(data) {
        let json_row = json_row.as_array().unwrap();
        for (field, value) in line.split(',').zip(json_row) {
            // Both renderings round-trip f64 exactly, so the parsed values
            // must be identical, not merely close.
            let from_csv: f64 = field.parse().unwrap();
            assert_eq!(from_csv, value.as_f64().unwrap(), "line {line}");
        }
        csv_rows += 1;
    }
    assert_eq!(csv_rows, data.len());
}

#[test]
fn config_file_fills_unset_flags_and_flags_win() {
    let path = temp_path("merge.cfg");
    std::fs::write(&path, "model=torus2\nm-max=10\n# comment line\n").unwrap();
    let cfg = path.to_str().unwrap();

    let from_file = stdout_json(&run(&["growth", "--config", cfg]));
    assert_eq!(from_file["config"]["model"], "torus2");
    assert_eq!(from_file["config"]["m-max"], "10");

    let overridden = stdout_json(&run(&["growth", "--config", cfg, "--model", "circle"]));
    assert_eq!(overridden["config"]["model"], "circle");
    assert_eq!(overridden["config"]["m-max"], "10");

    let bad = temp_path("bad.cfg");
    std::fs::write(&bad, "no-such-key=1\n").unwrap();
    let output = run(&["growth", "--config", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    std::fs::remove_file(&path).ok();
    std::fs::remove_file(&bad).ok();
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = temp_path("weyl.json");
    let output =
        run(&["weyl", "--omega-max", "64", "--out", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let report: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(report["config"]["experiment"], "weyl");
    std::fs::remove_file(&path).ok();
}

#[test]
fn every_experiment_passes_with_defaults() {
    // Smoke: the default configuration of each subcommand must hold its own
    // advertised tolerances. Heavier sweeps are trimmed but stay on the
    // default code path.
    let runs: &[&[&str]] = &[
        &["weyl", "--omega-max", "1024"],
        &["growth", "--m-max", "10"],
        &["partition"],
        &["kernel-decay", "--t-list", "1,0.5,0.25"],
        &["cross-section", "--t-list", "1,0.5,0.25"],
        &["young"],
        &["band-norms"],
        &["approx-rate"],
        &["besov"],
        &["nikolskii", "--omega-max", "256"],
        &["poly-span"],
    ];
    for args in runs {
        let output = run(args);
        assert_eq!(
            output.status.code(),
            Some(0),
            "args {args:?}, stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
}
