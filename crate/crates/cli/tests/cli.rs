//! End-to-end checks of the `zrbr` binary.

use std::path::Path;
use std::process::{Command, Output};

fn zrbr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zrbr")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"
name = "small"
seed = 1

[params]
omega = 1.0
alpha = 0.2
beta = 1.0
gamma = 1.0
theta = 0.8

[grid]
half_length = 40.0
n_points = 512

[time]
dt = 0.001
t_final = 0.2
output_stride = 50

[initial]
kind = "gaussian"
amplitude = 0.5
width = 4.0
center = 0.0
speed = 0.0
chirp = 0.0

[acoustic]
kind = "zero"

[diagnostics]
kappa_mode = "dynamic"
"#;

#[test]
fn theta_out_of_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, SMALL.replace("theta = 0.8", "theta = 1.0")).unwrap();
    let out = zrbr(&["validate-config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("theta not in (0,1)"), "{}", stderr(&out));
}

#[test]
fn valid_config_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = zrbr(&["validate-config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn unknown_override_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = zrbr(&["validate-config", "--set", "params.nope=1", "--config", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = zrbr(&["validate-config", cfg.to_str().unwrap(), "--set", "params.nope=1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("params.nope"), "{}", stderr(&out));
}

#[test]
fn simulate_then_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = zrbr(&["simulate", "--config", cfg.to_str().unwrap(), "--out", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = dir.path().join("run");
    for f in ["config.toml", "series.csv", "identity.csv", "report.json", "snapshots/final.json"] {
        assert!(run.join(f).is_file(), "missing {f}");
    }

    let out = zrbr(&["verify-identities", "--run", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(run.join("identity_report.json").is_file());

    let out = zrbr(&["plot", "--run", "run"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(run.join("plots/M.svg").is_file());
}

#[test]
fn standing_wave_without_coupling_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = zrbr(
        &["soliton", "--set", "params.alpha=0.0", "--speed", "0", "--frequency", "1", "--set", "time.t_final=0.01", "--out", "s"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("solitary wave refused"), "{}", stderr(&out));
}
