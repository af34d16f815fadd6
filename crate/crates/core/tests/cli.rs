//! End-to-end checks of the command-line binary: exit codes, error reporting,
//! and the on-disk output layout.

use std::path::Path;
use std::process::{Command, Output};

fn maflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maflow")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn list_scenarios_prints_fixed_order() {
    let out = maflow(&["list-scenarios"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        names,
        ["cao_torus", "radial_prescribed_ricci", "krf_torus", "krf_radial_stein", "psh_gauge_check"]
    );
}

#[test]
fn run_writes_outputs_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
[model]
kind = "torus"
n = 1
resolution = 32

[forcing]
kind = "cos"
amplitude = 0.05

[run]
t_max = 2.0
tol_w = 1e-300
record_interval = 0.5
snapshot_interval = 1.0
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = maflow(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,sup_v,sup_w,trace_min,trace_max,equiv_cmin,equiv_cmax,Q_max,S_max,gradw_max,\
         lp_energy,dissipation,ricci_residual,heat_residual,dt_used,status"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 3, "expected several records, got {}", rows.len());
    for row in &rows[..rows.len() - 1] {
        assert!(row.ends_with(",running"), "non-terminal row should be running: {row}");
    }
    assert!(rows.last().unwrap().ends_with(",horizon_reached"));

    let manifest = std::fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("timeseries.csv"));
    assert!(manifest.contains("snapshot_0000.json"));
    assert!(out_dir.join("snapshot_0000.bin").exists());
}

#[test]
fn unknown_config_key_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
[modle]
kind = "torus"
n = 1
resolution = 32
"#,
    );
    let out = maflow(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("modle"), "stderr should name the bad key: {stderr}");
}

#[test]
fn degenerate_background_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    // psi = 8 cos x gives g0 = 1 - 2 cos x, which is not positive.
    let cfg = write_config(
        tmp.path(),
        r#"
[model]
kind = "torus"
n = 1
resolution = 32
psi_cos_amplitude = 8.0

[run]
t_max = 1.0
"#,
    );
    let out = maflow(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unknown_scenario_exits_two_and_lists_names() {
    let out = maflow(&["scenario", "no_such_thing"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("cao_torus"), "stderr should list valid names: {stderr}");
}

#[test]
fn failing_scenario_verdict_exits_one() {
    // The KRF torus run is healthy but its curvature has not decayed to the
    // target by the fixed horizon, so the verdict fails.
    let out = maflow(&["scenario", "krf_torus", "--grid", "32"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict FAIL"), "stdout: {stdout}");
}

#[test]
fn passing_scenario_exits_zero() {
    let out = maflow(&["scenario", "cao_torus", "--grid", "16"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict pass"), "stdout: {stdout}");
}

#[test]
fn bad_override_exits_two() {
    let out = maflow(&["scenario", "cao_torus", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(2));
}
