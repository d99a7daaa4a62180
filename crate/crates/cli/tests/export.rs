use std::fs;
use std::process::Command;

use dqcluster_cli::export::STATS_HEADER;
use dqcluster_cli::{presets, run_and_export, Manifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dqcluster"))
}

#[test]
fn bundle_layout_and_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let s = presets::preset("3r_hover_roll").unwrap();
    let m = run_and_export(&s, 2, 1, 1, dir.path()).unwrap();
    assert_eq!(m.samples, 180_001);
    assert_eq!(m.runs_succeeded, 2);

    let text = fs::read_to_string(dir.path().join("stats/roll_error.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(STATS_HEADER));
    assert_eq!(lines.clone().count(), 180_001);
    assert!(lines.next().unwrap().starts_with("0.000000,"));
    assert!(text.lines().last().unwrap().starts_with("180.000000,"));

    let run = fs::read_to_string(dir.path().join("runs/run_1.csv")).unwrap();
    assert!(run.starts_with("time,roll_error,pitch_error,yaw_error"));
    assert_eq!(run.lines().count(), 180_002);

    let back: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(back, m);
    assert!(dir.path().join("scenario.toml").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut s = presets::preset("2r_obstacle").unwrap();
    s.duration = 5.0;
    run_and_export(&s, 3, 7, 1, a.path()).unwrap();
    run_and_export(&s, 3, 7, 1, b.path()).unwrap();
    for f in [
        "manifest.json",
        "scenario.toml",
        "stats/azimuth_error.csv",
        "stats/lyapunov.csv",
        "runs/run_7.csv",
    ] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn too_few_runs_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let s = presets::preset("2r_hover_shrink").unwrap();
    assert!(run_and_export(&s, 0, 1, 0, dir.path()).is_err());
    assert!(run_and_export(&s, 1, 1, 0, dir.path()).is_err());
}

#[test]
fn binary_runs_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let text = presets::preset_text("2r_hover_shrink")
        .unwrap()
        .replace("duration = 180.0", "duration = 2.0");
    let path = dir.path().join("short.toml");
    fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args([
            "run",
            path.to_str().unwrap(),
            "--runs",
            "2",
            "--controller",
            "fixed",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let m: Manifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m.samples, 2001);
    assert!(fs::read_to_string(out.join("scenario.toml"))
        .unwrap()
        .contains("controller = \"fixed\""));
}

#[test]
fn binary_reports_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "schema_version = 1\nname = \"x\"\n").unwrap();
    let out = bin()
        .args(["run", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("missing required fields") && err.contains("duration"),
        "{err}"
    );

    let out = bin().args(["run", "no_such_preset"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn binary_lists_and_shows_presets() {
    let out = bin().args(["presets", "list"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 8);
    let out = bin()
        .args(["presets", "show", "3r_maneuver_yaw"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        dqcluster_cli::parse_scenario(&text).unwrap(),
        presets::preset("3r_maneuver_yaw").unwrap()
    );
}

#[test]
fn printed_law_audit_fails_verification() {
    let out = bin().args(["verify", "--printed-law"]).output().unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[FAIL] AC2"), "{text}");
}
