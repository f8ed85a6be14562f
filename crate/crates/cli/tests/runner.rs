use std::fs;
use std::path::Path;
use std::process::Command;

use twirlkit::form_factors::c4_plateau;
use twirlkit_cli::output::CurveTable;
use twirlkit_cli::{run, ExperimentConfig, RunRecord};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(text).unwrap()
}

fn read_record(dir: &Path, probe: &str) -> RunRecord {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{probe}.meta.json"))).unwrap()).unwrap()
}

#[test]
fn gde_form_factor_run_reaches_plateau() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"probe": "form-factors", "ensemble": {"tag": "gde"}, "d": 256, "n_spectra": 200, "seed": 5,
            "time_grid": {"kind": "log", "t_min": 0.01, "t_max": 1e5, "points": 120}}"#,
    );
    let record = run(&cfg, Some(dir.path())).unwrap();
    let tail = record.values["form-factors_c4.tail"];
    assert!(tail.within(c4_plateau(256), 3.0), "{tail:?}");
    assert_eq!(read_record(dir.path(), "form-factors").references["c4_plateau"], c4_plateau(256));
    for name in ["c2", "c4", "re_c3", "im_c3", "q"] {
        assert!(dir.path().join(format!("form-factors_{name}.csv")).exists(), "{name}");
    }
}

#[test]
fn curve_files_reproduce_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"{"probe": "tmi", "d": 64, "n_spectra": 8, "monte_carlo": true, "n_twirl_samples": 4,
            "time_grid": {"kind": "linear", "t_min": 0.0, "t_max": 5.0, "points": 6}}"#,
    );
    run(&cfg, Some(dir.path())).unwrap();
    let record = read_record(dir.path(), "tmi");
    assert_eq!(record.summaries.len(), 3);
    for (name, summary) in &record.summaries {
        let table = CurveTable::read(&dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(&table.summary(), summary, "{name}");
    }
}

#[test]
fn frame_potential_metadata_has_reference_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(r#"{"probe": "frame-potential", "d": 64, "n_spectra": 4, "time_grid": {"kind": "log", "t_min": 0.1, "t_max": 10.0, "points": 5}}"#);
    let record = run(&cfg, Some(dir.path())).unwrap();
    assert_eq!(record.references["haar"], 1.0);
    assert!((record.references["long_time"] - 3.0).abs() < 3.0 / 64.0);
}

#[test]
fn failed_runs_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config(r#"{"probe": "entanglement", "d": 8, "n_spectra": 2}"#);
    assert!(run(&cfg, Some(&out)).is_err());
    assert!(!out.exists() || fs::read_dir(&out).unwrap().count() == 0);
}

#[test]
fn asymptote_and_doping_probes() {
    let dir = tempfile::tempdir().unwrap();
    let record = run(&config(r#"{"probe": "clifford-asymptote", "n_qubits": 2}"#), Some(dir.path())).unwrap();
    assert!((record.values["clifford_exhaustive"].mean - 1.0 / 3.0).abs() < 1e-8);
    assert!((record.values["clifford_weingarten"].mean - 1.0 / 3.0).abs() < 1e-8);
    assert!((record.values["haar_weingarten"].mean - 1.0 / 35.0).abs() < 1e-9);
    let cfg = config(r#"{"probe": "doped-otoc", "n_qubits": 3, "n_twirl_samples": 50, "doping": [0, 2]}"#);
    let record = run(&cfg, Some(dir.path())).unwrap();
    let table = CurveTable::read(&dir.path().join("doped-otoc_otoc.csv")).unwrap();
    assert_eq!(table.x_label, "k");
    assert_eq!(table.x, [0.0, 2.0]);
    assert_eq!(record.summaries["doped-otoc_otoc"], table.summary());
}

fn twirlkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twirlkit"))
}

#[test]
fn cli_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("otoc.json");
    fs::write(
        &cfg_path,
        r#"{"probe": "otoc", "n_qubits": 3, "n_spectra": 6, "monte_carlo": true, "n_twirl_samples": 16,
            "time_grid": {"kind": "log", "t_min": 0.1, "t_max": 100.0, "points": 7}}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let run = twirlkit()
            .env("TWIRLKIT_THREADS", threads)
            .args(["otoc", "--config"])
            .arg(&cfg_path)
            .args(["--seed", "17", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(run.status.success());
        outputs.push(
            ["otoc_twirled.csv", "otoc_offset_reference.csv", "otoc_mc.csv"].map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
    let record = read_record(&dir.path().join("t1"), "otoc");
    assert_eq!(record.config.seed, 17);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"probe": "otoc", "d": 12}"#).unwrap();
    let code = |args: &[&str]| twirlkit().args(args).output().unwrap().status.code();
    let bad = bad.to_str().unwrap();
    assert_eq!(code(&["otoc", "--config", bad]), Some(2));
    assert_eq!(code(&["otoc", "--config", "/nonexistent/config.json"]), Some(2));
    assert_eq!(code(&["tmi", "--config", bad]), Some(2));
    assert_eq!(code(&["verify", "--level", "sideways"]), Some(2));
    let out = twirlkit().env("TWIRLKIT_THREADS", "zero").args(["template", "tmi"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = twirlkit().args(["template", "tmi"]).output().unwrap();
    assert!(ExperimentConfig::from_json(std::str::from_utf8(&out.stdout).unwrap()).is_ok());
}
