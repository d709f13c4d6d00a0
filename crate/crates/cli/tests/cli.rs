use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nsi_core::sweep::{parse_config, ParsedConfig};
use serde_json::Value;

fn nsiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsiq"))
        .args(args)
        .env_remove("NSI_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn presets_print_parseable_configs() {
    for (preset, points) in [("fig4b", 241), ("fig5b", 200), ("fig6", 201)] {
        let out = nsiq(&["sweep", "--preset", preset, "--print-config"]);
        let text = String::from_utf8(out.stdout.clone()).unwrap();
        assert_eq!(stdout_json(&out)["points"], points);
        let ParsedConfig::Sweep(spec) = parse_config(&text).unwrap() else {
            panic!("{preset} is not a sweep");
        };
        assert_eq!(spec.points, points);
    }
    assert_eq!(
        nsiq(&["sweep", "--preset", "fig9", "--print-config"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"kind": "coupling", "start_khz": 10, "stop_khz": 600, "points": 3}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(nsiq(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap()])
        .status
        .success());
    let single = Command::new(env!("CARGO_BIN_EXE_nsiq"))
        .args(["sweep", "--config", &cfg, "--out", b.to_str().unwrap()])
        .env("NSI_THREADS", "1")
        .status()
        .unwrap();
    assert!(single.success());

    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("param_khz,omega_eff_numeric_khz,"));
    let meta: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["kind"], "coupling");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    for (name, body) in [
        (
            "points.json",
            r#"{"kind": "detuning", "start_khz": -1, "stop_khz": 1, "points": 1}"#,
        ),
        (
            "eps.json",
            r#"{"kind": "detuning", "start_khz": -1, "stop_khz": 1, "points": 3, "epsilon_khz": -5}"#,
        ),
        (
            "unknown.json",
            r#"{"kind": "detuning", "start_khz": -1, "stop_khz": 1, "points": 3, "omega_khz": 5}"#,
        ),
        ("garbage.json", "{kind: detuning"),
    ] {
        let cfg = write(dir.path(), name, body);
        let result = nsiq(&["sweep", "--config", &cfg, "--out", out]);
        assert_eq!(result.status.code(), Some(2), "{name}");
        assert!(!result.stderr.is_empty());
    }
    let stderr = String::from_utf8(
        nsiq(&[
            "sweep",
            "--config",
            &dir.path().join("unknown.json").to_string_lossy(),
            "--out",
            out,
        ])
        .stderr,
    )
    .unwrap();
    assert!(stderr.contains("omega_khz"), "{stderr}");

    let evolve = write(dir.path(), "evolve.json", r#"{"t_max_us": 10}"#);
    assert_eq!(
        nsiq(&["sweep", "--config", &evolve, "--out", out]).status.code(),
        Some(2)
    );
}

#[test]
fn unwritable_destination_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.json", r#"{"t_max_us": 10, "points": 3}"#);
    let missing = dir.path().join("no/such/dir.csv");
    assert_eq!(
        nsiq(&["evolve", "--config", &cfg, "--out", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn evolve_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.json",
        r#"{"t_max_us": 20, "points": 5, "omega_a_khz": 300, "omega_b_khz": 300}"#,
    );
    let out = dir.path().join("trace.csv");
    assert!(
        nsiq(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()])
            .status
            .success()
    );
    let text = fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "time_us,p_up0_prob,p_down0_prob,p_up2_prob,p_down2_prob,aux_total_prob"
    );
    assert_eq!(lines.len(), 6);
    assert!(lines[2].starts_with("5.0,"));
    for line in &lines[1..] {
        let p: Vec<f64> = line
            .split(',')
            .skip(1)
            .take(4)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn protocol_reports_three_steps() {
    let report = stdout_json(&nsiq(&["protocol", "--theta-rad", "3.141592653589793"]));
    let steps = report["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    let last = &steps[2]["state"];
    assert!((last["down2"]["prob"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(last["shelf_a0"]["prob"].as_f64().unwrap() < 1e-12);
    assert!(report.get("simulated").is_none());

    let negative = stdout_json(&nsiq(&["protocol", "--theta-rad", "-1.5"]));
    assert_eq!(negative["theta_rad"], -1.5);
}

#[test]
fn protocol_simulation_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "p.json", r#"{"theta_rad": 1.0, "simulate": true}"#);
    let report = stdout_json(&nsiq(&["protocol", "--config", &cfg]));
    let sim = &report["simulated"];
    assert!(sim["leakage"].as_f64().unwrap() < 0.03);
    assert!(sim["phase_corrected_fidelity"].as_f64().unwrap() > 0.97);
    assert!(sim["inversion_duration_us"].as_f64().unwrap() > 0.0);
}

#[test]
fn spectrum_of_headline_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"kind": "detuning", "start_khz": -600, "stop_khz": 600, "points": 3}"#,
    );
    let report = stdout_json(&nsiq(&["spectrum", "--config", &cfg]));
    let lowest = report["lowest_transition_khz"].as_f64().unwrap();
    assert!((lowest - 2.2375).abs() < 1e-3, "{lowest}");
    assert!((report["adiabatic"]["omega_eff_khz"].as_f64().unwrap().abs() - 2.25).abs() < 1e-9);
    assert_eq!(report["eigenvalues_khz"].as_array().unwrap().len(), 4);

    let gap = write(dir.path(), "gap.json", r#"{"t_max_us": 1, "delta_khz": 50}"#);
    let report = stdout_json(&nsiq(&["spectrum", "--config", &gap]));
    assert!(report["transitions_khz"]["unavailable"].is_string());
}

#[test]
fn documented_examples_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        assert!(parse_config(&text).is_ok(), "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 5);
}
