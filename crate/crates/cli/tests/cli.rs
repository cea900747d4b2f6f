use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sparse-regret"));
    cmd.env("SPARSE_REGRET_THREADS", "1");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

#[test]
fn golden_configs_have_documented_exit_codes() {
    let cases = [
        ("pass_ewa_losses.json", 0),
        ("pass_sweep.json", 0),
        ("violation_uniform.json", 2),
        ("error_unknown_key.json", 1),
        ("error_unknown_sweep_key.json", 1),
        ("error_bandit_ratio.json", 1),
        ("error_direction.json", 1),
    ];
    for (file, expected) in cases {
        let path = golden(file);
        let out = run(&["run", "--config", path.to_str().unwrap()]);
        assert_eq!(
            code(&out),
            expected,
            "{file}\nstdout: {}\nstderr: {}",
            stdout(&out),
            stderr(&out)
        );
    }
}

#[test]
fn run_writes_csv_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.csv");
    let out = run(&[
        "run",
        "--algo",
        "ewa-losses",
        "--adversary",
        "random-sparse",
        "--d",
        "50",
        "--s",
        "5",
        "--T",
        "20000",
        "--reps",
        "32",
        "--seed",
        "7",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("PASS"));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("replication,stage,expected_regret,realized_regret,regime_m")
    );
    // 101 recorded stages for each of 32 replications.
    assert_eq!(lines.count(), 32 * 101);
}

#[test]
fn json_output_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = run(&[
        "run",
        "--algo",
        "adaptive-losses",
        "--adversary",
        "ramp",
        "--levels",
        "1,2,5,8",
        "--d",
        "20",
        "--s",
        "8",
        "--T",
        "400",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(value["config"]["algorithm"], "adaptive-losses");
    assert_eq!(value["replications"][0]["max_regime"], 3);
}

#[test]
fn sweep_writes_one_file_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.csv");
    let config = golden("pass_sweep.json");
    let out = run(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for (d, s) in [(10, 2), (10, 4), (30, 2), (30, 4)] {
        assert!(dir
            .path()
            .join(format!("sweep_d{d}_s{s}_T500.csv"))
            .exists());
    }
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = run(&[
        "run",
        "--algo",
        "ewa-losses",
        "--adversary",
        "random-sparse",
        "--s",
        "5",
        "--T",
        "20",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("--d"));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn config_and_flags_conflict() {
    let config = golden("pass_ewa_losses.json");
    let out = run(&["run", "--config", config.to_str().unwrap(), "--d", "5"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn bandit_ratio_precondition_is_named() {
    let out = run(&[
        "run",
        "--algo",
        "bandit-tsallis",
        "--adversary",
        "random-sparse",
        "--d",
        "8",
        "--s",
        "2",
        "--T",
        "100",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("d/s >= e^2"), "{}", stderr(&out));
}

#[test]
fn bound_violation_exits_two() {
    let out = run(&[
        "run",
        "--algo",
        "uniform",
        "--adversary",
        "first-s-gains",
        "--d",
        "10",
        "--s",
        "1",
        "--T",
        "2000",
        "--bound",
        "full-info-gains-small",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn bounds_table() {
    let out = run(&["bounds", "--d", "64", "--s", "4", "--T", "40000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("2196.2408"), "{text}");
    assert!(text.contains("12.5000"), "{text}");

    let out = run(&["bounds", "--d", "64", "--s", "4", "--T", "40000", "--json"]);
    let table: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(table["bandit_losses_lower"], 12.5);

    let out = run(&["bounds", "--d", "10", "--s", "1", "--T", "100"]);
    assert!(stdout(&out).contains("10.0000  sqrt(s T)"));

    let out = run(&["bounds", "--d", "8", "--s", "2", "--T", "100"]);
    assert!(stdout(&out).contains("undefined (requires d/s >= e^2)"));

    let out = run(&["bounds", "--d", "3", "--s", "4", "--T", "10"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_lists_presets_and_rejects_unknown_names() {
    let out = run(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bandit-lower-uniform"));
    let out = run(&["verify", "--only", "nonsense"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_runs_a_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "verify",
        "--only",
        "full-info-losses",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("all bounds hold"));
    assert!(dir.path().join("full-info-losses.json").exists());
}

#[test]
fn bad_thread_count_is_an_error() {
    let out = bin()
        .env("SPARSE_REGRET_THREADS", "zero")
        .args(["bounds", "--d", "4", "--s", "1", "--T", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["run", "--help"])), 0);
}
