use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qvar")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, config: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn run_ok(command: &str, config: &str, seed: Option<&str>, out: &Path) -> Output {
    let mut args = vec![command, "--config", config, "--out", out.to_str().unwrap()];
    if let Some(s) = seed {
        args.extend(["--seed", s]);
    }
    let o = qvar(&args);
    assert!(o.status.success(), "{command} failed: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn small_configs() -> Vec<(&'static str, &'static str, Value)> {
    vec![
        (
            "qml",
            "qml.csv",
            json!({"experiment": "QML_VARIANCE", "seed": 5, "params": {
                "n_qubits": 2, "l_values": [2, 4], "shots": 200, "repetitions": 5,
                "dataset": {"source": "GAUSSIAN_IID"}}}),
        ),
        (
            "estimate",
            "estimates.csv",
            json!({"experiment": "ESTIMATOR_SWEEP", "seed": 5, "params": {
                "observable": "0.5 ZZ\n-0.3 XI", "state": "RANDOM_PURE",
                "estimators": ["SE", "LCU_SIGNED_UNBIASED", "SA_LCU"], "shots": [50, 100], "repetitions": 4, "sa_unitaries": 10}}),
        ),
        (
            "gradient",
            "gradient.csv",
            json!({"experiment": "GRAPE_CONVERGENCE", "seed": 5, "params": {
                "drift": "1 Z", "controls": ["1 X"],
                "pulses": [{"family": "GAUSSIAN", "amplitude": 0.8, "center": 1.0, "width": 0.35}],
                "observable": "1 Y", "t0": 0.0, "t_final": 2.0, "grids": [8, 16]}}),
        ),
        (
            "remainder",
            "remainder_potq.csv",
            json!({"experiment": "SUN_REMAINDER", "seed": 5, "params": {
                "n_qubits": 2, "thetas": [0.5], "l_max": 3, "n_draws": 4, "costs": ["potq"]}}),
        ),
        (
            "mlqae",
            "mlqae.csv",
            json!({"experiment": "MLQAE_SCALING", "seed": 5, "params": {
                "p": 0.3, "levels": [3, 4, 5], "shots_per_level": 5,
                "classical_queries": [50, 100, 200], "seeds": 3}}),
        ),
    ]
}

#[test]
fn every_subcommand_writes_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    for (command, table, config) in small_configs() {
        let cfg = write_config(dir.path(), &format!("{command}.json"), &config);
        let out = dir.path().join(command);
        let o = run_ok(command, &cfg, None, &out);
        let csv = std::fs::read_to_string(out.join(table)).unwrap();
        assert!(csv.lines().count() > 1, "{command}: empty table");
        let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 5);
        assert_eq!(manifest["library_version"], qvar::VERSION);
        assert!(String::from_utf8_lossy(&o.stdout).contains("manifest.json"));
    }
}

#[test]
fn same_seed_reproduces_bytes_and_cli_seed_wins() {
    let dir = tempfile::tempdir().unwrap();
    for (command, table, config) in small_configs() {
        let cfg = write_config(dir.path(), &format!("{command}.json"), &config);
        let read = |sub: &str, seed: Option<&str>| {
            let out = dir.path().join(format!("{command}_{sub}"));
            run_ok(command, &cfg, seed, &out);
            std::fs::read(out.join(table)).unwrap()
        };
        assert_eq!(read("a", None), read("b", None), "{command}");
        assert_eq!(read("c", Some("5")), read("a", None), "{command}");
        if command != "gradient" {
            assert_ne!(read("d", Some("6")), read("a", None), "{command}");
        }
    }
}

#[test]
fn bad_configs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let unknown = write_config(dir.path(), "unknown.json", &json!({"experiment": "MLQAE_SCALING", "seed": 1, "params": {"p": 0.3}, "sede": 2}));
    let nested = write_config(
        dir.path(),
        "nested.json",
        &json!({"experiment": "SUN_REMAINDER", "seed": 1, "params": {
            "n_qubits": 2, "thetas": [0.5], "l_max": 2, "n_draws": 2, "costs": ["potq"], "lambda": 1.0}}),
    );
    let mismatch = write_config(dir.path(), "mismatch.json", &small_configs()[0].2);
    let unseeded = write_config(dir.path(), "unseeded.json", &json!({"experiment": "MLQAE_SCALING", "params": {
        "p": 0.3, "levels": [3], "shots_per_level": 5, "classical_queries": [50], "seeds": 1}}));
    std::fs::write(dir.path().join("broken.json"), "{not json").unwrap();
    let broken = dir.path().join("broken.json");
    let cases = [
        ("mlqae", unknown.as_str(), "sede"),
        ("remainder", nested.as_str(), "lambda"),
        ("mlqae", mismatch.as_str(), "QML_VARIANCE"),
        ("mlqae", unseeded.as_str(), "seed"),
        ("mlqae", broken.to_str().unwrap(), "error"),
        ("mlqae", "/nonexistent/config.json", "nonexistent"),
    ];
    for (command, cfg, needle) in cases {
        let o = qvar(&[command, "--config", cfg, "--out", out]);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "{cfg}: {err}");
        assert!(err.contains(needle), "{cfg}: {err}");
    }
}

#[test]
fn numerical_guard_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "diverge.json",
        &json!({"experiment": "SUN_REMAINDER", "seed": 1, "params": {
            "n_qubits": 1, "thetas": [40.0], "l_max": 0, "n_draws": 2, "costs": ["potq"]}}),
    );
    let o = qvar(&["remainder", "--config", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
