use std::path::Path;
use std::process::{Command, Output};

fn obslab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obslab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("OBSLAB_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn certify_constant_field_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = obslab(&["certify", "--family", "constant"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("certify.json"));
    assert_eq!(report["pass"], true);
    assert_eq!(report["command"], "certify");
    assert_eq!(report["config"]["field"]["family"], "constant");
    assert!(report["version"].is_string());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.contains("lambda=")).count(), 2);
}

#[test]
fn cover_periodic_example_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = obslab(&["cover", "--family", "periodic", "--rho", "1", "--lambda", "160000"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("cover.json"));
    let rep = &report["result"]["reports"][0];
    assert_eq!(rep["covers"], true);
    assert_eq!(rep["budget_ok"], true);
    let entries = report["result"]["coverings"][0]["entries"].as_array().unwrap();
    assert!(entries.iter().any(|e| e["rational"]["q"].is_i64()));
}

#[test]
fn malformed_beta_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[sweep]\nbeta = 1.5\n").unwrap();
    let out = obslab(&["observe", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sweep.beta") && stderr.contains("[0,1]"), "{stderr}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[sweep]\nbogus = 1\n").unwrap();
    let out = obslab(&["observe", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "[field]\nfamily = \"constant\"\ndim = 1\nn = 64\n[sweep]\nt = [1.0]\nbeta = 0.0\n").unwrap();
    let out = obslab(
        &["observe", "--config", config.to_str().unwrap(), "--beta", "1", "--cutoff", "5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("observe.json"));
    assert_eq!(report["config"]["sweep"]["beta"], 1.0);
    let r = &report["result"]["curve"]["reports"][0];
    assert!((r["lambda_min"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn run_uses_experiment_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(&config, "[run]\nexperiment = \"construct-demo\"\nseed = 3\n").unwrap();
    let out = obslab(&["run", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("construct-demo.json").exists());
}

#[test]
fn reruns_are_byte_identical() {
    // the output directory is part of the embedded config, so both runs share it
    let dir = tempfile::tempdir().unwrap();
    let read = |file: &str| std::fs::read(dir.path().join(file)).unwrap();
    let args = ["construct-demo", "--seed", "7"];
    assert_eq!(obslab(&args, dir.path()).status.code(), Some(0));
    let first = (read("construct-demo.json"), read("construct-demo.csv"));
    assert_eq!(obslab(&args, dir.path()).status.code(), Some(0));
    assert_eq!(first.0, read("construct-demo.json"));
    assert_eq!(first.1, read("construct-demo.csv"));
    assert_eq!(obslab(&["construct-demo", "--seed", "8"], dir.path()).status.code(), Some(0));
    assert_ne!(first.0, read("construct-demo.json"));
}

#[test]
fn half_strip_certification_fails_with_check_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = obslab(
        &[
            "certify",
            "--family",
            "half-strip-comb",
            "--period",
            "256",
            "--n",
            "1024",
            "--lambda",
            "2560000",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&dir.path().join("certify.json"))["pass"], false);
}

#[test]
fn list_families_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = obslab(&["list-families"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let entries = json(&dir.path().join("list-families.json"))["result"].clone();
    let entries = entries.as_array().unwrap();
    for name in ["constant", "periodic-square", "product", "e-beta", "half-strip-comb", "custom-grid"] {
        let e = entries.iter().find(|e| e["name"] == name).unwrap_or_else(|| panic!("{name} missing"));
        assert!(!e["anchor"].as_str().unwrap().is_empty());
    }
    let grid = entries.iter().find(|e| e["name"] == "custom-grid").unwrap();
    assert!(grid["notes"].as_str().unwrap().contains("obslab-grid"));
}

#[test]
fn grid_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.grid");
    let mut bytes = b"obslab-grid dim=1 period=6.283185307179586 n=32 origin=0\n".to_vec();
    for _ in 0..32 {
        bytes.extend_from_slice(&1.0f64.to_le_bytes());
    }
    std::fs::write(&path, bytes).unwrap();
    let out = obslab(
        &[
            "observe",
            "--family",
            "grid",
            "--grid-file",
            path.to_str().unwrap(),
            "--t",
            "2",
            "--cutoff",
            "4",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("observe.json"));
    let r = &report["result"]["curve"]["reports"][0];
    assert!((r["lambda_min"].as_f64().unwrap() - 2.0).abs() < 1e-10);
}
