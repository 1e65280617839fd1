use std::path::Path;
use std::process::{Command, Output};

fn qbm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbm")).arg("--out").arg(dir).args(args).output().unwrap()
}

fn manifest(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn undamped_moments_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbm(dir.path(), &["--quiet", "--set", "damping.gamma=0", "--set", "moments.temperatures=[1.0]", "moments"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# columns:"));
    assert!(lines.next().unwrap().starts_with("T,q2,p2"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let exact = 0.5 / (0.5f64).tanh();
    assert!((row[1] - exact).abs() < 1e-12 * exact);
    assert!((row[2] - exact).abs() < 1e-12 * exact);
    let m = manifest(dir.path(), "moments");
    assert_eq!(m["command"], "moments");
    assert_eq!(m["outputs"][0], "moments.csv");
    assert!(m["config"]["system"].is_object());
}

#[test]
fn config_file_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[damping]\nkind = \"drude\"\ngamma = 0.4\ncutoff = 10.0\n\n[partition]\ntemperatures = [0.5, 2.0]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qbm"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .args(["--quiet", "--gnuplot", "partition"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("partition.gp").exists());
    let m = manifest(dir.path(), "partition");
    assert_eq!(m["config"]["damping"]["cutoff"], 10.0);
    let rows = std::fs::read_to_string(dir.path().join("partition.csv")).unwrap().lines().count();
    assert_eq!(rows, 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = qbm(dir.path(), &["--set", "system.mass=1", "moments"]);
    assert_eq!(bad_key.status.code(), Some(2));
    assert!(!bad_key.stderr.is_empty());

    let bad_mass = qbm(dir.path(), &["--set", "system.M=-1", "moments"]);
    assert_eq!(bad_mass.status.code(), Some(2));

    // strictly ohmic friction leaves <p^2> divergent
    let divergent = qbm(dir.path(), &["--set", "damping.gamma=0.2", "moments"]);
    assert_eq!(divergent.status.code(), Some(3));

    let both = qbm(dir.path(), &["--set", "thermal.T=1", "--set", "thermal.beta=1", "moments"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn undamped_decay_crossover() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbm(dir.path(), &["--quiet", "--set", "damping.gamma=0", "decay"]);
    assert!(out.status.success());
    let t0 = manifest(dir.path(), "decay")["results"]["T0"].as_f64().unwrap();
    assert!((t0 - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn bath_export_reimports() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbm(
        dir.path(),
        &["--quiet", "--set", "damping.kind=\"drude\"", "--set", "damping.gamma=0.3", "--set", "damping.cutoff=5.0", "--set", "numeric.N=50", "--set", "numeric.grid=\"tangent\"", "bath-export"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("bath-export.csv");
    let bath = qbm::cli::config::read_bath(&csv).unwrap();
    assert_eq!(bath.len(), 50);
}

#[test]
fn validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbm(dir.path(), &["validate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let m = manifest(dir.path(), "validate");
    assert_eq!(m["results"]["failed"].as_array().unwrap().len(), 0);
}
