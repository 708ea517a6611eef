use std::path::Path;
use std::process::Command;

fn run(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_poisson-cs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn small_sweep_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("spec.json");
    let spec = r#"{
        "kind": "sweep-intensity",
        "grid": {"intensities": [1e6], "measurements": [30], "sparsities": [3], "signal_dim": 60},
        "trials": 3,
        "estimator": "penalized-jsd",
        "lambda_mode": {"mode": "fixed", "value": 1e-4}
    }"#;
    std::fs::write(&path, spec).unwrap();
    path
}

#[test]
fn sweep_writes_csv_and_manifest_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_sweep_config(dir.path());
    let cfg = config.to_str().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = run(&["sweep", "--kind", "intensity", "--config", cfg, "--seed", "5"], out);
        assert!(res.status.code() == Some(0) || res.status.code() == Some(2), "{res:?}");
    }
    let csv_a = std::fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read_to_string(b.join("sweep.csv")).unwrap());
    let mut lines = csv_a.lines();
    assert!(lines.next().unwrap().starts_with("kind,estimator,intensity"));
    assert_eq!(lines.count(), 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["spec"]["master_seed"], 5);
    assert_eq!(manifest["trials"].as_array().unwrap().len(), 3);
}

#[test]
fn image_command_reads_a_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let scene = poisson_cs::pgm::synthetic_scene(20, 20);
    let input = dir.path().join("scene.pgm");
    poisson_cs::pgm::write_pgm(&scene, &input, 255.0, 8).unwrap();
    let config = dir.path().join("image.json");
    std::fs::write(
        &config,
        r#"{"kind": "image-recon", "grid": {"intensities": [1e6]}, "image": {"crop": 16, "lambda_multipliers": [0.1, 1.0]}}"#,
    )
    .unwrap();
    let out = dir.path().join("img");
    let res = run(
        &["image", "--input", input.to_str().unwrap(), "--config", config.to_str().unwrap()],
        &out,
    );
    assert!(res.status.code() == Some(0) || res.status.code() == Some(2), "{res:?}");
    assert!(out.join("image.csv").exists());
    assert!(out.join("recon_N25_I1e6.pgm").exists());
}

#[test]
fn mismatched_config_kind_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_sweep_config(dir.path());
    let res = run(&["verify-stats", "--config", config.to_str().unwrap()], &dir.path().join("x"));
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("sweep-intensity"));
}

#[test]
fn unknown_subcommand_fails() {
    let dir = tempfile::tempdir().unwrap();
    let res = run(&["bogus"], dir.path());
    assert!(!res.status.success());
}
