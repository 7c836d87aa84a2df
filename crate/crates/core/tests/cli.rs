use std::fs;
use std::path::Path;
use std::process::Command;

const SMALL: &str = "\
scenario.name = tiny
scenario.initial_state = ge0
scenario.t_final = 1
scenario.samples = 11
system.n_fock = 2
system.g.2 = 0.05
system.kappa = 0.1
modulation.2.enabled = true
modulation.2.f0 = pi/2
modulation.2.delta_f = pi/2
modulation.2.omega_d = 1

sweep.drive.fields = modulation.2.omega_d
sweep.drive.values = 0 | 2
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_accelrad"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("tiny.cfg");
    fs::write(&path, SMALL).unwrap();
    path
}

#[test]
fn run_prints_every_path_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = dir.path().join("out");
    let result = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&out)
        .output()
        .unwrap();
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8(result.stdout).unwrap();
    let paths: Vec<&str> = stdout.lines().collect();
    assert_eq!(paths.len(), 3);
    for p in paths {
        assert!(Path::new(p).exists(), "{p}");
    }
    assert!(out.join("tiny_manifest.csv").exists());
}

#[test]
fn overrides_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let result = bin()
        .args(["run", "--samples", "5", "--t-final", "0.5", "--fock", "3", "--config"])
        .arg(&cfg)
        .env("ACCELRAD_OUTPUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(result.status.success());
    let csv = dir.path().join("env").join("tiny").join("tiny_000.csv");
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().last().unwrap().starts_with("5.00000000000e-1,"));
}

#[test]
fn failed_point_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, SMALL.replace("system.g.2 = 0.05", "system.g.2 = 1e200")).unwrap();
    let result = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));
    let manifest = fs::read_to_string(dir.path().join("tiny_manifest.csv")).unwrap();
    assert!(manifest.contains("FAILED"));
}

#[test]
fn other_subcommands_write_their_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    for (sub, extra, file) in [
        ("converge", vec![], "tiny_convergence.csv"),
        ("sweep-map", vec!["--omega-d1", "0,1", "--omega-d2", "1"], "tiny_map.csv"),
        ("analytics", vec!["--samples", "3"], "tiny_analytics.csv"),
    ] {
        let result = bin()
            .arg(sub)
            .args(&extra)
            .arg("--config")
            .arg(&cfg)
            .arg("--output")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(
            result.status.success(),
            "{sub}: {}",
            String::from_utf8_lossy(&result.stderr)
        );
        assert!(dir.path().join(file).exists(), "{sub}");
    }
}

#[test]
fn bad_input_is_reported() {
    let result = bin().args(["run", "--preset", "nope"]).output().unwrap();
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("unknown preset"));
    let result = bin().args(["run"]).output().unwrap();
    assert!(!result.status.success());
}
