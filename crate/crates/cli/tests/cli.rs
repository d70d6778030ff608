use std::path::Path;
use std::process::{Command, Output};

fn nlkg(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlkg"))
        .args(args)
        .arg("--output")
        .arg(out)
        .output()
        .expect("spawn nlkg")
}

#[test]
fn coeffs_writes_table_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlkg(&["coeffs", "--n-max", "9"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("coeffs.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
    assert!(csv.starts_with("n,c_n,c_tilde_n,d_n"));
    assert!(dir.path().join("effective_config.toml").exists());
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        assert!(nlkg(&["data", "--points", "40"], d).status.success());
    }
    let read = |d: &Path| std::fs::read(d.join("data.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn config_errors_report_line_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[profile]\nlambda1 = 1.0\nbogus = 2\n").unwrap();
    let o = nlkg(&["--config", cfg.to_str().unwrap(), "coeffs"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("bogus"), "{err}");
}

#[test]
fn evolve_rejects_light_cone_reaching_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlkg(&["evolve", "--t-end", "700", "--radius", "600", "--modes", "256"], dir.path());
    assert!(!o.status.success());
}

#[test]
fn coefficient_suite_passes_with_full_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = nlkg(&["suite", "--suite", "coeffs"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    let s = v.to_string();
    assert!((1..=12).all(|i| s.contains(&format!("AC{i}\""))), "{s}");
}
