use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bayesbound"));
    c.env_remove("BAYESBOUND_BACKEND");
    c
}

#[test]
fn catalog_lists_scenarios() {
    let out = bin().arg("catalog").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["qubit_rotation", "two_node_coin", "qubit_xy", "qutrit_commuting"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn run_writes_reproducible_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plan.toml");
    fs::write(
        &cfg,
        r#"
[plan]
bounds = ["direct", "bld", "bh_lambda", "bnh"]
lambdas = [-1.0, 0.0, 1.0]

[[scenario]]
catalog = "two_node_coin"

[[scenario]]
name = "biased_coin"
model = "coin"
prior = { nodes = [{ theta = [-1.0], weight = 0.25 }, { theta = [1.0], weight = 0.75 }] }
"#,
    )
    .unwrap();
    let run = |out: &str| {
        let o = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(out))
            .arg("--dump-sdp")
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read_to_string(dir.path().join(out).join("report.json")).unwrap()
    };
    let a = run("a");
    assert_eq!(a, run("b"));
    assert!(a.contains("bayesbound.report/v1"));
    // Two-point coin with W = 1: every bound equals 3/4.
    assert!(a.contains("7.5000000"));
    let csv = fs::read_to_string(dir.path().join("a/report.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("biased_coin,bnh,")));
    assert!(dir.path().join("a/sdp/two_node_coin_bnh.txt").exists());
}

#[test]
fn flags_override_config_and_sweep_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["sweep", "--scenario", "qubit_xy", "--bounds", "bld", "--axis", "lambda", "--values=-1,0,1", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("qubit_xy,")).count(), 3);
}

#[test]
fn bad_input_fails_cleanly() {
    let o = bin().args(["run", "--bounds", "nonsense", "--out", "/nonexistent/x"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown bound"));
    let o = bin().args(["run", "--backend", "mosek"]).env("BAYESBOUND_BACKEND", "x").output().unwrap();
    assert!(!o.status.success());
    let o = bin().args(["sweep", "--scenario", "qubit_xy"]).output().unwrap();
    assert!(!o.status.success());
}

#[test]
fn check_passes_on_coin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[[scenario]]\ncatalog = \"two_node_coin\"\n").unwrap();
    let o = bin().arg("check").arg("--config").arg(&cfg).output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(o.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
}
