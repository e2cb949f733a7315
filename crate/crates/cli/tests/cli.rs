use std::path::Path;
use std::process::{Command, Output};

fn kkwave(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kkwave"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const SMALL: &str = "\
k_max = 1
jmax = 160
dr = 0.1
dt = 0.05
t_end = 8.5
width = 0.5
leaves = 2.0, 2.5
snapshot_every = 40
diag_every = 2
n_vf = 1
";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_small(dir: &Path, out: &str) -> Output {
    let cfg = write_config(dir, SMALL);
    kkwave(&["run", "--config", &cfg, "--out", out], &[])
}

#[test]
fn run_writes_artifacts_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run_small(tmp.path(), out.to_str().unwrap());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["termination"], "Completed");
    assert!(manifest["config"].as_str().unwrap().contains("jmax = 160"));
    let files = manifest["files"].as_array().unwrap();
    assert!(files.len() >= 3);
    for f in files {
        let path = out.join(f["path"].as_str().unwrap());
        assert!(path.is_file(), "{}", path.display());
        assert_eq!(f["sha256"].as_str().unwrap().len(), 64);
    }
    assert!(files.iter().any(|f| f["path"].as_str().unwrap().starts_with("snapshots/")));
    assert!(out.join("energy.csv").is_file());
    assert!(out.join("decay.csv").is_file());
}

#[test]
fn repeated_runs_give_identical_energy_files() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run_small(tmp.path(), a.to_str().unwrap())), 0);
    assert_eq!(code(&run_small(tmp.path(), b.to_str().unwrap())), 0);
    for f in ["energy.csv", "decay.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn malformed_config_names_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "k_max = 1\njmax = eighty\n");
    let out = tmp.path().join("out");
    let o = kkwave(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let o = run_small(tmp.path(), blocker.join("out").to_str().unwrap());
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("io"));
}

#[test]
fn env_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let o = kkwave(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[("KKWAVE_T_END", "2.5")]);
    assert_eq!(code(&o), 0);
    let echoed = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echoed.contains("t_end = 2.5"));
}

#[test]
fn verify_algebra_passes_and_detects_mutation() {
    let o = kkwave(&["verify", "--suite", "algebra"], &[]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with('{')).count(), 49);
    let o = kkwave(&["verify", "--suite", "algebra"], &[("KKWAVE_MUTATE_COMMUTATOR", "Ω02:Q[01]")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn verify_inequalities_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = kkwave(&["verify", "--suite", "inequalities", "--out", tmp.path().to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = std::fs::read_to_string(tmp.path().join("verify.jsonl")).unwrap();
    for line in report.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["check", "lhs", "rhs", "ratio", "c_star", "pass"] {
            assert!(v.get(key).is_some(), "{key} missing in {line}");
        }
    }
}

#[test]
fn verify_convergence_reports_second_order() {
    let o = kkwave(&["verify", "--suite", "convergence"], &[]);
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8_lossy(&o.stdout);
    let orders: Vec<f64> = stdout
        .lines()
        .filter_map(|l| l.strip_prefix("observed order "))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(orders.len(), 2);
    assert!(orders.iter().all(|p| (p - 2.0).abs() < 0.2), "{orders:?}");
}

#[test]
fn fit_appends_rows_and_needs_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let dir = out.to_str().unwrap();
    let missing = kkwave(&["fit", "--out", dir, "--quantity", "Wt_L2y"], &[]);
    assert_eq!(code(&missing), 3);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing artifacts"));

    assert_eq!(code(&run_small(tmp.path(), dir)), 0);
    for _ in 0..2 {
        let o = kkwave(&["fit", "--out", dir, "--quantity", "dW0_weighted", "--window", "2:8"], &[]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("exponent"));
    }
    let fits = std::fs::read_to_string(out.join("fits.csv")).unwrap();
    assert_eq!(fits.lines().count(), 3);
    assert!(fits.starts_with("quantity,"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&kkwave(&["launch"], &[])), 2);
    assert_eq!(code(&kkwave(&["fit", "--out", ".", "--quantity", "ZW0", "--window", "3"], &[])), 2);
    assert_eq!(code(&kkwave(&["verify", "--suite", "everything"], &[])), 2);
}

#[test]
fn unknown_quantity_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let dir = out.to_str().unwrap();
    assert_eq!(code(&run_small(tmp.path(), dir)), 0);
    let o = kkwave(&["fit", "--out", dir, "--quantity", "nope", "--window", "2:8"], &[]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("dW0_weighted"));
}

#[test]
fn ablate_writes_a_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{SMALL}epsilon = 0.05\nsnapshot_every = 0\n"));
    let out = tmp.path().join("abl");
    let o = kkwave(&["ablate", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert!(matches!(code(&o), 0 | 1), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("ablation.json")).unwrap()).unwrap();
    assert!(report["null_on"]["ratio"].is_number());
    assert!(report["off_worse"].is_boolean());
}
