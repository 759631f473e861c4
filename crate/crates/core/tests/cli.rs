//! End-to-end CLI checks: exit codes, artifact layout, flag handling.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hallmhd")
}

fn unique_dir(label: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hallmhd-cli-{label}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_solver_conf(dir: &Path) -> PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(
        &path,
        "schema = hallmhd-config/1\nkind = solver\nnu = 0.1\nmu = 0.1\neta = 0.01\n\
         alpha = 1.0\ns = 2.0\nn = 16\ndt = 2e-3\nt_end = 0.02\nseed = 5\n\
         initial = taylor_green\ndiag_stride = 5\n",
    )
    .unwrap();
    path
}

#[test]
fn simulate_then_decompose_and_budget() {
    let dir = unique_dir("pipeline");
    let conf = write_solver_conf(&dir);

    let status = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&conf)
        .arg("--out-dir")
        .arg(&dir)
        .args(["--threads", "2"])
        .stdout(std::process::Stdio::null())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("diagnostics.ndjson").exists());
    let checkpoint = dir.join("checkpoint.snap");
    assert!(checkpoint.exists());

    // Every diagnostics line is valid JSON with the documented keys.
    let ndjson = std::fs::read_to_string(dir.join("diagnostics.ndjson")).unwrap();
    assert!(ndjson.lines().count() >= 2);
    for line in ndjson.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["t", "energy_u", "energy_b", "shell_u", "shell_b", "budget"] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        let budget = &v["budget"];
        for key in ["closure_residual", "flux_hall", "diss_u", "diss_u_exact"] {
            assert!(budget.get(key).is_some(), "missing budget key {key}");
        }
    }

    let status = Command::new(bin())
        .args(["decompose", "--snapshot"])
        .arg(&checkpoint)
        .args(["--s", "2.0", "--out-dir"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.join("decompose.csv")).unwrap();
    assert!(csv.starts_with("q,u_energy,b_energy\n"));
    assert!(csv.lines().count() >= 3);

    let status = Command::new(bin())
        .args(["budget", "--config"])
        .arg(&conf)
        .arg("--out-dir")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.join("budget.ndjson").exists());
    let cancellations = std::fs::read_to_string(dir.join("cancellations.csv")).unwrap();
    assert!(cancellations.starts_with("t,s,transport_residual,cross_residual,exchange_residual\n"));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    // 64: unknown subcommand / usage error
    let status = Command::new(bin())
        .arg("frobnicate")
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(64));

    // 1: config errors (missing file, constraint violation)
    let status = Command::new(bin())
        .args(["simulate", "--config", "/nonexistent.conf"])
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));

    let dir = unique_dir("badalpha");
    let conf = dir.join("bad.conf");
    std::fs::write(
        &conf,
        "schema = hallmhd-config/1\nnu = 0.1\nmu = 0.1\nalpha = 0.4\ns = 2.0\n\
         n = 16\ndt = 1e-3\nt_end = 0.01\ninitial = abc\n",
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&conf)
        .arg("--out-dir")
        .arg(&dir)
        .env("HALLMHD_LOG", "error")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("alpha must be > 1/2"), "{stderr}");

    // 2: numerical fault (CFL violation)
    let conf = dir.join("cfl.conf");
    std::fs::write(
        &conf,
        "schema = hallmhd-config/1\nnu = 0.1\nmu = 0.1\nalpha = 1.0\ns = 2.0\n\
         n = 16\ndt = 5.0\nt_end = 10.0\ninitial = taylor_green\n",
    )
    .unwrap();
    let status = Command::new(bin())
        .args(["simulate", "--config"])
        .arg(&conf)
        .arg("--out-dir")
        .arg(&dir)
        .env("HALLMHD_LOG", "error")
        .stdout(std::process::Stdio::null())
        .stderr(std::process::Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seed_override_changes_random_runs() {
    let dir = unique_dir("seeds");
    let conf = dir.join("rand.conf");
    std::fs::write(
        &conf,
        "schema = hallmhd-config/1\nnu = 0.1\nmu = 0.1\nalpha = 1.0\ns = 2.0\n\
         n = 16\ndt = 2e-3\nt_end = 0.01\nseed = 1\ninitial = random_band\n",
    )
    .unwrap();
    let run = |out: &Path, seed: Option<&str>| {
        let mut cmd = Command::new(bin());
        cmd.args(["simulate", "--config"])
            .arg(&conf)
            .arg("--out-dir")
            .arg(out)
            .stdout(std::process::Stdio::null());
        if let Some(s) = seed {
            cmd.args(["--seed-override", s]);
        }
        assert!(cmd.status().unwrap().success());
        std::fs::read(out.join("diagnostics.ndjson")).unwrap()
    };
    let base = run(&dir.join("a"), None);
    let same = run(&dir.join("b"), Some("1"));
    let other = run(&dir.join("c"), Some("2"));
    assert_eq!(base, same, "seed override equal to config seed must match");
    assert_ne!(base, other, "different seed must change the run");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn probe_writes_csv_and_summary() {
    let dir = unique_dir("probe");
    let status = Command::new(bin())
        .args(["probe", "--seeds", "2", "--out-dir"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.join("probes.csv")).unwrap();
    assert!(csv.starts_with("lemma,q,p,seed,lhs,rhs,ratio\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("probe_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["n"], 32);
    assert!(summary["max_ratios"].as_array().unwrap().len() >= 4);
    std::fs::remove_dir_all(&dir).ok();
}
