//! End-to-end checks of the binary: exit codes, output artifacts, manifest,
//! and byte-identical reproducibility.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ecd-lab")
}

fn workdir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("ecdlab_cli_{tag}"));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("lab.ini");
    std::fs::write(&p, body).unwrap();
    p
}

const BASE_CONFIG: &str = "\
[potential]
kind = quartic
a = 1.0
omega = 2.0
v0 = 1.0

[classical]
lambda_c = 0.0
e = 1.0
u0 = +1
n_traj = 200
seed = 42
max_s = 1e6
";

#[test]
fn analytic_collapses_to_t_det_at_zero_rate() {
    let dir = workdir("analytic");
    let cfg = write_config(&dir, BASE_CONFIG);
    let out = dir.join("out");
    let status = Command::new(bin())
        .args(["analytic-secd", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("analytic.json")).unwrap()).unwrap();
    let total = report["breakdown"]["total"].as_f64().unwrap();
    let t_det = report["breakdown"]["t_det"].as_f64().unwrap();
    assert!(
        (total - t_det).abs() < 1e-12,
        "total {total} vs t_det {t_det}"
    );
    // manifest names the config hash and the outputs
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "analytic.json"));
}

#[test]
fn repeated_runs_byte_identical() {
    let dir = workdir("repro");
    let mut body = BASE_CONFIG.replace("lambda_c = 0.0", "lambda_c = 1.0");
    body.push_str("\n[output]\ndir = unused\n");
    let cfg = write_config(&dir, &body);
    for (tag, threads) in [("a", "1"), ("b", "4")] {
        let status = Command::new(bin())
            .args(["simulate-secd", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(tag))
            .args(["--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(dir.join("a/trajectories.csv")).unwrap();
    let b = std::fs::read(dir.join("b/trajectories.csv")).unwrap();
    assert_eq!(a, b, "trajectory CSV differs across thread counts");
    // exact column contract
    let header =
        String::from_utf8(a[..a.iter().position(|&c| c == b'\n').unwrap()].to_vec()).unwrap();
    assert_eq!(header, "traj_id,seed,hit,t_real,s_elapsed,n_flips");
}

#[test]
fn bad_config_exits_one() {
    let dir = workdir("bad");
    let cfg = write_config(&dir, "[classical]\nlambda_c = -2\n");
    let output = Command::new(bin())
        .args(["validate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("nonnegative"), "{err}");
}

#[test]
fn sweep_header_contract() {
    let dir = workdir("sweep");
    let body = "\
[potential]
kind = quartic

[classical]
lambda_c = 2.0
seed = 11

[sweep]
max_pow2 = 2
n_traj = 50
quantum_max_beta = 0
";
    let cfg = write_config(&dir, body);
    let out = dir.join("out");
    let status = Command::new(bin())
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("sweep.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "beta,v0,regime,Tc_analytic,Tc_mc_mean,Tc_mc_se,Tq_bound,Tq_measured,Tsgd_form,Tqtw_form"
    );
    assert_eq!(csv.lines().count(), 1 + 3); // header + beta in {1,2,4}
    assert!(out.join("exponents.json").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = workdir("seedflag");
    let body = BASE_CONFIG.replace("lambda_c = 0.0", "lambda_c = 1.0");
    let cfg = write_config(&dir, &body);
    for (tag, seed) in [("s1", "7"), ("s2", "7"), ("s3", "8")] {
        let status = Command::new(bin())
            .args(["simulate-secd", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.join(tag))
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let s1 = std::fs::read(dir.join("s1/trajectories.csv")).unwrap();
    let s2 = std::fs::read(dir.join("s2/trajectories.csv")).unwrap();
    let s3 = std::fs::read(dir.join("s3/trajectories.csv")).unwrap();
    assert_eq!(s1, s2);
    assert_ne!(s1, s3);
}
