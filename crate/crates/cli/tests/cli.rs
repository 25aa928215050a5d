//! Exit codes and output files of the `cauchy` binary.

use std::process::Command;

fn cauchy() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cauchy"))
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cauchy().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(cauchy().arg("--version").output().unwrap().status.code(), Some(0));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(cauchy().arg("bogus").output().unwrap().status.code(), Some(1));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"mass": -1.0}"#).unwrap();
    let out = cauchy().args(["verify-identities", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    std::fs::write(&cfg, r#"{"no_such_key": 1}"#).unwrap();
    let out = cauchy().args(["verify-identities", "--config"]).arg(&cfg).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn passing_run_writes_tables_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = cauchy().args(["verify-identities", "--seed", "3", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["verify-identities.csv", "verify-identities_series.csv", "verify-identities_config.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let written = dir.path().join("verify-identities_config.json");
    let again = cauchy().args(["verify-identities", "--config"]).arg(&written).arg("--out").arg(dir.path().join("b")).output().unwrap();
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn failing_checks_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = cauchy().args(["flow", "--quick", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}
