//! End-to-end tests of the binary: commands, exit codes, and the
//! determinism of the machine output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    root.join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gbds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_validates_and_echoes() {
    let out = gbds(&["--system", &fixture("f1.toml"), "check", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["canonical"]["atoms"][0], "v");
}

#[test]
fn check_rejects_bad_actions() {
    let dir = std::env::temp_dir().join("gbds-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.toml");
    std::fs::write(
        &path,
        "atoms = [\"1\", \"2\"]\nletters = [\"a\"]\n[actions.a]\n1 = [\"1\"]\n2 = [\"1\"]\n",
    )
    .unwrap();
    let out = gbds(&["--system", path.to_str().unwrap(), "check"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("non-disjoint"), "stderr: {err}");
}

#[test]
fn condition_l_fixture_verdicts() {
    let out = gbds(&["--system", &fixture("f1.toml"), "condition-l", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness"]["word"], "a");

    let out = gbds(&["--system", &fixture("f2.toml"), "condition-l", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn eq_exit_codes() {
    let ok = gbds(&["--system", &fixture("f1.toml"), "eq", "e.{v}", "a.{v}|a"]);
    assert_eq!(ok.status.code(), Some(0));
    let ne = gbds(&["--system", &fixture("f2.toml"), "eq", "e.{v}", "a.{v}|a"]);
    assert_eq!(ne.status.code(), Some(1));
}

#[test]
fn mul_cross_checks() {
    let out = gbds(&[
        "--system",
        &fixture("f3.toml"),
        "mul",
        "a.{1,2}",
        "e.{1}|a",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["convolution_agrees"], true);
}

#[test]
fn parse_error_exit_code() {
    let out = gbds(&["--system", &fixture("f4.toml"), "eq", "a.{1,2}|b", "e.{1}"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_error_exit_code() {
    // normalize-diag rejects a non-diagonal element
    let out = gbds(&["--system", &fixture("f1.toml"), "normalize-diag", "a.{v}"]);
    assert_eq!(out.status.code(), Some(2));
    // missing --system
    let out = gbds(&["condition-l"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn effective_consistency() {
    for f in ["f1.toml", "f2.toml", "f3.toml", "f4.toml"] {
        let out = gbds(&["--system", &fixture(f), "effective", "--json"]);
        assert!(out.status.success(), "{f}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["consistent"], true, "{f}");
    }
}

#[test]
fn boundary_f4_exact() {
    let out = gbds(&[
        "--system",
        &fixture("f4.toml"),
        "boundary",
        "--depth",
        "3",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["finite"].as_array().unwrap().len(), 3);
    assert_eq!(v["prefixes"].as_array().unwrap().len(), 0);
    assert_eq!(v["periodic"].as_array().unwrap().len(), 0);
}

#[test]
fn iso_interior_verdicts() {
    let yes = gbds(&[
        "--system",
        &fixture("f1.toml"),
        "iso-interior",
        "a",
        "a.{v}",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&yes)).unwrap();
    assert_eq!(v["in_isotropy_interior"], true);

    let no = gbds(&[
        "--system",
        &fixture("f2.toml"),
        "iso-interior",
        "a",
        "a.{v}",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&no)).unwrap();
    assert_eq!(v["in_isotropy_interior"], false);
}

#[test]
fn analysis_json_is_byte_stable() {
    for cmd in [
        &["effective"][..],
        &["graph"][..],
        &["boundary", "--depth", "3"][..],
    ] {
        let mut args = vec![
            "--system",
            &*Box::leak(fixture("f3.toml").into_boxed_str()),
            "--json",
        ];
        args.extend_from_slice(cmd);
        let a = gbds(&args);
        let b = gbds(&args);
        assert!(a.status.success());
        assert_eq!(stdout(&a), stdout(&b));
    }
}

#[test]
fn corpus_is_deterministic() {
    let a = gbds(&["corpus", "--seed", "7", "--count", "3", "--json"]);
    let b = gbds(&["corpus", "--seed", "7", "--count", "3", "--json"]);
    assert!(a.status.success());
    assert_eq!(
        stdout(&a),
        stdout(&b),
        "same seed must give identical bytes"
    );
    let c = gbds(&["corpus", "--seed", "8", "--count", "3", "--json"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn core_membership_verdicts() {
    let out = gbds(&[
        "--system",
        &fixture("f1.toml"),
        "core",
        "a.{v} + e.{v}|a",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for g in v["generators"].as_array().unwrap() {
        assert_eq!(g["in_core"], true);
    }
    let out = gbds(&["--system", &fixture("f2.toml"), "core", "a.{v}", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["generators"][0]["in_core"], false);
}

#[test]
fn cycles_reporting() {
    let out = gbds(&[
        "--system",
        &fixture("f3.toml"),
        "cycles",
        "--max-len",
        "2",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let cycles = v["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 1);
    assert_eq!(cycles[0]["word"], "aa");
    assert_eq!(cycles[0]["has_no_exit_cycle"], true);
}
