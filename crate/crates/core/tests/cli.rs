use std::path::Path;
use std::process::{Command, Output};

use varexp::report::from_json;

const OPENNESS: &str = r#"{
    "dim": 1,
    "exponent": {"kind": "constant", "value": 1.5},
    "weight": {"kind": "power", "center": [0.0], "exponent": -0.5},
    "family": {"dim": 1, "shrink": {"targets": [[0.0]], "side0": 2.0, "levels": 4}},
    "params": {"s_grid": [1.0, 1.2, 1.34, 1.4]}
}"#;

const CHAR: &str = r#"{
    "dim": 1,
    "exponent": {"kind": "log_decay", "base": 1.6, "amp": 0.3},
    "weight": {"kind": "power", "center": [0.0], "exponent": -0.2},
    "family": {"dim": 1, "shrink": {"targets": [[0.0]], "side0": 2.0, "levels": 3}}
}"#;

fn varexp(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_varexp"));
    cmd.args(args).env_remove("VAREXP_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("VAREXP_OUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn run_ok(command: &str, config: &str, out: &Path, format: &str) -> String {
    let o = varexp(
        &[
            command,
            "--config",
            config,
            "--out",
            out.to_str().unwrap(),
            "--format",
            format,
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let path = String::from_utf8(o.stdout).unwrap().trim().to_owned();
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn csv_output_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", OPENNESS);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = run_ok("openness", &cfg, &a, "csv");
    let second = run_ok("openness", &cfg, &b, "csv");
    assert_eq!(first, second);
    assert!(first.lines().any(|l| l.contains("inf")));
}

#[test]
fn report_command_reproduces_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", CHAR);
    let json = run_ok("char", &cfg, &tmp.path().join("first"), "json");
    let original = from_json(&json).unwrap();
    let saved = write(tmp.path(), "saved.json", &json);
    let again = run_ok("report", &saved, &tmp.path().join("second"), "json");
    let copy = from_json(&again).unwrap();
    assert_eq!(copy.summary, original.summary);
    assert_eq!(copy.verdicts, original.verdicts);
    let csv = run_ok("report", &saved, &tmp.path().join("third"), "csv");
    assert_eq!(csv.lines().count(), original.rows.len() + 1);
}

#[test]
fn out_dir_environment_variable_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", CHAR);
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    let o = varexp(
        &[
            "char",
            "--config",
            &cfg,
            "--out",
            flag_dir.to_str().unwrap(),
        ],
        Some(&env_dir),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("char.json").exists());
    assert!(!flag_dir.exists());
}

#[test]
fn failed_verdict_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{
        "dim": 1,
        "exponent": {"kind": "constant", "value": 2.0},
        "weight": {"kind": "power", "center": [0.0], "exponent": -0.3},
        "family": {"dim": 1, "shrink": {"targets": [[0.0]], "side0": 2.0, "levels": 3}},
        "params": {"r": 1.2, "c_budget": 0.5, "rh_kind": "norm"}
    }"#;
    let cfg = write(tmp.path(), "c.json", text);
    let o = varexp(
        &[
            "rh-verify",
            "--config",
            &cfg,
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED reverse_holder"));
    assert!(tmp.path().join("rh-verify.json").exists());
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", CHAR);
    let out = tmp.path().to_str().unwrap();
    let cases: [&[&str]; 4] = [
        &["no-such-command", "--config", &cfg, "--out", out],
        &["char", "--config", &cfg, "--out", out, "--format", "xml"],
        &["char", "--config", "/nonexistent/config.json", "--out", out],
        &["rh-verify", "--config", &cfg, "--out", out],
    ];
    for args in cases {
        let o = varexp(args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let bad = write(tmp.path(), "bad.json", r#"{"dim": 1, "unknown": true}"#);
    assert_eq!(
        varexp(&["char", "--config", &bad], None).status.code(),
        Some(2)
    );
}
