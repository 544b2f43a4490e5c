use std::fs;
use std::process::Command;

use wittjet::cli::{run, Output};

fn call(args: &[&str]) -> Output {
    run(std::iter::once("wittjet").chain(args.iter().copied()).map(std::ffi::OsString::from))
}

#[test]
fn witt_add_table_at_p2() {
    let out = call(&["witt", "polys", "--op", "add", "--p", "2", "--n", "1"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "S_0 = x_0 + y_0\nS_1 = -x_0*y_0 + x_1 + y_1\n");
}

#[test]
fn witt_point_commands() {
    assert_eq!(call(&["witt", "ghost", "--x", "1,1", "--p", "2"]).stdout.trim(), "(1, 3)");
    let sum = call(&["witt", "arith", "--op", "add", "--x", "1,0", "--y", "1,0", "--p", "2"]);
    assert_eq!(sum.stdout.trim(), "(2, -1)");
    assert_eq!(call(&["witt", "expdelta", "--r", "2", "--n", "1"]).stdout.trim(), "(2, -1)");
}

#[test]
fn jet_of_affine_line() {
    let out = call(&["jet", "--n", "1"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("vars: x, x′"), "{}", out.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["verify", "--suite", "shift", "--trials", "20"]).code, 0);
    // (0, 1) is not a ghost vector: 1 ≢ 0^2 mod 2.
    let bad = call(&["witt", "unghost", "--w", "0,1"]);
    assert_eq!(bad.code, 1, "{}", bad.stderr);
    assert_eq!(call(&["verify", "--suite", "nope"]).code, 2);
    assert_eq!(call(&["jet", "--scheme", "vars a; rel a^2+"]).code, 2);
    assert_eq!(call(&["lateral", "--bogus-flag"]).code, 2);
}

#[test]
fn json_errors_are_structured() {
    let out = call(&["witt", "unghost", "--w", "0,1", "--json"]);
    assert_eq!(out.code, 1);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).expect("json error body");
    assert!(v.get("error").is_some() && v.get("message").is_some(), "{v}");
}

#[test]
fn config_file_with_flags_winning() {
    let dir = tempfile::tempdir().unwrap();
    let kv = dir.path().join("run.conf");
    fs::write(&kv, "# ghost of the line\nscheme = ga\nn = 3\np = 3\n").unwrap();
    let from_file = call(&["jet", "--config", kv.to_str().unwrap()]);
    assert_eq!(from_file.code, 0);
    assert!(from_file.stdout.starts_with("J^3 of ga (char-zero, p=3)"), "{}", from_file.stdout);
    let overridden = call(&["jet", "--config", kv.to_str().unwrap(), "--n", "1"]);
    assert!(overridden.stdout.starts_with("J^1 of ga (char-zero, p=3)"), "{}", overridden.stdout);

    let js = dir.path().join("run.json");
    fs::write(&js, r#"{"n": 2, "p": 5}"#).unwrap();
    let out = call(&["jet", "--config", js.to_str().unwrap()]);
    assert!(out.stdout.starts_with("J^2 of ga (char-zero, p=5)"), "{}", out.stdout);

    let unknown = dir.path().join("bad.conf");
    fs::write(&unknown, "colour = blue\n").unwrap();
    assert_eq!(call(&["jet", "--config", unknown.to_str().unwrap()]).code, 2);
}

#[test]
fn cache_dir_is_populated_and_repaired() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("tables");
    let args = ["verify", "--suite", "shift", "--n", "2", "--trials", "10", "--cache-dir", cache.to_str().unwrap()];
    assert_eq!(call(&args).code, 0);
    let mut files: Vec<_> = fs::read_dir(&cache).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 8, "{files:?}");

    let victim = files.iter().find(|f| f.to_string_lossy().ends_with("n2_mul.json")).unwrap();
    let good = fs::read_to_string(victim).unwrap();
    fs::write(victim, good.replacen("x_0", "x_1", 1)).unwrap();
    assert_eq!(call(&args).code, 0);
    assert_eq!(fs::read_to_string(victim).unwrap(), good);
}

#[test]
fn binary_golden_lateral() {
    let out = Command::new(env!("CARGO_BIN_EXE_wittjet"))
        .args(["lateral", "--scheme", "ga", "--n", "2", "--p", "2", "--point", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("z′ ↦ x′^2 + 2*x″ + 36\n"), "{stdout}");
    assert!(stdout.contains("discrepancy: {z′: 36}\n"), "{stdout}");
}
