use std::path::PathBuf;
use std::process::{Command, Output};

fn kvgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kvgeom")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kvgeom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn builtin_corpus_exits_zero() {
    let out = kvgeom(&["--scenario", "builtin:paper_examples"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = String::from_utf8(out.stdout).unwrap();
    assert!(v.starts_with("{\n  \"checks\": ["));
}

#[test]
fn failing_check_exits_one_with_witness() {
    let p = scratch("fail.kvs", "manifold M { dim 2 coords [x y] }\nbivector h on M { [0, x; 0] }\ncheck codazzi h\n");
    let out = kvgeom(&["--scenario", p.to_str().unwrap(), "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("C(1,2,2) = -x"), "{s}");
    assert!(s.contains("0/1 checks passed"));
}

#[test]
fn input_errors_exit_two_on_stderr() {
    let p = scratch("bad.kvs", "manifold M { dim 1 coords [x] }\nbivector h on M { [x +] }\n");
    let out = kvgeom(&["--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"));

    assert_eq!(kvgeom(&["--scenario", "builtin:nope"]).status.code(), Some(2));
    assert_eq!(kvgeom(&["--scenario", "builtin:paper_examples", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(kvgeom(&["--format", "xml"]).status.code(), Some(2));
    assert_eq!(kvgeom(&[]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--scenario", "builtin:coisotropic_conormal", "--seed", "7", "--samples", "5"];
    assert_eq!(kvgeom(&args).stdout, kvgeom(&args).stdout);
}

#[test]
fn list_corpus_and_flags() {
    let out = kvgeom(&["--list-corpus"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("paper_examples")));

    let out = kvgeom(&["--scenario", "builtin:hamiltonian_diagonal", "--no-oracle", "--fail-fast"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("oracle agrees"));
}
