//! End-to-end runs of the binary on the shipped specs.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn asailab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asailab"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("run asailab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_egal_on_sigma1() {
    let o = asailab(&["check-egal", "--spec", "specs/sigma1.json"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("equal: true"), "{s}");
    assert!(s.contains("L_W  = 1/((1 - q^-1*X)(1 + X))"), "{s}");
    assert!(s.contains("L_As = 1/((1 - q^-1*X)(1 + X))"), "{s}");
}

#[test]
fn las_on_pi11() {
    let o = asailab(&["las", "--spec", "specs/pi11.json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("L_As = 1/((1 - X)^3(1 + X))"));
}

#[test]
fn classify_unramified_quartic() {
    let o = asailab(&["classify", "--spec", "specs/cyclic.json"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "[classify] L: Cyclic4\n");
}

#[test]
fn classify_all_towers_at_7() {
    let o = asailab(&["classify", "--spec", "specs/towers.json", "--json"]);
    let v: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    let classes: Vec<&str> = v.iter().map(|r| r["result"].as_str().unwrap()).collect();
    assert_eq!(classes.len(), 9);
    assert_eq!(classes.iter().filter(|c| **c == "NonGaloisDihedral8").count(), 4);
}

#[test]
fn verify_normbiquad_at_3() {
    let o = asailab(&["verify", "normbiquad", "--spec", "specs/sigma1.json"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.matches("normbiquad level 2: pass").count(), 6, "{s}");
}

#[test]
fn verify_everything_on_mixed_spec() {
    let o = asailab(&["verify", "--spec", "specs/mixed.json", "--samples", "2000"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn json_schema_and_determinism() {
    let a = asailab(&["lw", "--spec", "specs/mixed.json", "--json"]);
    let b = asailab(&["lw", "--spec", "specs/mixed.json", "--json", "--sequential"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Vec<Value> = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v.len(), 4);
    for r in &v {
        let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["command", "factors", "metadata", "object", "result"]);
        for root in r["factors"].as_array().unwrap() {
            assert!(root["zeta"].is_string() && root["qexp"].is_string());
        }
        assert!(r["metadata"]["choices"].is_array() && r["metadata"]["ambiguities"].is_array());
    }
}

#[test]
fn errors_name_the_object_and_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut f = std::fs::File::create(&path).unwrap();
    // an unramified omega is Galois-invariant, so pi(omega) is inadmissible
    write!(
        f,
        r#"{{
  "p": 3,
  "fields": [
    {{ "name": "F" }},
    {{ "name": "K", "parent": "F", "d": "u" }},
    {{ "name": "L", "parent": "K", "d": "pi" }}
  ],
  "characters": [
    {{ "name": "w", "field": "L", "kind": "unramified", "uniformizer": {{ "zeta": "1/3", "qexp": "0" }} }}
  ],
  "representations": [
    {{ "name": "bad-rep", "kind": "dihedral", "omega": "w" }}
  ]
}}"#
    )
    .unwrap();
    let o = asailab(&["lw", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("representation 'bad-rep' (line 12)"), "{err}");

    std::fs::write(&path, "{ \"p\": 3,\n  \"fields\": [ }").unwrap();
    let o = asailab(&["lw", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2"));
}

#[test]
fn spec_required_except_for_corpus() {
    assert_eq!(asailab(&["lw"]).status.code(), Some(2));
    let o = asailab(&["corpus", "--primes", "3", "--max-level", "1", "--json"]);
    assert!(o.status.success());
    let v: Vec<Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["result"]["summary"]["failed"], 0);
}
