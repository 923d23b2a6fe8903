//! End-to-end runs of the `twistbench` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn twistbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistbench")).args(args).output().expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Writes `contents` to a fresh file in the system temp directory.
fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twistbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn script(name: &str) -> String {
    format!("{}/../core/scripts/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn every_fixture_verifies() {
    for name in ["genus2_pencil", "genus3_pencil", "genus9_signature_zero", "genus9_with_pushes"] {
        let o = twistbench(&["verify", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).contains("invariants match"), "{name}");
    }
}

#[test]
fn json_output_parses() {
    let o = twistbench(&["invariants", "genus9_signature_zero", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["euler"], 16);
    assert_eq!(v["report"]["sigma_meyer"], 0);
    assert_eq!(v["consistent"], true);

    let o = twistbench(&["verify", "--json", "genus3_pencil"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);

    let o = twistbench(&["spin", "genus9_signature_zero", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "spin");

    let o = twistbench(&["divisibility", "genus9_with_pushes", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["d"], 1);
}

#[test]
fn spin_modes() {
    let o = twistbench(&["spin", "genus3_pencil"]);
    assert!(stdout(&o).starts_with("spin:"), "{}", stdout(&o));
    let o = twistbench(&["spin", "genus3_pencil", "--pencil", "--doubled"]);
    assert_eq!(o.status.code(), Some(2));
    let e1 = temp_file(
        "e1.json",
        &twistbench::codec::encode_factorization(&twistbench::relations::even_chain(1).capped().unwrap()).unwrap(),
    );
    let e1 = e1.to_str().unwrap();
    let o = twistbench(&["spin", e1, "--dual-parity", "odd"]);
    assert!(stdout(&o).starts_with("not spin:"), "{}", stdout(&o));
    let o = twistbench(&["spin", e1, "--doubled"]);
    assert!(stdout(&o).starts_with("spin:"), "{}", stdout(&o));
    let o = twistbench(&["spin", e1]);
    assert!(stdout(&o).starts_with("inconclusive:"), "{}", stdout(&o));
}

#[test]
fn check_failures_exit_with_one() {
    let not_trivial = temp_file(
        "not_trivial.json",
        r#"{"surface":{"g":1,"b":0,"k":0},"terms":[{"kind":"dehn","class":[1,0],"sign":1}]}"#,
    );
    let o = twistbench(&["verify", not_trivial.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not homologically trivial"));

    let o = twistbench(&["divisibility", "genus3_pencil"]);
    assert_eq!(o.status.code(), Some(1));

    // A ledger that contradicts Meyer's signature.
    let mut text =
        twistbench::codec::encode_factorization(&twistbench::relations::even_chain(1).capped().unwrap()).unwrap();
    text.truncate(text.trim_end().len() - 1);
    text += ",\n  \"ledger\": [{\"kind\":\"lantern\",\"count\":1}]\n}\n";
    let inconsistent = temp_file("inconsistent.json", &text);
    let o = twistbench(&["invariants", inconsistent.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(twistbench(&[]).status.code(), Some(2));
    assert_eq!(twistbench(&["verify", "no_such_fixture"]).status.code(), Some(2));
    let malformed = temp_file("malformed.json", "{\"surface\":");
    let o = twistbench(&["verify", malformed.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let bad_script = temp_file("bad.tb", "surface g=1\ncurve C = [1,\n");
    let o = twistbench(&["run", bad_script.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));
}

#[test]
fn scripts_run() {
    let o = twistbench(&["run", &script("genus9_verify.tb")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = twistbench(&["run", "--json", &script("genus3_rearrangement.tb")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.last().unwrap()["emit"], "spin");
    assert_eq!(entries.last().unwrap()["verdict"]["status"], "spin");

    let failing = temp_file("failing.tb", "surface g=1\nword W = t(a1)\nhurwitz W 1 left\n");
    let o = twistbench(&["run", failing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(":3:"), "{}", stderr(&o));
}
