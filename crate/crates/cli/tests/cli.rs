use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rulenet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rulenet")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn generate_then_export_dot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rulenet(&["generate", "random", "net.toml", "--facts", "6", "--rules", "5", "--seed", "3"], d));
    ok(&rulenet(&["export-dot", "net.toml", "net.dot"], d));
    let dot = fs::read_to_string(d.join("net.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("shape=box").count(), 5);
    assert_eq!(dot.matches("shape=ellipse").count(), 6);
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.toml", "b.toml"] {
        ok(&rulenet(
            &["generate", "layered", name, "--depth", "3", "--width", "4", "--seed", "9", "--random-values"],
            d,
        ));
    }
    assert_eq!(fs::read(d.join("a.toml")).unwrap(), fs::read(d.join("b.toml")).unwrap());
}

#[test]
fn annotate_export_edit_apply() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&rulenet(&["generate", "fully-connected", "net.toml", "--facts", "4"], d));
    ok(&rulenet(&["annotate", "export", "net.toml", "notes.toml"], d));

    // Unedited apply leaves the network unchanged.
    ok(&rulenet(&["annotate", "apply", "notes.toml", "same.toml"], d));
    assert_eq!(fs::read_to_string(d.join("net.toml")).unwrap(), fs::read_to_string(d.join("same.toml")).unwrap());

    let text = fs::read_to_string(d.join("notes.toml")).unwrap();
    let edited =
        text.replacen("[[rule]]\nid = 0\n", "[[rule]]\nid = 0\nlabel = \"first\"\ndisposition = \"remove\"\n", 1);
    assert_ne!(edited, text);
    fs::write(d.join("notes.toml"), edited).unwrap();
    ok(&rulenet(&["annotate", "apply", "notes.toml", "pruned.toml"], d));
    let before = fs::read_to_string(d.join("net.toml")).unwrap().matches("[[rule]]").count();
    let after = fs::read_to_string(d.join("pruned.toml")).unwrap().matches("[[rule]]").count();
    assert_eq!(after + 1, before);
}

#[test]
fn run_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("suite.toml"),
        "name = \"s\"\n[[condition]]\nname = \"p\"\n\
         topology = { kind = \"perfect\", n_facts = 6, n_rules = 6 }\niterations = 30\nepochs = 10\nseed = 1\n",
    )
    .unwrap();
    let stdout = ok(&rulenet(&["run", "suite.toml", "--workers", "2"], d));
    assert!(stdout.starts_with("condition"));
    assert!(d.join("results/summary.csv").exists());

    let report = ok(&rulenet(&["report", "results/records/p.csv", "--threshold", "0.10"], d));
    let table = fs::read_to_string(d.join("results/summary.txt")).unwrap();
    assert_eq!(report, table);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = rulenet(&["export-dot", "missing.toml", "x.dot"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.toml"));

    fs::write(d.join("bad.toml"), "name = \"s\"\n").unwrap();
    let out = rulenet(&["run", "bad.toml"], d);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no conditions"));

    let out = rulenet(&["report", "r.csv", "--threshold", "3"], d);
    assert!(!out.status.success());
}
