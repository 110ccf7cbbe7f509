//! End-to-end checks of the binary: determinism of the self-test
//! report (the final acceptance criterion), the exit-code taxonomy,
//! and the documented command examples.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_branchlink"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("branchlink-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn criterion_9_selftest_is_byte_deterministic() {
    let start = Instant::now();
    let first = run(&["selftest", "--format", "json"]);
    let second = run(&["selftest", "--format", "json"]);
    let elapsed = start.elapsed();
    assert!(first.status.success(), "{}", stdout(&first));
    assert!(second.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "self-test reports differ between runs"
    );
    assert!(
        elapsed < Duration::from_secs(30),
        "two self-test runs took {elapsed:?}"
    );
    println!(
        "acceptance criterion 9: PASS - byte-identical self-test reports in {elapsed:?} (budget 30s)"
    );
}

#[test]
fn identical_inputs_give_identical_outputs() {
    let args = ["pipeline", "--builtin", "uq", "--q", "2/3", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn exit_code_taxonomy() {
    // usage
    let out = run(&["pipeline", "--builtin", "uq"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin().args(["pipeline", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // schema
    let bad = tmp_file("bad.json", "{\"levels\": [");
    let out = run(&["graph", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(bad);

    // validation
    let graph = tmp_file(
        "graph.json",
        r#"{"levels": [["r"],["a"]], "edges": [{"child":"a","parent":"r","m":"1"}]}"#,
    );
    let link = tmp_file(
        "link.json",
        r#"{"edges": [{"child":"a","parent":"r","kappa":"1/2"}]}"#,
    );
    let out = run(&[
        "link",
        "--graph",
        graph.to_str().unwrap(),
        "--link",
        link.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let _ = std::fs::remove_file(graph);
    let _ = std::fs::remove_file(link);
}

#[test]
fn pascal_pipeline_collapses() {
    let out = run(&["pipeline", "--builtin", "pascal", "--depth", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("generators: {1}"));
    assert!(text.contains("weight group base: none"));
    assert!(text.contains("truncation levels: [1, 2, 3, 4, 5]"));
    assert!(text.contains("extension levels:  [1, 2, 3, 4, 5]"));
}

#[test]
fn uq_pipeline_detects_the_base() {
    let out = run(&["pipeline", "--builtin", "uq", "--q", "1/2", "--seeds", "(1,0)"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("weight group base: 1/2"));
}

#[test]
fn k0_embed_prints_the_example_column() {
    let out = run(&[
        "k0",
        "embed",
        "--builtin",
        "uq",
        "--q",
        "1/2",
        "--delta",
        "(1),0",
        "--window-level",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("image((1,1), 1) = 1"));
    assert!(text.contains("image((1,0), 1/2) = 1/2"));
    assert!(text.contains("image((3,0), 2) = 1/4"));
}

#[test]
fn harmonic_binomial_example_passes() {
    let out = run(&[
        "harmonic",
        "pullback",
        "--builtin",
        "pascal",
        "--top",
        "binomial:1/3",
        "--depth",
        "6",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("[pass] harmonicity"));
}

#[test]
fn emitted_artifacts_parse_back() {
    let out = run(&["graph", "--builtin", "pascal", "--depth", "3", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["graph"]["levels"].as_array().unwrap().len() == 4);
    assert!(doc["validation"]["ok"].as_bool().unwrap());
}
