//! Pipeline regression: charpolys -> group -> search on a committed input
//! reproduces the committed outputs byte for byte, DOT reports parse back
//! losslessly, and malformed input is diagnosed with its line number.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cmc_core::graph::graph6_decode;
use cmc_core::report::{parse_dot_class, ClassRecord};

fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn fixture(name: &str) -> Vec<u8> {
    fs::read(fixture_path(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmc"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn pipeline_reproduces_committed_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("trees6.g6");
    fs::write(&input, fixture("trees6.g6")).unwrap();
    let input = input.to_str().unwrap().to_string();

    // Each stage under its default output naming.
    let out = run(&["charpolys", &input]);
    assert!(out.status.success());
    let sidecar = format!("{input}.charpoly.g6");
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), sidecar);
    assert_eq!(fs::read(&sidecar).unwrap(), fixture("trees6.charpoly.g6"));

    let out = run(&["group", &sidecar]);
    assert!(out.status.success());
    let sorted = format!("{sidecar}.sorted");
    assert_eq!(fs::read(&sorted).unwrap(), fixture("trees6.sorted"));

    let out = run(&["search", &sorted, "2"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("pairs: 16"), "{stdout}");
    let classes = format!("{sorted}.classes");
    assert_eq!(
        fs::read(format!("{classes}/classes.jsonl")).unwrap(),
        fixture("trees6.classes.jsonl")
    );
    assert_eq!(
        fs::read(format!("{classes}/summary.json")).unwrap(),
        fixture("trees6.summary.json")
    );
}

#[test]
fn dot_reports_parse_back_losslessly() {
    let dir = tempfile::tempdir().unwrap();
    let sorted = dir.path().join("trees6.sorted");
    fs::write(&sorted, fixture("trees6.sorted")).unwrap();
    let classes_dir = dir.path().join("classes");
    let out = run(&[
        "search",
        sorted.to_str().unwrap(),
        "2",
        "--out-dir",
        classes_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let jsonl = fs::read_to_string(classes_dir.join("classes.jsonl")).unwrap();
    let mut checked = 0;
    for line in jsonl.lines() {
        let record: ClassRecord = serde_json::from_str(line).unwrap();
        let dot =
            fs::read_to_string(classes_dir.join(format!("class_{:05}.dot", record.class))).unwrap();
        let members = parse_dot_class(&dot).unwrap();
        assert_eq!(members.len(), record.members.len());
        for (member, want) in members.iter().zip(&record.members) {
            assert_eq!(member.graph, graph6_decode(&want.g6).unwrap());
            let mut selection: Vec<(usize, u32)> = want
                .selection
                .iter()
                .copied()
                .zip(record.signature.iter().copied())
                .collect();
            selection.sort_unstable();
            assert_eq!(member.selection, selection, "class {}", record.class);
        }
        checked += 1;
    }
    assert_eq!(checked, 16);
}

#[test]
fn malformed_input_is_diagnosed_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.g6");
    fs::write(&input, "A_\n~zz\n").unwrap();
    let out = run(&["charpolys", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "{stderr}");
}
