//! End-to-end checks of the command-line interface: exit codes, JSON shape,
//! file plumbing, and reproducibility across seeds and worker counts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_catalytic-lab"))
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("the binary should start")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stdout);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("bad JSON ({e}): {text}"))
}

#[test]
fn partition_measure_of_parity_matches_the_closed_form() {
    let out = run_cli(&["measures", "--set", "parity", "--m", "4", "--measure", "partition"]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["value"], 8);
    assert_eq!(json["m"], 4);
}

#[test]
fn covering_radius_of_the_perfect_code_is_one() {
    let out = run_cli(&["codes", "--code", "hamming:7", "--op", "covering-radius"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["value"], 1);
}

#[test]
fn encode_and_decode_round_trip_through_the_cli() {
    let out = run_cli(&["codes", "--code", "exthamming:8", "--op", "encode:1010"]);
    assert!(out.status.success());
    let codeword = stdout_json(&out)["value"].as_str().unwrap().to_string();
    let out = run_cli(&["codes", "--code", "exthamming:8", "--op", &format!("decode:{codeword}")]);
    assert!(out.status.success());
    let json = stdout_json(&out);
    assert_eq!(json["decoded"], true);
    assert_eq!(json["message"], "1010");
    assert!(json["errors"].as_array().unwrap().is_empty());
}

#[test]
fn verifying_an_honest_engine_exits_zero() {
    let out = run_cli(&[
        "verify",
        "--engine",
        "tally",
        "--inner",
        "accept-all",
        "--c",
        "4",
        "--set",
        "tally",
        "--mode",
        "exhaustive",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["overall_pass"], true);
    assert_eq!(json["cases_run"], 16);
}

#[test]
fn verifying_the_tape_eraser_exits_one_with_a_witness() {
    let out = run_cli(&[
        "verify", "--engine", "eraser", "--c", "4", "--set", "all", "--mode", "exhaustive",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json = stdout_json(&out);
    assert_eq!(json["overall_pass"], false);
    assert!(json["failures"].as_array().unwrap().iter().any(|f| f["kind"]
        == "restoration_mismatch"));
}

#[test]
fn a_bad_descriptor_is_a_usage_error() {
    let out = run_cli(&["verify", "--engine", "warp-drive", "--c", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warp-drive"));
}

#[test]
fn reports_written_to_disk_re_render_with_the_same_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run_cli(&[
        "disjoint",
        "--engine",
        "parity-restorer:even",
        "--c",
        "6",
        "--set",
        "parity",
        "--input",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let saved = std::fs::read_to_string(&path).unwrap();
    assert!(saved.contains("\"overall_pass\": true"));

    let out = run_cli(&["report", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["overall_pass"], true);
}

#[test]
fn failed_reports_re_render_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run_cli(&[
        "verify", "--engine", "eraser", "--c", "3", "--set", "all", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run_cli(&["report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seeded_sampling_is_byte_identical_across_runs_and_job_counts() {
    let args = |jobs: &'static str| {
        vec![
            "--jobs",
            jobs,
            "verify",
            "--engine",
            "extra-symbol:p=2",
            "--inner",
            "parity-mark",
            "--mode",
            "sample:60",
            "--seed",
            "1234",
            "--inputs",
            "1,01",
        ]
    };
    let first = run_cli(&args("1"));
    let second = run_cli(&args("1"));
    let wide = run_cli(&args("4"));
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed, same bytes");
    assert_eq!(first.stdout, wide.stdout, "worker count must not show");
}

#[test]
fn run_emits_the_final_tape_and_optionally_the_trace() {
    let out = run_cli(&[
        "run",
        "--engine",
        "full-decode:exthamming:8:1",
        "--inner",
        "flip-first",
        "--w",
        "00000000",
        "--input",
        "1",
        "--trace",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["final_catalytic"], "00000000");
    assert_eq!(json["restored"], true);
    assert!(json["trace"].as_array().unwrap().len() as u64 == json["steps"].as_u64().unwrap() + 1);
}

#[test]
fn inputs_and_tables_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("xs.txt");
    std::fs::write(&inputs, "1\n01\n# comment\n\n111\n").unwrap();

    // Export a bundled table through the library, then feed it back in.
    let table = catalytic_lab::fixtures::fixture_table("ones-at-least-2").unwrap();
    let table_path = dir.path().join("acc.json");
    std::fs::write(&table_path, table.to_json()).unwrap();

    let out = run_cli(&[
        "verify",
        "--engine",
        "tally",
        "--inner",
        &format!("@{}", table_path.display()),
        "--c",
        "4",
        "--inputs",
        &format!("@{}", inputs.display()),
        "--mode",
        "exhaustive",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["cases_run"], 3 * 16);
    assert_eq!(json["overall_pass"], true);
}

#[test]
fn projection_sweeps_can_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("levels.csv");
    let out = run_cli(&[
        "measures",
        "--set",
        "parity",
        "--m",
        "4",
        "--measure",
        "projection",
        "--epsilon",
        "0/1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["value"], 3);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("level,good,total,passes"));
    assert_eq!(table.lines().count(), 1 + 5, "header plus levels 0..=4");
}

#[test]
fn the_zpp_race_passes_for_the_parity_pair_and_fails_for_a_broken_one() {
    let out = run_cli(&[
        "zpp",
        "--engine-one",
        "parity-restorer:even",
        "--engine-two",
        "parity-restorer:odd",
        "--c",
        "6",
        "--input",
        "11",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["complementary"], true);
    assert_eq!(json["overall_pass"], true);
    assert!(json["histogram"].as_array().unwrap().len() >= 1);

    let out = run_cli(&[
        "zpp",
        "--engine-one",
        "parity-restorer:even",
        "--engine-two",
        "eraser",
        "--c",
        "4",
        "--input",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["complementary"], false);
}

#[test]
fn mask_files_feed_the_measure_commands() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("set.hex");
    // Parity at m=3 as a raw membership mask: points 3,5,6,0... the even
    // side is {000,011,101,110} = indices {0,3,5,6} -> bits 1001 0110 -> 96.
    std::fs::write(&mask, "96\n").unwrap();
    let out = run_cli(&[
        "measures",
        "--set",
        &format!("mask:@{}", mask.display()),
        "--measure",
        "partition",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["m"], 3);
    assert_eq!(json["value"], 4);
}

#[test]
fn out_files_are_created_where_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path: &Path = &dir.path().join("sub/does/not/exist.json");
    // Missing parent directories are a user error, reported as usage.
    let out = bin()
        .args(["codes", "--code", "rep:5", "--op", "summary", "--out"])
        .arg(path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
