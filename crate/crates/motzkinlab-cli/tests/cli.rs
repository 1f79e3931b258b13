//! End-to-end runs of the compiled binary: exit codes, frozen output
//! shapes, and byte-level determinism.

use std::process::{Command, Output};
use std::time::Instant;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motzkinlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

/// Data rows: comment lines dropped, then the column header dropped.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn gap_scan_emits_rows_and_fit() {
    let out = run(&["gap", "--n-min", "3", "--n-max", "5"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.starts_with("# motzkinlab 0.1.0 gap\n"));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "n,lambda1,lambda2,gap,sector_p,sector_q,residual"
    );
    assert_eq!(data_lines(&text).len(), 3);
    assert!(text.lines().any(|l| l.starts_with("# fit ")));
}

#[test]
fn single_point_scan_skips_the_fit() {
    let out = run(&["gap", "--n-min", "3", "--n-max", "3"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert_eq!(data_lines(&text).len(), 1);
    assert!(!text.lines().any(|l| l.starts_with("# fit")));
}

#[test]
fn malformed_range_is_a_usage_error() {
    let out = run(&["gap", "--n-min", "5", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = run(&["gap", "--n-min", "3", "--n-max", "4", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eps_variant_flag_pairing_is_enforced() {
    let missing = run(&["gap", "--n-min", "3", "--n-max", "4", "--variant", "eps"]);
    assert_eq!(missing.status.code(), Some(2));
    let stray = run(&["gap", "--n-min", "3", "--n-max", "4", "--eps", "0.1"]);
    assert_eq!(stray.status.code(), Some(2));
}

#[test]
fn schmidt_rows_are_exact_rationals() {
    let out = run(&["schmidt", "--n", "4"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert_eq!(data_lines(&text), vec!["0,4/9", "1,4/9", "2,1/9"]);
}

#[test]
fn schmidt_json_mirrors_the_csv_columns() {
    let out = run(&["schmidt", "--n", "4", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(v["command"], "schmidt");
    assert_eq!(v["columns"][0], "m");
    assert_eq!(v["columns"][1], "probability");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["rows"][2]["m"], 2);
    assert_eq!(v["rows"][2]["probability"], "1/9");
    assert_eq!(v["rank"], 3);
}

#[test]
fn supertree_levels_follow_the_pattern_counts() {
    let out = run(&["supertree", "--k-max", "4", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let sizes: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["patterns"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![1, 1, 2, 5, 14]);
    assert_eq!(v["summary"]["total_patterns"], 23);
}

#[test]
fn entropy_offset_sits_in_the_coarse_band() {
    let out = run(&["entropy", "--n", "1000"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(fields[0], "1000");
    let c_n: f64 = fields[2].parse().unwrap();
    assert!(c_n > 0.10 && c_n < 0.20, "c_n = {c_n}");
}

#[test]
fn entropy_needs_a_length_argument() {
    let out = run(&["entropy"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn walk_and_edgeload_scan_their_ranges() {
    let out = run(&["walk", "--n-max", "6"]);
    assert!(out.status.success());
    assert_eq!(data_lines(&stdout_str(&out)).len(), 5);

    let out = run(&["edgeload", "--n-max", "6"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 5);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        let bound: f64 = fields[4].parse().unwrap();
        let true_gap: f64 = fields[5].parse().unwrap();
        assert!(bound <= true_gap, "certificate must lower-bound the gap");
    }
}

#[test]
fn sector_row_reports_a_positive_energy() {
    let out = run(&["sector", "--n", "6", "--p", "1", "--q", "0"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(&fields[..4], &["6", "1", "0", "simplified"]);
    let lambda1: f64 = fields[4].parse().unwrap();
    assert!(lambda1 > 0.0);
    let dim: usize = fields[5].parse().unwrap();
    assert!(dim > 0);
}

#[test]
fn balanced_sector_request_is_rejected_as_usage() {
    let out = run(&["sector", "--n", "6", "--p", "0", "--q", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["gap", "--n-min", "3", "--n-max", "5", "--seed", "7"];
    let first = bin().args(args).arg("--out").arg(&a).output().unwrap();
    let second = bin().args(args).arg("--out").arg(&b).output().unwrap();
    assert!(first.status.success() && second.status.success());
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn unwritable_output_path_exits_one() {
    let out = run(&[
        "schmidt",
        "--n",
        "4",
        "--out",
        "/nonexistent-dir-for-sure/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn thread_cap_env_is_validated() {
    let bad = bin()
        .env("MOTZKINLAB_THREADS", "abc")
        .args(["schmidt", "--n", "4"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let good = bin()
        .env("MOTZKINLAB_THREADS", "2")
        .args(["schmidt", "--n", "4"])
        .output()
        .unwrap();
    assert!(good.status.success());
}

#[test]
fn fast_verify_battery_passes_within_budget() {
    let start = Instant::now();
    let out = run(&["verify", "--suite", "fast"]);
    let elapsed = start.elapsed();
    assert!(out.status.success());
    let text = stdout_str(&out);
    assert!(text.starts_with("# motzkinlab 0.1.0 verify suite=fast\n"));
    let passes = text.lines().filter(|l| l.contains(": PASS")).count();
    assert_eq!(passes, 14);
    assert!(
        elapsed.as_secs() < 60,
        "fast battery took {:?}",
        elapsed
    );
}
