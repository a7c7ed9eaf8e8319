use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gstower"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const REDUCED: &[&str] = &["count", "--p", "3", "--n", "3", "--tower", "closure", "--model", "reduced"];

#[test]
fn reduced_closure_census_totals() {
    let mut args = REDUCED.to_vec();
    args.extend(["--format", "json"]);
    let v = json(&args);
    assert_eq!(v["total"], 162);
    assert_eq!(v["degree"]["exact"], 27);
    assert_eq!(v["bound_met"], true);
    assert_eq!(v["manifest"]["command"], "count");
    assert_eq!(v["manifest"]["modulus"], "T^2+1");
}

#[test]
fn census_formats_agree() {
    let mut j = REDUCED.to_vec();
    j.extend(["--format", "json"]);
    let v = json(&j);
    let rows = v["rows"].as_array().unwrap();

    let csv = stdout(&run(REDUCED));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("base,fiber_size,split,values_outside_Kminus"));
    let csv_rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(csv_rows.len(), rows.len());

    let mut t = REDUCED.to_vec();
    t.extend(["--format", "table"]);
    let table = stdout(&run(&t));
    assert!(table.contains("total: 162"));

    for (row, cells) in rows.iter().zip(&csv_rows) {
        assert_eq!(row["base"], cells[0]);
        assert_eq!(row["fiber_size"].to_string(), cells[1]);
        assert_eq!(row["split"].to_string(), cells[2]);
        assert_eq!(row["values_outside_kminus"].to_string(), cells[3]);
        let md = format!("| {} | {} | {} | {} |", cells[0], cells[1], cells[2], cells[3]);
        assert!(table.contains(&md), "missing table row {md}");
    }
}

#[test]
fn parallel_census_is_identical() {
    let serial = run(REDUCED);
    let mut args = REDUCED.to_vec();
    args.push("--parallel");
    let parallel = run(&args);
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn verify_passes_at_p3() {
    let out = run(&["verify", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = v["checklist"].as_array().unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e["passed"] == true));
}

#[test]
fn failing_identity_exits_one() {
    let out = run(&["verify", "--p", "3", "--identity", "x2 = x2 + 1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn holding_identity_exits_zero() {
    let out = run(&["verify", "--p", "3", "--suite", "lemma", "--identity", "wp(x2) = g(x1)"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn genus_below_level_five_is_an_error() {
    let out = run(&["genus", "--p", "3", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["count", "--p", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--p", "4", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn genus_reports_exact_coefficients() {
    let v = json(&["genus", "--p", "3", "--n", "5", "--format", "json"]);
    let text = v.to_string();
    assert!(text.contains("77/27"), "{text}");
}

#[test]
fn ratio_rejects_small_degree() {
    let out = run(&["ratio", "--p", "3", "--nmax", "5", "--deg", "2"]);
    assert_eq!(out.status.code(), Some(2));
}
