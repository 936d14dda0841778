//! End-to-end runs of the `hangar` binary: outputs, exit codes and the
//! JSON error line on stderr.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hangar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hangar")).args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn error_line(o: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&o.stderr);
    let last = stderr.lines().last().unwrap_or_default();
    serde_json::from_str(last).unwrap_or_else(|e| panic!("{e}: {stderr}"))
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn setup(n: &str, seed: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hangar(dir.path(), &["gen", "-n", n, "--seed", seed, "-o", "inst.json"])), 0);
    assert_eq!(code(&hangar(dir.path(), &["solve-ach", "-i", "inst.json", "-o", "plan.json"])), 0);
    dir
}

#[test]
fn pipeline_succeeds() {
    let dir = setup("3", "4");
    let d = dir.path();
    let v = hangar(d, &["validate", "-i", "inst.json", "-s", "plan.json", "--json"]);
    assert_eq!(code(&v), 0);
    let report: Value = serde_json::from_slice(&v.stdout).unwrap();
    assert_eq!(report["feasible"], true);
    assert_eq!(code(&hangar(d, &["solve-exact", "-i", "inst.json", "-o", "exact.json"])), 0);
    assert_eq!(json(&d.join("exact.json"))["provenance"], "Oracle");
    assert_eq!(code(&hangar(d, &["render", "-i", "inst.json", "-s", "exact.json", "-o", "out", "--html"])), 0);
    assert!(d.join("out/report.html").is_file());
    assert!(d.join("out/frame_00_0.00.svg").is_file());
}

#[test]
fn infeasible_plan_exits_two() {
    let dir = setup("2", "1");
    let d = dir.path();
    let mut plan = json(&d.join("plan.json"));
    plan["assignments"][0]["x"] = 60.0.into();
    fs::write(d.join("bad.json"), plan.to_string()).unwrap();
    let o = hangar(d, &["validate", "-i", "inst.json", "-s", "bad.json"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("OutOfBounds"));

    let o = hangar(d, &["render", "-i", "inst.json", "-s", "bad.json", "-o", "frames"]);
    assert_eq!(code(&o), 2);
    let e = error_line(&o);
    assert_eq!((e["error"].as_str(), e["code"].as_i64()), (Some("infeasible"), Some(2)));
    assert!(e["violations"].as_array().is_some_and(|v| !v.is_empty()));
}

#[test]
fn malformed_input_exits_three_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("broken.json"), "{\n  \"hangar\": [\n").unwrap();
    let o = hangar(d, &["solve-ach", "-i", "broken.json", "-o", "plan.json"]);
    assert_eq!(code(&o), 3);
    let e = error_line(&o);
    assert_eq!(e["error"], "parse");
    assert!(e["message"].as_str().unwrap().contains("broken.json"));
    assert!(!d.join("plan.json").exists());
}

#[test]
fn exhausted_budget_exits_four_and_still_saves() {
    let dir = setup("4", "3");
    let d = dir.path();
    let o = hangar(d, &["solve-exact", "-i", "inst.json", "-o", "exact.json", "--node-budget", "1"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stdout).contains("BudgetExhausted"));
    assert_eq!(code(&hangar(d, &["validate", "-i", "inst.json", "-s", "exact.json"])), 0);
}

#[test]
fn oversized_oracle_input_is_refused() {
    let dir = setup("6", "2");
    let o = hangar(dir.path(), &["solve-exact", "-i", "inst.json", "-o", "exact.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(error_line(&o)["error"], "instance_too_large");
}

#[test]
fn missing_file_and_usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = hangar(dir.path(), &["solve-ach", "-i", "nope.json", "-o", "plan.json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(error_line(&o)["error"], "io");

    let o = hangar(dir.path(), &["gen", "--bogus"]);
    assert_eq!(code(&o), 1);
    assert_eq!(error_line(&o)["error"], "usage");
    assert_eq!(code(&hangar(dir.path(), &["--help"])), 0);
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.toml"), "[hangar]\nhw = 80.0\nbuffer = 4.0\n\n[generator]\nn = 5\nseed = 9\n").unwrap();
    let o = hangar(d, &["--config", "run.toml", "gen", "--hw", "90", "--seed", "10", "-o", "inst.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let inst = json(&d.join("inst.json"));
    assert_eq!(inst["hangar"]["hw"], 90.0);
    assert_eq!(inst["hangar"]["buffer"], 4.0);
    assert_eq!(inst["hangar"]["hl"], 60.0);
    assert_eq!(inst["future"].as_array().unwrap().len(), 5);
    assert_eq!(inst["label"], "Inst-05-10");

    fs::write(d.join("typo.toml"), "[hangar]\nwidth = 80.0\n").unwrap();
    let o = hangar(d, &["--config", "typo.toml", "gen", "-o", "x.json"]);
    assert_eq!(code(&o), 3);
    assert!(error_line(&o)["message"].as_str().unwrap().contains("typo.toml"));
}

#[test]
fn import_round_trips_a_point_and_rejects_a_foreign_model() {
    let dir = setup("1", "5");
    let d = dir.path();
    assert_eq!(code(&hangar(d, &["export-milp", "-i", "inst.json", "-o", "model.lp"])), 0);
    let plan = json(&d.join("plan.json"));
    let a = &plan["assignments"][0];
    let id = a["aircraft_id"].as_str().unwrap();
    let lp = fs::read_to_string(d.join("model.lp")).unwrap();
    assert!(lp.contains(&format!("Accept({id})")));
    let point = format!(
        "Accept({id}) 1\nX({id}) {}\nY({id}) {}\nRollin({id}) {}\nRollout({id}) {}\nDArr({id}) {}\nDDep({id}) {}\n",
        a["x"], a["y"], a["roll_in"], a["roll_out"], a["d_arr"], a["d_dep"]
    );
    fs::write(d.join("point.txt"), point).unwrap();
    let o = hangar(d, &["import", "-i", "inst.json", "-m", "model.lp", "-p", "point.txt", "-o", "imported.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&hangar(d, &["validate", "-i", "inst.json", "-s", "imported.json"])), 0);

    assert_eq!(code(&hangar(d, &["gen", "-n", "2", "--seed", "5", "-o", "other.json"])), 0);
    assert_eq!(code(&hangar(d, &["export-milp", "-i", "other.json", "-o", "other.lp"])), 0);
    let o = hangar(d, &["import", "-i", "inst.json", "-m", "other.lp", "-p", "point.txt", "-o", "x.json"]);
    assert_eq!(code(&o), 3);
    assert!(error_line(&o)["message"].as_str().unwrap().contains("does not belong"));
}

#[test]
fn compare_keeps_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let names: Vec<String> = (1..=4).map(|s| format!("i{s}.json")).collect();
    for (k, name) in names.iter().enumerate() {
        let seed = (k + 1).to_string();
        assert_eq!(code(&hangar(d, &["gen", "-n", "2", "--seed", &seed, "-o", name])), 0);
    }
    fs::write(d.join("junk.json"), "not json").unwrap();
    let mut args = vec!["compare", "-o", "table.csv"];
    args.extend(names.iter().rev().map(String::as_str));
    args.push("junk.json");
    assert_eq!(code(&hangar(d, &args)), 0);
    let mut reader = csv::Reader::from_path(d.join("table.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "instance");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let order: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(order, ["i4.json", "i3.json", "i2.json", "i1.json", "junk.json"]);
    let status = header.iter().position(|h| h == "oracle_status").unwrap();
    let gap = header.iter().position(|h| h == "gap_pct").unwrap();
    for r in &rows[..4] {
        assert_eq!(&r[status], "ProvenOptimalOnGrid");
        assert!(r[gap].parse::<f64>().unwrap() >= -1e-9);
    }
    let error = header.iter().position(|h| h == "error").unwrap();
    assert!(!rows[4][error].is_empty());
}
