use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anisoframe"))
        .current_dir(dir)
        .env("ANISOFRAME_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr is JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn norms_of_an_empty_file_are_zero() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("empty.txt"), "").unwrap();
    let out = run(tmp.path(), &["norms", "--input", "empty.txt", "--out-dir", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&tmp.path().join("o"));
    let records = rep["records"].as_array().unwrap();
    assert_eq!(records.len(), 5);
    for r in records {
        assert_eq!(r["value"].as_f64(), Some(0.0), "{r}");
    }
}

#[test]
fn unknown_subcommand_reports_json_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["bogus", "--out-dir", "o"]);
    assert!(!out.status.success());
    assert_eq!(stderr_json(&out)["error"], "usage");
    assert!(listing(tmp.path()).is_empty());
}

#[test]
fn unreadable_input_and_bad_parameters_fail_with_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["norms", "--input", "missing.txt", "--out-dir", "o"]);
    assert!(!out.status.success());
    assert_eq!(stderr_json(&out)["error"], "io");
    assert!(tmp.path().join("o/FAILED").exists());

    let out = run(tmp.path(), &["democracy", "--p1", "-1", "--out-dir", "p"]);
    assert!(!out.status.success());
    assert_eq!(stderr_json(&out)["error"], "invalid_parameter");
    assert!(!tmp.path().join("p").exists());

    std::fs::write(tmp.path().join("bad.json"), r#"{"nope": 1}"#).unwrap();
    let out = run(tmp.path(), &["--config", "bad.json", "norms"]);
    assert_eq!(stderr_json(&out)["error"], "config");
}

#[test]
fn frame_check_small_grid_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["frame-check", "--n", "64", "--jmax", "2", "--samples", "3", "--cutoff", "20", "--out-dir", "o"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&tmp.path().join("o"));
    assert!(rep["parseval"]["max"].as_f64().unwrap() <= 1e-10);
    assert!(rep["max_round_trip"].as_f64().unwrap() <= 1e-8);
    assert_eq!(rep["pass"], true);
}

#[test]
fn failed_check_leaves_marker_and_rerun_clears_it() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["frame-check", "--n", "64", "--jmax", "2", "--samples", "2", "--cutoff", "20", "--out-dir", "o"];
    let mut strict = args.to_vec();
    strict.extend(["--tolerance", "0"]);
    let out = run(tmp.path(), &strict);
    assert_eq!(out.status.code(), Some(1));
    assert!(tmp.path().join("o/FAILED").exists());
    assert_eq!(report(&tmp.path().join("o"))["pass"], false);

    let out = run(tmp.path(), &args);
    assert!(out.status.success());
    assert!(!tmp.path().join("o/FAILED").exists());
}

#[test]
fn outputs_are_deterministic_and_confined_to_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |dir: &'static str| {
        vec!["--seed", "11", "democracy", "--corpus", "30", "--p1", "1", "--q1", "2", "--svg", "--out-dir", dir]
    };
    assert!(run(tmp.path(), &args("a")).status.success());
    assert!(run(tmp.path(), &args("b")).status.success());
    assert_eq!(listing(tmp.path()), ["a", "b"]);
    let files = listing(&tmp.path().join("a"));
    assert_eq!(files, ["config.json", "democracy.jsonl", "ratios.csv", "ratios.svg", "report.json"]);
    // config.json records the differing out_dir
    for f in files.iter().filter(|f| *f != "config.json") {
        let a = std::fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let lines = std::fs::read_to_string(tmp.path().join("a/democracy.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 60);
    for l in lines.lines() {
        let v: Value = serde_json::from_str(l).unwrap();
        assert!(v["within"].is_boolean());
    }
}

#[test]
fn config_file_round_trips_and_flags_override_it() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("c.json"), r#"{"n": 64, "j_max": 2, "samples": 1, "cutoff": 8, "out_dir": "from_file"}"#).unwrap();
    let out = run(tmp.path(), &["--config", "c.json", "frame-check", "--samples", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let written = tmp.path().join("from_file/config.json");
    let cfg: Value = serde_json::from_str(&std::fs::read_to_string(&written).unwrap()).unwrap();
    assert_eq!(cfg["samples"], 2);
    assert_eq!(cfg["n"], 64);
    assert_eq!(cfg["subcommand"], "frame-check");

    // the written config reproduces the run
    std::fs::copy(&written, tmp.path().join("again.json")).unwrap();
    let out = run(tmp.path(), &["--config", "again.json", "--out-dir", "again", "frame-check"]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read(tmp.path().join("from_file/report.json")).unwrap(),
        std::fs::read(tmp.path().join("again/report.json")).unwrap()
    );
}

#[test]
fn transform_then_norms_and_rnla_on_the_coefficients() {
    let tmp = tempfile::tempdir().unwrap();
    let n = 16;
    let mut pgm = format!("P2\n{n} {n}\n255\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| if (i as i64 - 8).pow(2) + (j as i64 - 8).pow(2) < 20 { "200" } else { "10" }.to_string()).collect();
        pgm.push_str(&row.join(" "));
        pgm.push('\n');
    }
    std::fs::write(tmp.path().join("disk.pgm"), pgm).unwrap();
    let out = run(tmp.path(), &["transform", "--input", "disk.pgm", "--jmax", "1", "--out-dir", "t"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&tmp.path().join("t"));
    assert!(rep["round_trip"].as_f64().unwrap() <= 1e-8);
    let e = rep["energy"].as_f64().unwrap();
    let c = rep["coefficient_energy"].as_f64().unwrap();
    assert!((e - c).abs() <= 1e-10 * e);

    let out = run(tmp.path(), &["norms", "--input", "t/coefficients.txt", "--out-dir", "n"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = &report(&tmp.path().join("n"))["records"];
    // p = q = 1: b and f agree
    assert!(rec[0]["defect"].as_f64().unwrap() <= 1e-9);
    assert_eq!(rec[1]["method"], "exact_overlay");

    let out = run(tmp.path(), &["norms", "--input", "t/coefficients.txt", "--overlay-limit", "10", "--out-dir", "g"]);
    assert!(out.status.success());
    let rec = &report(&tmp.path().join("g"))["records"];
    assert_eq!(rec[1]["method"], "grid");
    assert!(rec[1]["defect"].as_f64().unwrap() <= 0.05);
}

#[test]
fn rnla_interp_and_decay_run_small() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["rnla", "--corpus", "6", "--max-size", "5", "--svg", "--out-dir", "r"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("r/curves.csv")).unwrap();
    assert!(csv.starts_with("element,t,sigma,method\n"));
    assert_eq!(report(&tmp.path().join("r"))["jackson_bernstein"]["pass"], true);

    let out = run(tmp.path(), &["interp", "--corpus", "4", "--max-size", "4", "--out-dir", "i"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&tmp.path().join("i"))["stable"], true);

    let out = run(tmp.path(), &["interp", "--q1", "2", "--out-dir", "bad"]);
    assert_eq!(stderr_json(&out)["error"], "invalid_parameter");

    let out = run(tmp.path(), &["decay-demo", "--n", "64", "--jmax", "2", "--budgets", "4,16,64", "--svg", "--out-dir", "d"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(tmp.path().join("d/curves.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("href"));
    let rep = report(&tmp.path().join("d"));
    assert_eq!(rep["shearlet"]["monotone"], true);
    assert_eq!(rep["haar"]["monotone"], true);
    // budget 0 leaves the whole energy
    let e = rep["energy"].as_f64().unwrap();
    assert_eq!(rep["shearlet"]["points"][0]["error"].as_f64(), Some(e));
}
