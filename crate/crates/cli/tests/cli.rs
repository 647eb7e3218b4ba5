use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, None)
}

fn run_env(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_grasscond"));
    cmd.args(args).env_remove("GRASSCOND_THREADS");
    if let Some(t) = threads {
        cmd.env("GRASSCOND_THREADS", t);
    }
    cmd.output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn coeffs_example() {
    let v = json(&["coeffs", "--n", "7", "--m", "2", "--format", "json"]);
    assert_eq!(v["d"][0][1], "1/5");
    assert_eq!(v["d"][1][0], "1");
}

#[test]
fn coeffs_csv_lists_every_m() {
    let out = run(&["coeffs", "--n", "4", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("m,i,j,d\n"));
    // Three 3x3 matrices plus the header.
    assert_eq!(text.lines().count(), 1 + 3 * 9);
}

#[test]
fn orthant_example() {
    let v = json(&["iv", "--cone", r#"{"orthant":4}"#]);
    let got: Vec<f64> = serde_json::from_value(v["v"].clone()).unwrap();
    assert_eq!(got, vec![0.0625, 0.25, 0.375, 0.25, 0.0625]);
}

#[test]
fn nested_cone() {
    let v = json(&["iv", "--cone", r#"{"product":[{"dual":{"circular":{"n":3,"beta":0.4}}},{"lorentz":2}]}"#]);
    let got: Vec<f64> = serde_json::from_value(v["v"].clone()).unwrap();
    assert_eq!(got.len(), 6);
    assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn tail_example() {
    let v = json(&["tail", "--n", "4", "--m", "1", "--t", "10"]);
    let row = &v["rows"][0];
    assert!((row["bound"].as_f64().unwrap() - 0.6 * 3f64.sqrt()).abs() < 1e-14);
    assert_eq!(row["valid"], true);
    assert_eq!(v["theorem"], "general");
}

#[test]
fn selfdual_tail_uses_cone_constant() {
    let v = json(&["tail", "--cone", r#"{"lorentz":12}"#, "--m", "9", "--t", "200,400"]);
    assert_eq!(v["theorem"], "selfdual");
    assert!((v["excess"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let out = run(&["tail", "--cone", r#"{"circular":{"n":5,"beta":0.3}}"#, "--m", "2", "--t", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("self-dual"));
}

#[test]
fn tube_bound_grid() {
    let out = run(&["tube-bound", "--cone", r#"{"orthant":6}"#, "--m", "2", "--alpha", "0.1,0.5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha_or_t,primal,full,valid,probability");
    assert_eq!(lines.len(), 3);
}

#[test]
fn charpoly_exact_only() {
    let v = json(&["avg-charpoly", "--matrix", "[[2,0],[0,2]]", "--l", "1", "--exact-only"]);
    // (s - t)(1 + s t) at s = 2 is 2 + 3t - 2t^2.
    let got: Vec<f64> = serde_json::from_value(v["exact"].clone()).unwrap();
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip([2.0, 3.0, -2.0]) {
        assert!((g - w).abs() < 1e-12);
    }
    assert!(v.get("mc").is_none());
}

#[test]
fn condition_csv_header() {
    let out = run(&["mc-condition", "--n", "4", "--beta", "0.6", "--samples", "2000", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("t,empirical_tail,stderr,theoretical_bound,valid\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["coeffs"],
        vec!["coeffs", "--n", "5", "--m", "5"],
        vec!["iv", "--cone", "{\"orthant\":"],
        vec!["iv", "--cone", r#"{"circular":{"n":3,"beta":2.0}}"#],
        vec!["tube-bound", "--cone", r#"{"orthant":3}"#, "--m", "1"],
        vec!["tail", "--n", "4", "--m", "1"],
        vec!["mc-condition", "--n", "4", "--beta", "0.5", "--m", "2"],
        vec!["avg-charpoly", "--matrix", "[[1,2],[3]]", "--l", "1"],
        vec!["g-report", "--m-min", "0"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("grasscond: invalid configuration"), "{args:?}");
    }
}

#[test]
fn experimental_subspaces() {
    let out = run(&["mc-condition", "--n", "4", "--beta", "0.5", "--m", "2", "--experimental", "--samples", "1000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["experimental"], true);
}

#[test]
fn bad_thread_count() {
    let out = run_env(&["coeffs", "--n", "3"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("GRASSCOND_THREADS"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = run(&["coeffs", "--n", "3", "--m", "1", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "m,i,j,d\n1,0,0,1\n1,0,1,0\n1,1,0,0\n1,1,1,1\n");
}

#[test]
fn identical_across_threads() {
    let cone = r#"{"simplicial":[[1,0,0],[1,1,0],[0,1,1]]}"#;
    let cases: [&[&str]; 3] = [
        &["iv", "--cone", cone, "--samples", "30000", "--seed", "9", "--format", "csv"],
        &["avg-charpoly", "--matrix", "[[1,2,0],[2,0,1],[0,1,3]]", "--l", "2", "--samples", "20000", "--format", "csv"],
        &["mc-condition", "--n", "5", "--beta", "0.9", "--samples", "50000", "--seed", "4"],
    ];
    for args in cases {
        let one = run_env(args, Some("1")).stdout;
        assert!(!one.is_empty());
        assert_eq!(one, run_env(args, None).stdout);
        assert_eq!(one, run_env(args, Some("3")).stdout);
    }
}

#[test]
fn selftests_pass() {
    for cmd in ["coeffs", "iv", "tail", "inequality-suite", "g-report"] {
        let out = run(&[cmd, "--selftest"]);
        assert!(out.status.success(), "{cmd}: {}", stderr(&out));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["passed"], true);
    }
}
