//! End-to-end behaviour of the `arboreal` binary: formats, exit codes and
//! determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn arboreal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arboreal"))
        .args(args)
        .env_remove("ARBOREAL_ENUM_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn recursion_exact_table() {
    let out = arboreal(&["recursion", "--d", "2", "--p", "1/2", "--n", "2", "--mode", "exact"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "m,Z_S,Z_X,K,q,theta,alpha");
    assert!(lines[3].starts_with("2,1/4,1/4,1,1/2,"));
}

#[test]
fn recursion_single_row_and_json() {
    let out = arboreal(&["recursion", "--d", "2", "--p", "3/4", "--n", "0"]);
    assert_eq!(stdout(&out).lines().count(), 2);
    let out = arboreal(&["recursion", "--d", "2", "--p", "0.75", "--n", "50", "--mode", "float", "--format", "json"]);
    assert!(out.status.success());
    let q = json(&out)["rows"][50]["q"].as_f64().unwrap();
    assert!((q - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn decimals_rejected_in_exact_mode() {
    let out = arboreal(&["recursion", "--d", "2", "--p", "0.75", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = arboreal(&["enumerate", "--d", "2", "--n", "1", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_two() {
    for args in [
        &["recursion", "--d", "1", "--p", "1/2", "--n", "2"][..],
        &["recursion", "--d", "2", "--p", "3/2", "--n", "2"],
        &["recursion", "--d", "2", "--p", "1/2"],
        &["sample", "finite", "--d", "2", "--n", "2", "--p", "1/2", "--stream"],
        &["sample", "limit", "--d", "2", "--n", "2", "--p", "1/2", "--stats", "edges"],
        &["verify", "--suite", "recursion", "--d", "2", "--p", "1/2"],
        &["verify", "--suite", "bernoulli", "--d", "2", "--p", "3/4"],
    ] {
        assert_eq!(arboreal(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumerate_examples() {
    let out = arboreal(&["enumerate", "--d", "2", "--n", "1", "--p", "1/2"]);
    assert_eq!(stdout(&out).trim(), r#"{"Z":"3/4","Z_S":"1/2","Z_X":"1/4"}"#);
    let out = arboreal(&["enumerate", "--d", "2", "--n", "0", "--p", "1/3"]);
    assert_eq!(stdout(&out).trim(), r#"{"Z":"1","Z_S":"1","Z_X":"0"}"#);
    let out = arboreal(&["enumerate", "--d", "3", "--n", "3", "--p", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumeration_cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_arboreal"))
            .args(["enumerate", "--d", "2", "--n", "3", "--p", "1/2"])
            .env("ARBOREAL_ENUM_CAP", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("10").status.code(), Some(2));
    assert!(run("14").status.success());
}

#[test]
fn dumped_measure_lists_every_forest() {
    let out = arboreal(&["enumerate", "--d", "2", "--n", "1", "--p", "1/2", "--dump-measure"]);
    let doc = json(&out);
    let forests: Vec<_> = doc["measure"].as_array().unwrap().iter().map(|e| e["forest"].as_str().unwrap()).collect();
    assert_eq!(forests, ["00", "10", "01"]);
    assert_eq!(doc["measure"][0]["probability"], "1/3");
}

#[test]
fn sampling_is_deterministic_across_runs_and_workers() {
    let base = ["sample", "finite", "--d", "2", "--n", "1", "--p", "1/2", "--replicas", "3", "--seed", "7"];
    let a = arboreal(&base);
    let b = arboreal(&base);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let wide = ["sample", "limit", "--d", "3", "--depth", "5", "--p", "0.5", "--replicas", "3000", "--seed", "9"];
    let one = arboreal(&[&wide[..], &["--workers", "1"]].concat());
    let four = arboreal(&[&wide[..], &["--workers", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 3000);
}

#[test]
fn subcritical_records_have_no_spine() {
    let out = arboreal(&[
        "sample", "limit", "--d", "2", "--p", "0.4", "--depth", "8", "--replicas", "1000", "--seed", "1", "--emit", "forest",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        let rec: arboreal_cli::records::Record = serde_json::from_str(line).unwrap();
        let sc = rec.state_config().unwrap();
        assert!(!sc.states().contains(&arboreal::EdgeState::Spine));
        assert_eq!(rec.forest.unwrap(), sc.decode_unchecked().bit_string());
    }
}

#[test]
fn streaming_cluster_histogram() {
    let out = arboreal(&[
        "sample", "limit", "--d", "2", "--p", "0.75", "--depth", "24", "--stream", "--stats", "clusters", "--site-level", "4",
        "--replicas", "4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("size,count"));
    assert_eq!(text.lines().count(), 52);
    assert!(text.lines().last().unwrap().starts_with(">50,"));
}

#[test]
fn streamed_and_materialized_statistics_agree() {
    let common = ["--d", "2", "--p", "3/4", "--depth", "9", "--replicas", "300", "--seed", "5"];
    let streamed = arboreal(&[&["sample", "limit"][..], &common, &["--stream", "--stats", "clusters"]].concat());
    let records = arboreal(&[&["sample", "limit"][..], &common].concat());
    let dir = std::env::temp_dir().join(format!("arboreal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("records.ndjson");
    std::fs::write(&path, &records.stdout).unwrap();
    let from_file = arboreal(&["stats", "--input", path.to_str().unwrap(), "--report", "clusters"]);
    assert!(from_file.status.success());
    assert_eq!(streamed.stdout, from_file.stdout);

    let mut child = Command::new(env!("CARGO_BIN_EXE_arboreal"))
        .args(["stats", "--input", "-", "--report", "clusters"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&records.stdout).unwrap();
    assert_eq!(child.wait_with_output().unwrap().stdout, streamed.stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn survival_statistics() {
    let out = arboreal(&[
        "sample", "finite", "--d", "2", "--n", "2", "--p", "1/2", "--replicas", "100000", "--seed", "3", "--stream", "--stats",
        "survival",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["expected"].as_f64().unwrap(), 0.5);
    assert!(doc["z_score"].as_f64().unwrap().abs() < 3.0);
}

#[test]
fn stats_rejects_empty_and_malformed_input() {
    let dir = std::env::temp_dir().join(format!("arboreal-stats-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let empty = dir.join("empty.ndjson");
    std::fs::write(&empty, "").unwrap();
    let out = arboreal(&["stats", "--input", empty.to_str().unwrap(), "--report", "survival"]);
    assert_eq!(out.status.code(), Some(2));
    let junk = dir.join("junk.ndjson");
    std::fs::write(&junk, "{\"replica\": 0}\n").unwrap();
    let out = arboreal(&["stats", "--input", junk.to_str().unwrap(), "--report", "gw"]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.join("missing.ndjson");
    let out = arboreal(&["stats", "--input", missing.to_str().unwrap(), "--report", "gw"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn stats_survival_from_records() {
    let records = arboreal(&["sample", "finite", "--d", "2", "--n", "2", "--p", "1/2", "--replicas", "20000", "--seed", "8"]);
    let dir = std::env::temp_dir().join(format!("arboreal-surv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("wired.ndjson");
    std::fs::write(&path, &records.stdout).unwrap();
    let out = arboreal(&["stats", "--input", path.to_str().unwrap(), "--report", "survival"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["replicas"], 20000);
    let out = arboreal(&["stats", "--input", path.to_str().unwrap(), "--report", "clusters"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_examples_pass() {
    for args in [
        &["verify", "--suite", "recursion", "--d", "2", "--n", "3", "--p", "1/2"][..],
        &["verify", "--suite", "pushforward", "--d", "2", "--n", "2", "--p", "1/3"],
        &["verify", "--suite", "kernels", "--d", "4", "--p", "0.3"],
        &["verify", "--suite", "kernels", "--d", "3", "--p", "2/5"],
        &["verify", "--suite", "gw"],
    ] {
        let out = arboreal(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stdout(&out));
        assert_eq!(json(&out)["pass"], true);
    }
}

#[test]
fn verify_reports_failures_with_exit_one() {
    // 500 replicas cannot bring the TV distance of a 32-forest law below 0.01.
    let out = arboreal(&["verify", "--suite", "sampler-gof", "--d", "2", "--n", "2", "--p", "1/2", "--replicas", "500"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["pass"], false);
    assert!(doc["checks"].as_array().unwrap().iter().any(|c| c["pass"] == false));
}
