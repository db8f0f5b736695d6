use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn piterbarg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piterbarg"))
        .args(args)
        .env_remove("PITERBARG_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check_file(path: &Path) -> Output {
    piterbarg(&["--check-manifest", path.to_str().unwrap()])
}

const SMALL_ESTIMATE: &[&str] =
    &["estimate", "--alpha", "0.8", "--d", "1.5", "--domain", "full", "--delta", "0.05", "--reps", "300", "--seed", "5"];

#[test]
fn plan_reports_bounds_without_simulating() {
    let m = json(&piterbarg(&["plan", "--alpha", "1", "--delta", "0.01"]));
    assert_eq!(m["command"], "plan");
    let b = &m["results"]["budget"];
    let ln = 100f64.ln();
    assert!((b["horizon"].as_f64().unwrap() - ln * ln).abs() < 1e-12);
    assert!((b["horizon"].as_f64().unwrap() - 21.2076).abs() < 1e-4);
    assert!((b["disc_bound"].as_f64().unwrap() - 0.1 * ln.sqrt()).abs() < 1e-15);
    assert!((b["disc_bound"].as_f64().unwrap() - 0.214596).abs() < 1e-6);
    let trunc = b["trunc_bound"].as_f64().unwrap();
    assert!((trunc - (-ln * ln).exp()).abs() < 1e-20 && (trunc - 6.2e-10).abs() < 0.1e-10);
    assert!(b["stat_error"].is_null());
    assert_eq!(b["up_to_constant"], true);
}

#[test]
fn plan_with_calibrated_constants() {
    let m = json(&piterbarg(&["plan", "--alpha", "0.5", "--delta", "0.01", "--c-disc", "2", "--c-trunc", "0.5"]));
    let b = &m["results"]["budget"];
    assert_eq!(b["up_to_constant"], false);
    let ln = 100f64.ln();
    assert!((b["disc_bound"].as_f64().unwrap() - 2.0 * 0.01f64.powf(0.25) * ln.sqrt()).abs() < 1e-14);
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = piterbarg(&["estimate", "--alpha", "1", "--domain", "half", "--delta", "0.01", "--reps", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--d"));
}

#[test]
fn invalid_values_are_usage_errors() {
    for args in [
        &["plan", "--alpha", "2.5", "--delta", "0.01"][..],
        &["plan", "--alpha", "1", "--delta", "1.5"],
        &["estimate", "--alpha", "1", "--d", "-1", "--domain", "half", "--delta", "0.1", "--reps", "10", "--seed", "1"],
        &["estimate", "--alpha", "1", "--d", "1", "--domain", "left", "--delta", "0.1", "--reps", "10", "--seed", "1"],
        &["estimate", "--alpha", "1", "--d", "1", "--domain", "half", "--delta", "0.1", "--reps", "0", "--seed", "1"],
        &[],
    ] {
        assert_eq!(piterbarg(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn non_nested_spacings_are_rejected() {
    for deltas in ["0.04,0.03", "0.01,0.04", "0.04,0.04"] {
        let out = piterbarg(&["rate", "--d", "2", "--domain", "half", "--deltas", deltas, "--reps", "10", "--seed", "3"]);
        assert_eq!(out.status.code(), Some(2), "{deltas}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn horizon_defaults_to_the_planning_rule() {
    let m = json(&piterbarg(&[
        "estimate", "--alpha", "1.2", "--d", "2", "--domain", "half", "--delta", "0.1", "--reps", "50", "--seed", "1",
    ]));
    let expected = 10f64.ln().powf(2.0 / 1.2);
    assert!((m["config"]["horizon"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(m["results"]["budget"]["horizon"], m["config"]["horizon"]);

    let m = json(&piterbarg(&[
        "estimate", "--alpha", "1.2", "--d", "2", "--domain", "half", "--delta", "0.1", "--horizon", "3", "--reps", "50",
        "--seed", "1",
    ]));
    assert_eq!(m["config"]["horizon"].as_f64(), Some(3.0));
}

#[test]
fn reruns_and_thread_counts_give_identical_results() {
    let a = json(&piterbarg(SMALL_ESTIMATE));
    let b = json(&piterbarg(SMALL_ESTIMATE));
    let mut threaded = vec!["--threads", "3"];
    threaded.extend_from_slice(SMALL_ESTIMATE);
    let c = json(&piterbarg(&threaded));
    let env = Command::new(env!("CARGO_BIN_EXE_piterbarg")).args(SMALL_ESTIMATE).env("PITERBARG_THREADS", "2").output().unwrap();
    let d = json(&env);
    for other in [&b, &c, &d] {
        assert_eq!(a["results"], other["results"]);
        assert_eq!(a["config"], other["config"]);
    }
    assert_eq!(a["results"]["estimate"]["method"], "sample-mean");
}

#[test]
fn every_output_passes_check_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: [(&str, Vec<&str>); 5] = [
        ("estimate.json", SMALL_ESTIMATE.to_vec()),
        ("plan.json", vec!["plan", "--alpha", "0.5", "--delta", "0.001"]),
        ("validate.json", vec!["validate", "--d", "2", "--domain", "full", "--delta", "0.1", "--reps", "20", "--seed", "2"]),
        ("rate.csv", vec!["rate", "--d", "2", "--domain", "half", "--deltas", "0.2,0.1,0.05", "--reps", "200", "--seed", "3"]),
        (
            "gap.json",
            vec!["gap-decay", "--alpha", "0.5", "--d", "2", "--domain", "half", "--deltas", "0.4,0.2,0.1", "--reps", "100", "--seed", "4"],
        ),
    ];
    for (name, args) in outputs {
        let path = dir.path().join(name);
        let mut args = args;
        args.extend(["--out", path.to_str().unwrap()]);
        let out = piterbarg(&args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{name} also wrote to stdout");
        let check = check_file(&path);
        assert_eq!(check.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&check.stdout));
    }

    let csv = std::fs::read_to_string(dir.path().join("rate.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("delta,p_hat,stderr,gap,gap_stderr,empirical_rate"));
    assert_eq!(csv.lines().count(), 4);

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"command":"estimate","config":{},"started_at":"x","finished_at":"x","tool_version":"0","results":{}}"#).unwrap();
    assert_eq!(check_file(&broken).status.code(), Some(1));
    let bad_csv = dir.path().join("bad.csv");
    std::fs::write(&bad_csv, "delta,p_hat\n0.1,2\n").unwrap();
    assert_eq!(check_file(&bad_csv).status.code(), Some(1));
    assert_eq!(check_file(&dir.path().join("missing.json")).status.code(), Some(2));
}

#[test]
fn manifest_floats_round_trip_exactly() {
    let out = piterbarg(SMALL_ESTIMATE);
    let text = String::from_utf8(out.stdout).unwrap();
    let m: Value = serde_json::from_str(&text).unwrap();
    let est = &m["results"]["estimate"];
    for key in ["estimate", "stderr"] {
        let x = est[key].as_f64().unwrap();
        let printed = serde_json::to_string(&x).unwrap();
        assert_eq!(printed.parse::<f64>().unwrap().to_bits(), x.to_bits());
        assert!(text.contains(&printed), "{key} printed as {printed}");
    }
}

#[test]
fn validate_with_few_replications_is_inconclusive() {
    let out = piterbarg(&["validate", "--d", "1", "--domain", "half", "--delta", "0.05", "--reps", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let m = json(&out);
    assert_eq!(m["results"]["status"], "inconclusive");
    assert_eq!(m["results"]["target"].as_f64(), Some(2.0));
    assert_eq!(m["config"]["alpha"].as_f64(), Some(1.0));
}

#[test]
fn validate_full_line_targets_eight_thirds() {
    let m = json(&piterbarg(&["validate", "--d", "1", "--domain", "full", "--delta", "0.1", "--reps", "30", "--seed", "1"]));
    assert!((m["results"]["target"].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-15);
    let factor = m["results"]["correction_factor"].as_f64().unwrap();
    let est = m["results"]["estimate"]["estimate"].as_f64().unwrap();
    assert_eq!(m["results"]["corrected_estimate"].as_f64().unwrap(), est * factor);
}
