//! End-to-end tests of the command-line interface.

use std::path::Path;
use std::process::{Command, Output};

use microdispatch::grid::fixture_path;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_microdispatch"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn case_arg(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

#[test]
fn validate_prints_the_summary_line() {
    let out = run(&["validate", "--case", &case_arg("two_bus.json")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("2 buses, 1 branch, radial: ok"),
        "stdout: {text}"
    );
}

#[test]
fn validate_rejects_broken_case_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture_path("two_bus.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["buses"][1]["load_p_peak"] = serde_json::json!(-5.0);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["validate", "--case", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("load_p_peak"), "stderr: {err}");
}

#[test]
fn missing_case_file_is_a_runtime_error() {
    let out = run(&["validate", "--case", "/nonexistent/case.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["validate", "--case", &case_arg("two_bus.json"), "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_is_available_everywhere() {
    for args in [
        vec!["--help"],
        vec!["validate", "--help"],
        vec!["scenarios", "--help"],
        vec!["reduce", "--help"],
        vec!["dispatch", "--help"],
        vec!["report", "--help"],
        vec!["compare", "--help"],
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("Usage:"), "{args:?}: {text}");
    }
}

#[test]
fn scenarios_are_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let output = run(&[
            "scenarios",
            "--case",
            &case_arg("lv_microgrid.json"),
            "--n",
            "200",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn reduce_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    let reduced = dir.path().join("reduced.csv");
    assert!(run(&[
        "scenarios",
        "--case",
        &case_arg("lv_microgrid.json"),
        "--n",
        "100",
        "--seed",
        "3",
        "--out",
        full.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&[
        "reduce",
        "--in",
        full.to_str().unwrap(),
        "--to",
        "10",
        "--out",
        reduced.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&reduced).unwrap();
    // header + 10 scenarios x 24 hours
    assert_eq!(text.lines().count(), 241);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("reduced 100 scenarios to 10"));
}

#[test]
fn reduce_rejects_an_oversized_target() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.csv");
    assert!(run(&[
        "scenarios",
        "--case",
        &case_arg("lv_microgrid.json"),
        "--n",
        "5",
        "--seed",
        "3",
        "--out",
        full.to_str().unwrap(),
    ])
    .status
    .success());
    let out = run(&[
        "reduce",
        "--in",
        full.to_str().unwrap(),
        "--to",
        "9",
        "--out",
        dir.path().join("r.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

fn dispatch_args<'a>(case: &'a str, out: &'a str, deterministic: bool) -> Vec<&'a str> {
    let mut args = vec![
        "dispatch",
        "--case",
        case,
        "--seed",
        "2",
        "--scenarios",
        "60",
        "--reduce-to",
        "6",
        "--iters",
        "8",
        "--oos",
        "50",
        "--out",
        out,
    ];
    if deterministic {
        args.push("--deterministic");
    }
    args
}

#[test]
fn dispatch_and_report_work_together() {
    let dir = tempfile::tempdir().unwrap();
    let case = case_arg("lv_microgrid.json");
    let out_dir = dir.path().join("study");
    let out_str = out_dir.to_string_lossy().into_owned();

    let out = run(&dispatch_args(&case, &out_str, false));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("report.json").exists());

    // Deterministic mode into a sibling directory for later comparison.
    let det_dir = dir.path().join("study_det");
    let det_str = det_dir.to_string_lossy().into_owned();
    assert!(run(&dispatch_args(&case, &det_str, true)).status.success());
    assert!(det_dir.join("report.json").exists());

    // report re-renders CSVs from report.json alone.
    std::fs::remove_file(out_dir.join("per_scenario.csv")).unwrap();
    std::fs::remove_file(out_dir.join("per_hour.csv")).unwrap();
    let rep = run(&["report", "--in", &out_str]);
    assert!(rep.status.success());
    assert!(out_dir.join("per_scenario.csv").exists());
    assert!(out_dir.join("per_hour.csv").exists());
    let text = String::from_utf8(rep.stdout).unwrap();
    assert!(text.contains("mode:            stochastic"), "{text}");
    assert!(text.contains("out-of-sample"));
}

#[test]
fn dispatch_weights_override_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    let case = case_arg("lv_microgrid.json");
    let out_dir = dir.path().join("weighted");
    let out = run(&[
        "dispatch",
        "--case",
        &case,
        "--seed",
        "2",
        "--scenarios",
        "40",
        "--reduce-to",
        "5",
        "--iters",
        "5",
        "--oos",
        "40",
        "--weights",
        "2.5",
        "0.0",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let echo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("run_config.json")).unwrap())
            .unwrap();
    assert_eq!(echo["weights_override"], serde_json::json!([2.5, 0.0]));
}

#[test]
fn compare_writes_comparison_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "compare",
        "--case",
        &case_arg("lv_microgrid.json"),
        "--seeds",
        "1,2",
        "--scenarios",
        "40",
        "--reduce-to",
        "5",
        "--iters",
        "5",
        "--oos",
        "40",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,stochastic_in_sample_z,stochastic_out_of_sample_z,deterministic_in_sample_z,deterministic_out_of_sample_z"
    );
    assert_eq!(text.lines().count(), 4); // header + 2 seeds + mean row
    assert!(text.lines().last().unwrap().starts_with("mean,"));
}

#[test]
fn threads_flag_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, threads) in [(&a, "1"), (&b, "2")] {
        let output = bin()
            .args([
                "--threads",
                threads,
                "scenarios",
                "--case",
                &case_arg("lv_microgrid.json"),
                "--n",
                "100",
                "--seed",
                "9",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn fixtures_ship_with_the_crate() {
    for name in ["two_bus.json", "lv_microgrid.json", "feeder69.json"] {
        assert!(Path::new(&case_arg(name)).exists(), "{name} missing");
    }
}
