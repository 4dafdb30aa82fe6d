//! Integration tests for the study pipeline.

use microdispatch::grid::{fixture_path, load_case};
use microdispatch::pipeline::{
    compare_modes, run_study, run_study_core, Mode, PipelineError, RunConfig,
};
use microdispatch::uncertainty::UncertaintyConfig;

fn small_cfg(seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(fixture_path("lv_microgrid.json"), seed);
    cfg.n_generate = 150;
    cfg.n_reduced = 12;
    cfg.n_out_of_sample = 150;
    cfg.coa.max_iterations = 25;
    cfg
}

#[test]
fn out_of_sample_seed_differs_from_training_seed() {
    let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
    let result = run_study_core(&small_cfg(3), &case).unwrap();
    assert_ne!(result.training_seed, result.out_of_sample_seed);
    assert_eq!(result.scenarios_full.seed, Some(3));
}

/// With every distribution collapsed, the stochastic and deterministic
/// modes optimize the same objective and land on the same schedule.
#[test]
fn zero_uncertainty_modes_coincide() {
    let case = {
        let mut c = load_case(fixture_path("lv_microgrid.json")).unwrap();
        c.uncertainty = UncertaintyConfig::degenerate();
        c
    };
    let mut cfg = small_cfg(9);
    cfg.mode = Mode::Stochastic;
    let stoch = run_study_core(&cfg, &case).unwrap();
    cfg.mode = Mode::Deterministic;
    let det = run_study_core(&cfg, &case).unwrap();
    let diff = (stoch.out_of_sample.z - det.out_of_sample.z).abs();
    assert!(
        diff <= 0.02 * det.out_of_sample.z.abs().max(1e-9),
        "stochastic {} vs deterministic {}",
        stoch.out_of_sample.z,
        det.out_of_sample.z
    );
}

#[test]
fn study_directory_layout_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let result = run_study(&small_cfg(4), dir.path()).unwrap();
    for name in [
        "scenarios_full.csv",
        "scenarios_reduced.csv",
        "schedule.json",
        "report.json",
        "per_scenario.csv",
        "per_hour.csv",
        "convergence.csv",
        "run_config.json",
    ] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    assert!(!dir.path().join("FAILED").exists());
    assert_eq!(result.scenarios_training.len(), 12);

    // per_hour.csv has one row per hour plus the header.
    let per_hour = std::fs::read_to_string(dir.path().join("per_hour.csv")).unwrap();
    assert_eq!(per_hour.lines().count(), 25);
    let header = per_hour.lines().next().unwrap();
    assert!(header.starts_with("hour,"));
    assert!(header.contains("chp0_bus2_kw"));
    assert!(header.ends_with("grid_kw,loss_kw,v_min_pu,v_max_pu"));
}

#[test]
fn failing_run_leaves_a_marker() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_cfg(1);
    cfg.case_path = dir.path().join("missing_case.json");
    let err = run_study(&cfg, dir.path());
    assert!(err.is_err());
    assert!(dir.path().join("FAILED").exists());
}

#[test]
fn bad_reduction_target_is_rejected() {
    let mut cfg = small_cfg(1);
    cfg.n_reduced = cfg.n_generate + 1;
    let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
    assert!(matches!(
        run_study_core(&cfg, &case),
        Err(PipelineError::BadConfig(_))
    ));
}

#[test]
fn compare_produces_one_row_per_seed() {
    let mut cfg = small_cfg(0);
    cfg.n_generate = 80;
    cfg.n_reduced = 8;
    cfg.n_out_of_sample = 80;
    cfg.coa.max_iterations = 10;
    let comparison = compare_modes(&cfg, &[11, 12]).unwrap();
    assert_eq!(comparison.rows.len(), 2);
    assert_eq!(comparison.rows[0].seed, 11);
    assert!(comparison.mean_stochastic_out_of_sample_z.is_finite());
}

#[test]
fn library_rerun_reproduces_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cfg(6);
    run_study(&cfg, dir.path()).unwrap();
    let before: Vec<(String, Vec<u8>)> = list_files(dir.path());
    run_study(&cfg, dir.path()).unwrap();
    let after = list_files(dir.path());
    assert_eq!(before, after);
}

fn list_files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
