//! End-to-end study orchestration: load case -> generate scenarios ->
//! reduce -> optimize the schedule -> evaluate, with all artifacts written
//! to an output directory; plus the stochastic-vs-deterministic comparison.
//!
//! Every file in the output directory is a pure function of the run
//! configuration: rerunning the same configuration reproduces the directory
//! byte for byte.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coa::{optimize, CoaParams, IterationStats, OptResult, NON_FINITE_FITNESS};
use crate::evaluate::{evaluate_schedule, DispatchSchedule, EvalError, EvaluationReport};
use crate::grid::{load_case, GridError, NetworkCase};
use crate::rng::derive_seed;
use crate::uncertainty::{
    forecast_scenario, generate_scenarios, reduce_scenarios, write_scenarios_csv, ScenarioSet,
    UncertaintyError,
};

/// Stream tags for the seeds derived from the study seed.
const TAG_COA: u64 = 0x0c0a;
const TAG_OUT_OF_SAMPLE: u64 = 0x0005;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid run configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stochastic,
    Deterministic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Stochastic => f.write_str("stochastic"),
            Mode::Deterministic => f.write_str("deterministic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub case_path: PathBuf,
    /// Master seed: training scenarios use it directly, the optimizer and
    /// the out-of-sample set use seeds derived from it.
    pub seed: u64,
    pub n_generate: usize,
    pub n_reduced: usize,
    /// Size of the fresh out-of-sample scenario set.
    pub n_out_of_sample: usize,
    pub mode: Mode,
    /// Optimizer parameters; the `seed` field is replaced by a seed derived
    /// from the study seed.
    pub coa: CoaParams,
    /// Optional override of the case weights (H1, H2).
    pub weights_override: Option<(f64, f64)>,
}

impl RunConfig {
    pub fn new(case_path: impl Into<PathBuf>, seed: u64) -> Self {
        RunConfig {
            case_path: case_path.into(),
            seed,
            n_generate: 1000,
            n_reduced: 30,
            n_out_of_sample: 1000,
            mode: Mode::Stochastic,
            coa: CoaParams::default(),
            weights_override: None,
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.n_generate == 0 || self.n_reduced == 0 || self.n_reduced > self.n_generate {
            return Err(PipelineError::BadConfig(format!(
                "need 1 <= n_reduced <= n_generate, got {} and {}",
                self.n_reduced, self.n_generate
            )));
        }
        if self.n_out_of_sample == 0 {
            return Err(PipelineError::BadConfig(
                "n_out_of_sample must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one study run.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub mode: Mode,
    pub schedule: DispatchSchedule,
    /// Report on the training scenario set.
    pub in_sample: EvaluationReport,
    /// Report on the fresh out-of-sample set.
    pub out_of_sample: EvaluationReport,
    pub optimizer: OptResult,
    pub training_seed: u64,
    pub out_of_sample_seed: u64,
    pub wall_clock: Duration,
    /// The full generated pool and the training set actually optimized on.
    pub scenarios_full: ScenarioSet,
    pub scenarios_training: ScenarioSet,
}

/// Serialized study summary (`report.json`). Wall-clock time is deliberately
/// not included so identical runs produce identical files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyReport {
    pub mode: Mode,
    pub training_seed: u64,
    pub out_of_sample_seed: u64,
    pub best_fitness: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub in_sample: EvaluationReport,
    pub out_of_sample: EvaluationReport,
}

/// Run a study without touching the filesystem.
pub fn run_study_core(cfg: &RunConfig, case: &NetworkCase) -> Result<StudyResult, PipelineError> {
    cfg.validate()?;
    let started = Instant::now();

    let mut case = case.clone();
    if let Some((h1, h2)) = cfg.weights_override {
        case.weights.h1 = h1;
        case.weights.h2 = h2;
    }
    let case = &case;

    let scenarios_full = generate_scenarios(case, cfg.n_generate, cfg.seed)?;
    let scenarios_training = match cfg.mode {
        Mode::Stochastic => reduce_scenarios(&scenarios_full, cfg.n_reduced)?,
        Mode::Deterministic => ScenarioSet {
            scenarios: vec![forecast_scenario(case)],
            seed: Some(cfg.seed),
            steps: case.horizon.steps,
        },
    };

    let (lower, upper) = DispatchSchedule::genome_bounds(case);
    let mut coa = cfg.coa.clone();
    coa.seed = derive_seed(cfg.seed, &[TAG_COA]);
    let training = &scenarios_training;
    let objective = |x: &[f64]| -> f64 {
        let schedule = match DispatchSchedule::from_genome(case, x) {
            Ok(s) => s,
            Err(_) => return NON_FINITE_FITNESS,
        };
        match evaluate_schedule(case, &schedule, training) {
            Ok(report) => report.z,
            Err(_) => NON_FINITE_FITNESS,
        }
    };
    let optimizer = optimize(objective, &lower, &upper, &coa);
    let schedule = DispatchSchedule::from_genome(case, &optimizer.best_position)?;

    let in_sample = evaluate_schedule(case, &schedule, training)?;

    let oos_seed = derive_seed(cfg.seed, &[TAG_OUT_OF_SAMPLE]);
    assert_ne!(oos_seed, cfg.seed, "out-of-sample seed must differ");
    let oos_set = generate_scenarios(case, cfg.n_out_of_sample, oos_seed)?;
    let out_of_sample = evaluate_schedule(case, &schedule, &oos_set)?;

    Ok(StudyResult {
        mode: cfg.mode,
        schedule,
        in_sample,
        out_of_sample,
        optimizer,
        training_seed: cfg.seed,
        out_of_sample_seed: oos_seed,
        wall_clock: started.elapsed(),
        scenarios_full,
        scenarios_training,
    })
}

/// Run a study and write the full artifact set into `out_dir`:
/// `scenarios_full.csv`, `scenarios_reduced.csv`, `schedule.json`,
/// `report.json`, `per_scenario.csv`, `per_hour.csv`, `convergence.csv` and
/// `run_config.json`. A `FAILED` marker file is left behind when a stage
/// fails after the directory was created.
pub fn run_study(cfg: &RunConfig, out_dir: &Path) -> Result<StudyResult, PipelineError> {
    std::fs::create_dir_all(out_dir)?;
    match run_study_inner(cfg, out_dir) {
        Ok(result) => Ok(result),
        Err(err) => {
            let _ = std::fs::write(out_dir.join("FAILED"), format!("{err}\n"));
            Err(err)
        }
    }
}

fn run_study_inner(cfg: &RunConfig, out_dir: &Path) -> Result<StudyResult, PipelineError> {
    let case = load_case(&cfg.case_path)?;
    let result = run_study_core(cfg, &case)?;

    write_scenarios_csv(&result.scenarios_full, &out_dir.join("scenarios_full.csv"))
        .map_err(PipelineError::from)?;
    write_scenarios_csv(
        &result.scenarios_training,
        &out_dir.join("scenarios_reduced.csv"),
    )?;
    write_json(&out_dir.join("schedule.json"), &result.schedule)?;
    let report = StudyReport {
        mode: result.mode,
        training_seed: result.training_seed,
        out_of_sample_seed: result.out_of_sample_seed,
        best_fitness: result.optimizer.best_fitness,
        evaluations: result.optimizer.evaluations,
        converged: result.optimizer.converged,
        in_sample: result.in_sample.clone(),
        out_of_sample: result.out_of_sample.clone(),
    };
    write_json(&out_dir.join("report.json"), &report)?;
    write_per_scenario_csv(&result.out_of_sample, &out_dir.join("per_scenario.csv"))?;
    write_per_hour_csv(&result.in_sample, &out_dir.join("per_hour.csv"))?;
    write_convergence_csv(&result.optimizer.history, &out_dir.join("convergence.csv"))?;
    let mut echo = cfg.clone();
    echo.coa.seed = derive_seed(cfg.seed, &[TAG_COA]);
    write_json(&out_dir.join("run_config.json"), &echo)?;
    // Remove a stale failure marker from a previous attempt.
    let _ = std::fs::remove_file(out_dir.join("FAILED"));
    Ok(result)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Per-scenario breakdown CSV (out-of-sample distribution of the report).
pub fn write_per_scenario_csv(
    report: &EvaluationReport,
    path: &Path,
) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["scenario_id", "prob", "f1", "f2", "ens", "losses_kwh", "penalty"])?;
    for s in &report.scenarios {
        w.write_record([
            s.scenario_id.to_string(),
            s.probability.to_string(),
            s.f1.to_string(),
            s.f2.to_string(),
            s.ens_kwh.to_string(),
            s.loss_kwh.to_string(),
            s.penalty.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-hour expectations CSV: expected dispatch per unit, grid exchange,
/// loss, and the voltage envelope.
pub fn write_per_hour_csv(report: &EvaluationReport, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["hour".to_string()];
    for label in &report.unit_labels {
        header.push(format!("{label}_kw"));
    }
    header.extend(
        ["grid_kw", "loss_kw", "v_min_pu", "v_max_pu"]
            .iter()
            .map(|s| s.to_string()),
    );
    w.write_record(&header)?;
    let steps = report.hourly.grid_kw.len();
    for t in 0..steps {
        let mut row = vec![t.to_string()];
        for unit in &report.hourly.dispatch_kw {
            row.push(unit[t].to_string());
        }
        row.push(report.hourly.grid_kw[t].to_string());
        row.push(report.hourly.loss_kw[t].to_string());
        row.push(report.hourly.v_min[t].to_string());
        row.push(report.hourly.v_max[t].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Optimizer convergence history CSV.
pub fn write_convergence_csv(
    history: &[IterationStats],
    path: &Path,
) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["iteration", "best_fitness", "mean_fitness", "evaluations"])?;
    for s in history {
        w.write_record([
            s.iteration.to_string(),
            s.best_fitness.to_string(),
            s.mean_fitness.to_string(),
            s.evaluations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the mode comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareRow {
    pub seed: u64,
    pub stochastic_in_sample_z: f64,
    pub stochastic_out_of_sample_z: f64,
    pub deterministic_in_sample_z: f64,
    pub deterministic_out_of_sample_z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub mean_stochastic_out_of_sample_z: f64,
    pub mean_deterministic_out_of_sample_z: f64,
}

/// Run both modes for every seed and score them on fresh out-of-sample
/// scenario sets.
pub fn compare_modes(cfg: &RunConfig, seeds: &[u64]) -> Result<Comparison, PipelineError> {
    if seeds.is_empty() {
        return Err(PipelineError::BadConfig("need at least one seed".into()));
    }
    let case = load_case(&cfg.case_path)?;
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let mut stoch_cfg = cfg.clone();
        stoch_cfg.seed = seed;
        stoch_cfg.mode = Mode::Stochastic;
        let stoch = run_study_core(&stoch_cfg, &case)?;
        let mut det_cfg = stoch_cfg.clone();
        det_cfg.mode = Mode::Deterministic;
        let det = run_study_core(&det_cfg, &case)?;
        rows.push(CompareRow {
            seed,
            stochastic_in_sample_z: stoch.in_sample.z,
            stochastic_out_of_sample_z: stoch.out_of_sample.z,
            deterministic_in_sample_z: det.in_sample.z,
            deterministic_out_of_sample_z: det.out_of_sample.z,
        });
    }
    let n = rows.len() as f64;
    Ok(Comparison {
        mean_stochastic_out_of_sample_z: rows
            .iter()
            .map(|r| r.stochastic_out_of_sample_z)
            .sum::<f64>()
            / n,
        mean_deterministic_out_of_sample_z: rows
            .iter()
            .map(|r| r.deterministic_out_of_sample_z)
            .sum::<f64>()
            / n,
        rows,
    })
}

/// Comparison CSV: one row per seed plus a trailing `mean` row.
pub fn write_comparison_csv(comparison: &Comparison, path: &Path) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "seed",
        "stochastic_in_sample_z",
        "stochastic_out_of_sample_z",
        "deterministic_in_sample_z",
        "deterministic_out_of_sample_z",
    ])?;
    for r in &comparison.rows {
        w.write_record([
            r.seed.to_string(),
            r.stochastic_in_sample_z.to_string(),
            r.stochastic_out_of_sample_z.to_string(),
            r.deterministic_in_sample_z.to_string(),
            r.deterministic_out_of_sample_z.to_string(),
        ])?;
    }
    w.write_record([
        "mean".to_string(),
        "".to_string(),
        comparison.mean_stochastic_out_of_sample_z.to_string(),
        "".to_string(),
        comparison.mean_deterministic_out_of_sample_z.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// Re-render the CSV summaries from a previously written `report.json`.
pub fn rerender_reports(dir: &Path) -> Result<StudyReport, PipelineError> {
    let text = std::fs::read_to_string(dir.join("report.json"))?;
    let report: StudyReport = serde_json::from_str(&text)?;
    write_per_scenario_csv(&report.out_of_sample, &dir.join("per_scenario.csv"))?;
    write_per_hour_csv(&report.in_sample, &dir.join("per_hour.csv"))?;
    Ok(report)
}

/// Short human-readable study summary.
pub fn summarize(report: &StudyReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "mode:            {}", report.mode)?;
    writeln!(out, "training seed:   {}", report.training_seed)?;
    writeln!(out, "best fitness Z:  {:.6}", report.best_fitness)?;
    writeln!(out, "evaluations:     {}", report.evaluations)?;
    writeln!(out, "converged:       {}", report.converged)?;
    let is = &report.in_sample;
    let oos = &report.out_of_sample;
    writeln!(out, "in-sample:       Z = {:.4}  E[F1] = {:.4}  E[F2] = {:.4}  E[pen] = {:.4}",
        is.z, is.expected.f1, is.expected.f2, is.expected.penalty)?;
    writeln!(out, "out-of-sample:   Z = {:.4}  E[F1] = {:.4}  E[F2] = {:.4}  E[pen] = {:.4}",
        oos.z, oos.expected.f1, oos.expected.f2, oos.expected.penalty)?;
    writeln!(out, "reliability:     AENS = {:.4} kWh/day  EIR = {:.6}", oos.aens_kwh, oos.eir)?;
    writeln!(out, "feasible (oos):  {}", oos.feasible)?;
    Ok(())
}
