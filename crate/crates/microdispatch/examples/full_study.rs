//! Run the complete study pipeline on the LV fixture with a small budget
//! and show where the artifacts land.
//!
//! The `microdispatch dispatch` subcommand runs the same pipeline from the
//! command line.

use microdispatch::grid::fixture_path;
use microdispatch::pipeline::{run_study, Mode, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut cfg = RunConfig::new(fixture_path("lv_microgrid.json"), 7);
    cfg.n_generate = 300;
    cfg.n_reduced = 20;
    cfg.n_out_of_sample = 300;
    cfg.mode = Mode::Stochastic;
    cfg.coa.max_iterations = 60;

    let out_dir = std::env::temp_dir().join("microdispatch_study");
    let result = run_study(&cfg, &out_dir)?;

    println!(
        "{} study finished in {:.2?} ({} objective evaluations)",
        result.mode, result.wall_clock, result.optimizer.evaluations
    );
    println!("in-sample Z:     {:.4}", result.in_sample.z);
    println!("out-of-sample Z: {:.4}", result.out_of_sample.z);
    println!(
        "out-of-sample    E[F1] {:.2}  E[F2] {:.2}  E[penalty] {:.2}  EIR {:.6}",
        result.out_of_sample.expected.f1,
        result.out_of_sample.expected.f2,
        result.out_of_sample.expected.penalty,
        result.out_of_sample.eir
    );

    println!("\nCHP setpoints (kW):");
    let row = &result.schedule.chp_kw[0];
    for t in (0..row.len()).step_by(4) {
        println!("  hour {t:>2}: {:>7.1}", row[t]);
    }

    println!("\nartifacts:");
    let mut names: Vec<_> = std::fs::read_dir(&out_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {}", out_dir.join(name).display());
    }
    Ok(())
}
