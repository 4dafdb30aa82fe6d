//! Compare scheduling against the reduced scenario set with scheduling
//! against the single point forecast, scored on fresh out-of-sample
//! scenarios.

use microdispatch::grid::fixture_path;
use microdispatch::pipeline::{compare_modes, RunConfig};

fn main() -> anyhow::Result<()> {
    let mut cfg = RunConfig::new(fixture_path("lv_microgrid.json"), 0);
    cfg.n_generate = 300;
    cfg.n_reduced = 20;
    cfg.n_out_of_sample = 300;
    cfg.coa.max_iterations = 60;

    let seeds = [1u64, 2, 3];
    println!("running both modes for seeds {seeds:?} (a minute or so)...\n");
    let comparison = compare_modes(&cfg, &seeds)?;

    println!("seed  stochastic oos Z  deterministic oos Z");
    for row in &comparison.rows {
        println!(
            "{:<5} {:>16.2} {:>20.2}",
            row.seed, row.stochastic_out_of_sample_z, row.deterministic_out_of_sample_z
        );
    }
    println!(
        "mean  {:>16.2} {:>20.2}",
        comparison.mean_stochastic_out_of_sample_z, comparison.mean_deterministic_out_of_sample_z
    );
    println!(
        "\nthe deterministic plan never sees the load tails, so tie-line and \
         voltage penalties hit it much harder out of sample"
    );
    Ok(())
}
