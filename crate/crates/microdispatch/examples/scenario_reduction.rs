//! Backward-reduce 1000 scenarios to 30 and report how well the reduced set
//! preserves the hourly expectations.

use microdispatch::grid::{fixture_path, load_case};
use microdispatch::uncertainty::{generate_scenarios, reduce_scenarios, reduction_fidelity};

fn main() -> anyhow::Result<()> {
    let case = load_case(fixture_path("lv_microgrid.json"))?;
    let full = generate_scenarios(&case, 1000, 7)?;
    let t0 = std::time::Instant::now();
    let reduced = reduce_scenarios(&full, 30)?;
    println!(
        "reduced {} -> {} scenarios in {:.2?} (total probability {:.12})",
        full.len(),
        reduced.len(),
        t0.elapsed(),
        reduced.total_probability()
    );

    let probs: Vec<f64> = reduced.scenarios.iter().map(|s| s.probability).collect();
    let pmax = probs.iter().cloned().fold(0.0, f64::max);
    let pmin = probs.iter().cloned().fold(1.0, f64::min);
    println!("survivor probabilities range from {pmin:.4} to {pmax:.4}");

    println!("\nfidelity of hourly means:");
    let report = reduction_fidelity(&full, &reduced)?;
    for q in &report.quantities {
        println!(
            "  {:<15} max |err| {:.5}  mean |err| {:.5}  max rel {:.3} %  cv {:.4} %",
            q.quantity,
            q.max_abs_error,
            q.mean_abs_error,
            100.0 * q.max_rel_error,
            100.0 * q.cv
        );
    }
    Ok(())
}
