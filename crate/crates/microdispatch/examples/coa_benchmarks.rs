//! Cuckoo optimization on two classic test functions.

use microdispatch::coa::{optimize, CoaParams};

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn rastrigin(x: &[f64]) -> f64 {
    10.0 * x.len() as f64
        + x.iter()
            .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
            .sum::<f64>()
}

fn main() {
    println!("2-D sphere, 5000 evaluations:");
    let params = CoaParams {
        alpha_elr: 0.5,
        max_evaluations: Some(5000),
        max_iterations: 1000,
        convergence_window: 1000,
        seed: 1,
        ..CoaParams::default()
    };
    let r = optimize(sphere, &[-5.0, -5.0], &[5.0, 5.0], &params);
    println!(
        "  best {:.3e} at ({:+.2e}, {:+.2e}) after {} evaluations",
        r.best_fitness, r.best_position[0], r.best_position[1], r.evaluations
    );
    for s in r.history.iter().step_by(6) {
        println!("  iter {:>3}: best {:.3e}  mean {:.3e}", s.iteration, s.best_fitness, s.mean_fitness);
    }

    println!("\n10-D Rastrigin with heavy-tailed escape kicks:");
    let params = CoaParams {
        heavy_tail_perturbation: true,
        max_evaluations: Some(100_000),
        max_iterations: 10_000,
        convergence_window: 10_000,
        seed: 8,
        ..CoaParams::default()
    };
    let lo = vec![-5.12; 10];
    let hi = vec![5.12; 10];
    let r = optimize(rastrigin, &lo, &hi, &params);
    let init = r.history[0].best_fitness;
    println!(
        "  initial best {:.2} -> final {:.4} ({:.2} % improvement, {} evaluations)",
        init,
        r.best_fitness,
        100.0 * (init - r.best_fitness) / init,
        r.evaluations
    );
}
