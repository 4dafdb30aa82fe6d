//! Solve the 69-bus feeder at nominal load with the backward/forward sweep.

use microdispatch::grid::{fixture_path, load_case};
use microdispatch::powerflow::{
    conservation_residual_pu, solve_radial, total_losses, InjectionVector,
};

fn main() -> anyhow::Result<()> {
    let case = load_case(fixture_path("feeder69.json"))?;
    let n = case.n_buses();

    // Nominal load at hour 0, no generation.
    let mut inj = InjectionVector::zeros(n);
    let mut load_p = 0.0;
    for i in 0..n {
        let (p, q) = case.bus_load_kw(i, 0);
        inj.add(i, -p, -q);
        load_p += p;
    }

    let sol = solve_radial(&case, &inj)?;
    println!(
        "converged in {} iterations; total load {:.1} kW",
        sol.iterations, load_p
    );
    println!("total losses: {:.2} kW", total_losses(&sol)?);
    println!("slack import: {:.2} kW, {:.2} kVAr", sol.slack_p_kw, sol.slack_q_kvar);

    let (vmin_bus, vmin) = sol
        .v_pu
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    println!(
        "minimum voltage: {:.5} pu at bus {}",
        vmin, case.buses[vmin_bus].id
    );
    println!(
        "power balance residual: {:.2e} pu",
        conservation_residual_pu(&case, &inj, &sol)
    );

    println!("\nvoltage profile along the main trunk:");
    for bus in [0usize, 4, 8, 11, 16, 20, 26] {
        println!("  bus {:>2}: {:.5} pu", case.buses[bus].id, sol.v_pu[bus]);
    }
    Ok(())
}
