//! Score a hand-written dispatch schedule on the LV fixture over a reduced
//! scenario set and print the objective breakdown.

use microdispatch::evaluate::{evaluate_schedule, soc_trajectory, DispatchSchedule};
use microdispatch::grid::{fixture_path, load_case, DerKindTag};
use microdispatch::uncertainty::{generate_scenarios, reduce_scenarios};

fn main() -> anyhow::Result<()> {
    let case = load_case(fixture_path("lv_microgrid.json"))?;
    let set = reduce_scenarios(&generate_scenarios(&case, 500, 3)?, 20)?;

    // A plausible manual plan: CHP follows the commercial day shape, the
    // battery charges at night and discharges over the evening peak,
    // returning close to its initial state of charge.
    let mut schedule = DispatchSchedule::zeros(&case);
    for t in 0..24 {
        schedule.chp_kw[0][t] = match t {
            0..=6 => 20.0,
            7..=17 => 140.0,
            18..=22 => 180.0,
            _ => 40.0,
        };
        schedule.ess_kw[0][t] = match t {
            1..=5 => -20.0,  // charge
            18..=22 => 17.0, // discharge
            _ => 0.0,
        };
    }

    let report = evaluate_schedule(&case, &schedule, &set)?;
    let e = &report.expected;
    println!("expected costs over {} scenarios ($/day):", set.len());
    println!("  fuel        {:>10.2}", e.fuel_cost);
    println!("  O&M         {:>10.2}", e.om_cost);
    println!("  emission    {:>10.2}  ({:.1} kg)", e.emission_cost, e.emission_kg);
    println!("  losses      {:>10.2}  ({:.1} kWh)", e.loss_cost, e.loss_kwh);
    println!("  grid        {:>10.2}  ({:.1} kWh net import)", e.grid_cost, e.grid_import_kwh);
    println!("  F1          {:>10.2}", e.f1);
    println!("  F2          {:>10.2}  (AENS {:.3} kWh/day, EIR {:.6})", e.f2, report.aens_kwh, report.eir);
    println!("  penalties   {:>10.2}", e.penalty);
    println!("  Z           {:>10.2}  feasible: {}", report.z, report.feasible);

    let ess_unit = case.units_of_kind(DerKindTag::Ess)[0];
    let soc = soc_trajectory(&case, ess_unit, &schedule.ess_kw[0]);
    println!("\nbattery SOC trajectory (kWh):");
    for (t, s) in soc.iter().enumerate().step_by(3) {
        println!("  after hour {t:>2}: {s:>7.1}");
    }

    println!("\nhour  E[grid kW]  E[loss kW]  v_min    v_max");
    for t in (0..24).step_by(3) {
        println!(
            "{t:>4}  {:>10.1}  {:>10.2}  {:.4}  {:.4}",
            report.hourly.grid_kw[t],
            report.hourly.loss_kw[t],
            report.hourly.v_min[t],
            report.hourly.v_max[t]
        );
    }
    Ok(())
}
