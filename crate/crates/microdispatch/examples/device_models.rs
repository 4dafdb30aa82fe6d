//! Exercise the DER device models: wind power curve, PV output, CHP fuel
//! rate and battery SOC stepping.

use microdispatch::der::{
    chp_fuel_rate, ess_step, pv_power, wt_power, ChpParams, EssParams, PvParams, WtParams,
};

fn main() -> anyhow::Result<()> {
    let wt = WtParams::new(250.0, 2.0, 14.0, 25.0)?;
    println!("wind turbine power curve (250 kW, cut-in 2, rated 14, cut-out 25 m/s):");
    for v in [0.0, 2.0, 5.0, 8.0, 11.0, 14.0, 20.0, 25.0, 26.0] {
        println!("  v = {v:>4.1} m/s -> {:>6.1} kW", wt_power(v, &wt));
    }

    let pv = PvParams {
        p_stc: 250.0,
        g_stc: 1000.0,
        k: 0.001,
        t_ref: 25.0,
    };
    println!("\nPV output (250 kW at STC):");
    for (g, t) in [(1000.0, 25.0), (1000.0, 35.0), (600.0, 30.0), (0.0, 20.0)] {
        println!("  G = {g:>6.0} W/m2, T = {t:>4.1} C -> {:>6.1} kW", pv_power(g, t, &pv));
    }

    let chp = ChpParams {
        theta: 0.0001,
        rho: 0.25,
        gamma: 1.2,
        efficiency: 0.35,
        heat_to_electric: 1.2,
        ramp: None,
        p_min: 0.0,
        p_max: 200.0,
    };
    println!("\nCHP fuel rate (quadratic):");
    for p in [0.0, 50.0, 100.0, 200.0] {
        println!("  P = {p:>5.0} kW -> {:>6.2} fuel/h", chp_fuel_rate(p, &chp)?);
    }

    let ess = EssParams {
        capacity: 250.0,
        soc_min: 25.0,
        soc_max: 225.0,
        soc_init: 125.0,
        p_ch_max: 60.0,
        p_dis_max: 60.0,
        eta_ch: 0.95,
        eta_dis: 0.95,
    };
    println!("\nbattery round trip from {} kWh:", ess.soc_init);
    let charged = ess_step(ess.soc_init, 40.0, 0.0, 1.0, &ess)?;
    println!("  charge 40 kW for 1 h  -> SOC {charged:.2} kWh");
    let discharged = ess_step(charged, 0.0, 36.1, 1.0, &ess)?;
    println!("  discharge 36.1 kW 1 h -> SOC {discharged:.2} kWh");
    println!(
        "  round-trip efficiency {:.1} %",
        100.0 * 36.1 / 40.0
    );
    Ok(())
}
