//! Quadratic exterior penalties for operating constraints, plus the fixed
//! penalty for diverged power flows.

use serde::{Deserialize, Serialize};

use crate::grid::{DerKindTag, DerParams, NetworkCase};
use crate::powerflow::FlowSolution;

use super::schedule::DispatchSchedule;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    /// Unit setpoints outside their capacity limits.
    pub unit_limits: f64,
    /// CHP hour-to-hour ramping beyond the declared limit.
    pub ramp: f64,
    /// Storage state of charge outside its band.
    pub soc_bounds: f64,
    /// Terminal SOC away from the initial SOC beyond the allowed band.
    pub soc_terminal: f64,
    /// Tie-line exchange beyond the limit.
    pub grid_tie: f64,
    /// Bus voltages outside the allowed band.
    pub voltage: f64,
    /// Fixed penalty per diverged hourly power flow.
    pub divergence: f64,
}

impl PenaltyBreakdown {
    pub fn total(&self) -> f64 {
        self.unit_limits
            + self.ramp
            + self.soc_bounds
            + self.soc_terminal
            + self.grid_tie
            + self.voltage
            + self.divergence
    }
}

/// State-of-charge trajectory for one ESS unit under its signed schedule
/// row; entry `t` is the SOC after hour `t`. Uses the SOC recursion
/// directly so that out-of-limit setpoints still produce a trajectory for
/// the penalty terms.
pub fn soc_trajectory(case: &NetworkCase, ess_unit: usize, signed_kw: &[f64]) -> Vec<f64> {
    let DerParams::Ess(p) = &case.ders[ess_unit].params else {
        panic!("unit {ess_unit} is not an ESS");
    };
    let dt = case.horizon.dt;
    let mut soc = p.soc_init;
    signed_kw
        .iter()
        .map(|&x| {
            let charge = (-x).max(0.0);
            let discharge = x.max(0.0);
            soc += p.eta_ch * charge * dt - discharge * dt / p.eta_dis;
            soc
        })
        .collect()
}

/// All penalty terms for one scenario's hourly flow solutions (`None` marks
/// a diverged hour).
pub fn constraint_penalties(
    case: &NetworkCase,
    schedule: &DispatchSchedule,
    hours: &[Option<FlowSolution>],
) -> PenaltyBreakdown {
    let rho = case.limits.penalty_weight;
    let mut out = PenaltyBreakdown::default();

    // Unit capacity limits (structurally satisfied by the genome bounds,
    // checked anyway) and CHP ramping.
    let chp_units = case.units_of_kind(DerKindTag::Chp);
    for (row, &u) in schedule.chp_kw.iter().zip(&chp_units) {
        let der = &case.ders[u];
        for &p in row {
            let excess = (der.p_min - p).max(0.0) + (p - der.p_max).max(0.0);
            out.unit_limits += rho * excess * excess;
        }
        if let DerParams::Chp(params) = &der.params {
            if let Some(ramp) = params.ramp {
                let allowed = ramp * case.horizon.dt;
                for w in row.windows(2) {
                    let excess = ((w[1] - w[0]).abs() - allowed).max(0.0);
                    out.ramp += rho * excess * excess;
                }
            }
        }
    }

    let ess_units = case.units_of_kind(DerKindTag::Ess);
    for (row, &u) in schedule.ess_kw.iter().zip(&ess_units) {
        let DerParams::Ess(params) = &case.ders[u].params else {
            continue;
        };
        for &x in row {
            let excess = (-params.p_ch_max - x).max(0.0).abs() + (x - params.p_dis_max).max(0.0);
            out.unit_limits += rho * excess * excess;
        }
        let soc = soc_trajectory(case, u, row);
        for &s in &soc {
            let excess = (params.soc_min - s).max(0.0) + (s - params.soc_max).max(0.0);
            out.soc_bounds += rho * excess * excess;
        }
        if let Some(&terminal) = soc.last() {
            let band = case.limits.soc_terminal_band * params.capacity;
            let excess = ((terminal - params.soc_init).abs() - band).max(0.0);
            out.soc_terminal += rho * excess * excess;
        }
    }

    for hour in hours {
        match hour {
            None => out.divergence += case.limits.divergence_penalty,
            Some(sol) => {
                if let Some(tie) = case.limits.grid_tie_kw {
                    let excess = (sol.slack_p_kw.abs() - tie).max(0.0);
                    out.grid_tie += rho * excess * excess;
                }
                for &v in &sol.v_pu {
                    let excess =
                        (case.limits.v_min_pu - v).max(0.0) + (v - case.limits.v_max_pu).max(0.0);
                    out.voltage += rho * excess * excess;
                }
            }
        }
    }

    out
}
