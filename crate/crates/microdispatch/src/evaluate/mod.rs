//! Schedule evaluation: turns a candidate dispatch plus a scenario set into
//! the scalar objective `Z = H1*E[F1] + H2*E[F2] + E[penalties]` with a full
//! per-scenario and per-hour breakdown.
//!
//! F1 is the operating cost (CHP fuel with heat credit, O&M, priced
//! emissions, priced losses, grid exchange at the hourly tariff); F2 is the
//! interruption cost from the reliability model. Grid exchange is the
//! per-scenario recourse: each hour's imbalance is settled at the slack bus.

mod cost;
mod penalty;
mod reliability;
mod schedule;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::der::{pv_power, wt_power};
use crate::grid::{DerKindTag, DerParams, NetworkCase};
use crate::powerflow::{solve_radial, FlowSolution, InjectionVector, PowerFlowError};
use crate::uncertainty::{Scenario, ScenarioSet};

pub use cost::{chp_fuel_cost, emission_mass, om_cost};
pub use penalty::{constraint_penalties, soc_trajectory, PenaltyBreakdown};
pub use reliability::{
    branch_fault_partition, reliability_cost, FaultPartition, ReliabilityOutcome,
};
pub use schedule::DispatchSchedule;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("setpoint {value} kW outside [{min}, {max}] kW")]
    OutOfRange { value: f64, min: f64, max: f64 },
    #[error("emission exponent {exponent} too large")]
    EmissionOverflow { exponent: f64 },
}

/// Cost and reliability outcome of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub scenario_id: u64,
    pub probability: f64,
    pub fuel_cost: f64,
    pub om_cost: f64,
    pub emission_kg: f64,
    pub emission_cost: f64,
    pub loss_kwh: f64,
    pub loss_cost: f64,
    /// Net energy imported from the grid over the day, kWh.
    pub grid_import_kwh: f64,
    pub grid_cost: f64,
    pub ens_kwh: f64,
    pub reliability_cost: f64,
    pub demand_kwh: f64,
    pub f1: f64,
    pub f2: f64,
    pub penalty: f64,
    pub penalty_breakdown: PenaltyBreakdown,
    pub all_hours_converged: bool,
}

/// Probability-weighted expectations of the scenario outcomes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValues {
    pub fuel_cost: f64,
    pub om_cost: f64,
    pub emission_kg: f64,
    pub emission_cost: f64,
    pub loss_kwh: f64,
    pub loss_cost: f64,
    pub grid_import_kwh: f64,
    pub grid_cost: f64,
    pub ens_kwh: f64,
    pub reliability_cost: f64,
    pub demand_kwh: f64,
    pub f1: f64,
    pub f2: f64,
    pub penalty: f64,
}

/// Per-hour expectations and voltage envelope across scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyAggregate {
    /// Expected output per DER unit (case order) per hour, kW; signed for
    /// storage.
    pub dispatch_kw: Vec<Vec<f64>>,
    /// Expected net grid import per hour, kW.
    pub grid_kw: Vec<f64>,
    /// Expected network loss per hour, kW.
    pub loss_kw: Vec<f64>,
    /// Lowest bus voltage seen in any scenario, per hour.
    pub v_min: Vec<f64>,
    /// Highest bus voltage seen in any scenario, per hour.
    pub v_max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scenarios: Vec<ScenarioOutcome>,
    pub expected: ExpectedValues,
    /// Probability-weighted unsupplied energy, kWh/day.
    pub aens_kwh: f64,
    /// Energy index of reliability: 1 - AENS / expected demand.
    pub eir: f64,
    pub z: f64,
    pub feasible: bool,
    pub unit_labels: Vec<String>,
    pub hourly: HourlyAggregate,
}

/// Per-scenario hourly traces used for aggregation.
struct ScenarioHourly {
    dispatch_kw: Vec<Vec<f64>>,
    grid_kw: Vec<f64>,
    loss_kw: Vec<f64>,
    v_min: Vec<f64>,
    v_max: Vec<f64>,
}

/// Evaluate a schedule over a scenario set.
///
/// Pure function of its arguments; scenarios are evaluated in parallel and
/// reduced in a fixed order, so the report is bitwise reproducible.
pub fn evaluate_schedule(
    case: &NetworkCase,
    schedule: &DispatchSchedule,
    set: &ScenarioSet,
) -> Result<EvaluationReport, EvalError> {
    schedule.check_dims(case)?;
    if set.steps != case.horizon.steps {
        return Err(EvalError::DimensionMismatch(format!(
            "scenario set has {} hours, case horizon has {}",
            set.steps, case.horizon.steps
        )));
    }

    let partitions: Vec<FaultPartition> = case
        .branches
        .iter()
        .map(|b| branch_fault_partition(case, b.id).expect("branch ids are known"))
        .collect();

    let results: Vec<(ScenarioOutcome, ScenarioHourly)> = set
        .scenarios
        .par_iter()
        .map(|s| evaluate_scenario(case, schedule, s, &partitions))
        .collect::<Result<_, _>>()?;

    let steps = case.horizon.steps;
    let n_units = case.ders.len();
    let mut expected = ExpectedValues::default();
    let mut hourly = HourlyAggregate {
        dispatch_kw: vec![vec![0.0; steps]; n_units],
        grid_kw: vec![0.0; steps],
        loss_kw: vec![0.0; steps],
        v_min: vec![f64::INFINITY; steps],
        v_max: vec![f64::NEG_INFINITY; steps],
    };
    let mut scenarios = Vec::with_capacity(results.len());
    let mut all_converged = true;
    for (outcome, trace) in results {
        let p = outcome.probability;
        expected.fuel_cost += p * outcome.fuel_cost;
        expected.om_cost += p * outcome.om_cost;
        expected.emission_kg += p * outcome.emission_kg;
        expected.emission_cost += p * outcome.emission_cost;
        expected.loss_kwh += p * outcome.loss_kwh;
        expected.loss_cost += p * outcome.loss_cost;
        expected.grid_import_kwh += p * outcome.grid_import_kwh;
        expected.grid_cost += p * outcome.grid_cost;
        expected.ens_kwh += p * outcome.ens_kwh;
        expected.reliability_cost += p * outcome.reliability_cost;
        expected.demand_kwh += p * outcome.demand_kwh;
        expected.f1 += p * outcome.f1;
        expected.f2 += p * outcome.f2;
        expected.penalty += p * outcome.penalty;
        all_converged &= outcome.all_hours_converged;

        for (u, row) in trace.dispatch_kw.iter().enumerate() {
            for t in 0..steps {
                hourly.dispatch_kw[u][t] += p * row[t];
            }
        }
        for t in 0..steps {
            hourly.grid_kw[t] += p * trace.grid_kw[t];
            hourly.loss_kw[t] += p * trace.loss_kw[t];
            hourly.v_min[t] = hourly.v_min[t].min(trace.v_min[t]);
            hourly.v_max[t] = hourly.v_max[t].max(trace.v_max[t]);
        }
        scenarios.push(outcome);
    }
    for t in 0..steps {
        if !hourly.v_min[t].is_finite() {
            hourly.v_min[t] = f64::NAN;
            hourly.v_max[t] = f64::NAN;
        }
    }

    let aens_kwh = expected.ens_kwh;
    let eir = if expected.demand_kwh > 0.0 {
        1.0 - aens_kwh / expected.demand_kwh
    } else {
        1.0
    };
    let z =
        case.weights.h1 * expected.f1 + case.weights.h2 * expected.f2 + expected.penalty;
    let feasible = all_converged && expected.penalty <= 1e-9;

    Ok(EvaluationReport {
        scenarios,
        expected,
        aens_kwh,
        eir,
        z,
        feasible,
        unit_labels: (0..n_units).map(|u| case.unit_label(u)).collect(),
        hourly,
    })
}

fn evaluate_scenario(
    case: &NetworkCase,
    schedule: &DispatchSchedule,
    scenario: &Scenario,
    partitions: &[FaultPartition],
) -> Result<(ScenarioOutcome, ScenarioHourly), EvalError> {
    let steps = case.horizon.steps;
    let dt = case.horizon.dt;
    let n_units = case.ders.len();
    let chp_units = case.units_of_kind(DerKindTag::Chp);
    let ess_units = case.units_of_kind(DerKindTag::Ess);

    let mut dispatch_kw = vec![vec![0.0; steps]; n_units];
    let mut grid_kw = vec![0.0; steps];
    let mut loss_kw = vec![0.0; steps];
    let mut v_min = vec![f64::INFINITY; steps];
    let mut v_max = vec![f64::NEG_INFINITY; steps];
    let mut hours: Vec<Option<FlowSolution>> = Vec::with_capacity(steps);

    let mut fuel_cost = 0.0;
    let mut om_total = 0.0;
    let mut emission_kg = 0.0;
    let mut loss_kwh = 0.0;
    let mut loss_cost = 0.0;
    let mut grid_import_kwh = 0.0;
    let mut grid_cost = 0.0;

    for t in 0..steps {
        // Unit outputs: renewables sell their maximum available power, the
        // schedule fixes CHP and storage.
        for (u, der) in case.ders.iter().enumerate() {
            let p = match &der.params {
                DerParams::Wt(w) => wt_power(scenario.wind_ms[t], w),
                DerParams::Pv(pv) => {
                    pv_power(scenario.irradiance_wm2[t], case.profiles.ambient_temp[t], pv)
                }
                DerParams::Chp(_) => {
                    let pos = chp_units.iter().position(|&x| x == u).unwrap();
                    schedule.chp_kw[pos][t]
                }
                DerParams::Ess(_) => {
                    let pos = ess_units.iter().position(|&x| x == u).unwrap();
                    schedule.ess_kw[pos][t]
                }
            };
            dispatch_kw[u][t] = p;
        }

        let mut inj = InjectionVector::zeros(case.n_buses());
        let mult = scenario.load_mult[t];
        for i in 0..case.n_buses() {
            let (p, q) = case.bus_load_kw(i, t);
            inj.add(i, -p * mult, -q * mult);
        }
        for (u, der) in case.ders.iter().enumerate() {
            let p = dispatch_kw[u][t];
            let bus = case.bus_idx(der.bus).unwrap();
            inj.add(bus, p, der.reactive_kvar(p));
        }

        let solution = match solve_radial(case, &inj) {
            Ok(sol) if sol.converged => Some(sol),
            Ok(_) => None,
            Err(PowerFlowError::VoltageCollapse { .. }) => None,
            Err(e) => return Err(EvalError::DimensionMismatch(e.to_string())),
        };

        // Costs that do not need a converged flow.
        for (u, der) in case.ders.iter().enumerate() {
            let p = dispatch_kw[u][t];
            match &der.params {
                DerParams::Chp(chp) => {
                    fuel_cost += chp_fuel_cost(p, chp, &case.prices)? * dt;
                    om_total += om_cost(p, der.om_rate, dt);
                    emission_kg += emission_mass(p, &der.emission)? * dt;
                }
                DerParams::Ess(_) => {
                    om_total += om_cost(p.abs(), der.om_rate, dt);
                    emission_kg += emission_mass(p.max(0.0), &der.emission)? * dt;
                }
                DerParams::Wt(_) | DerParams::Pv(_) => {
                    om_total += om_cost(p, der.om_rate, dt);
                    emission_kg += emission_mass(p, &der.emission)? * dt;
                }
            }
        }

        if let Some(sol) = &solution {
            loss_kwh += sol.total_loss_kw * dt;
            loss_cost += sol.total_loss_kw * dt * case.prices.loss_price;
            grid_import_kwh += sol.slack_p_kw * dt;
            grid_cost +=
                sol.slack_p_kw * dt * case.prices.grid_energy_price[t] * scenario.price_mult[t];
            grid_kw[t] = sol.slack_p_kw;
            loss_kw[t] = sol.total_loss_kw;
            for &v in &sol.v_pu {
                v_min[t] = v_min[t].min(v);
                v_max[t] = v_max[t].max(v);
            }
        }
        hours.push(solution);
    }

    let emission_cost = emission_kg * case.prices.emission_price;
    let f1 = fuel_cost + om_total + emission_cost + loss_cost + grid_cost;

    let reliability = reliability::reliability_cost_with(case, scenario, partitions);
    let f2 = case.weights.h_c * reliability.c_aens;

    let breakdown = constraint_penalties(case, schedule, &hours);
    let all_hours_converged = hours.iter().all(|h| h.is_some());

    let outcome = ScenarioOutcome {
        scenario_id: scenario.id,
        probability: scenario.probability,
        fuel_cost,
        om_cost: om_total,
        emission_kg,
        emission_cost,
        loss_kwh,
        loss_cost,
        grid_import_kwh,
        grid_cost,
        ens_kwh: reliability.ens_kwh,
        reliability_cost: reliability.c_aens,
        demand_kwh: reliability.demand_kwh,
        f1,
        f2,
        penalty: breakdown.total(),
        penalty_breakdown: breakdown,
        all_hours_converged,
    };
    let trace = ScenarioHourly {
        dispatch_kw,
        grid_kw,
        loss_kw,
        v_min,
        v_max,
    };
    Ok((outcome, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::test_support::case_from_json;
    use crate::grid::{fixture_path, load_case};
    use crate::uncertainty::forecast_scenario;

    /// Lossless single-bus-pair case: 100 kW flat load and a CHP at the
    /// same bus, zero-impedance branch, one-hour horizon.
    fn chp_only_case(h1: f64, h2: f64, interruption_price: f64, failure_rate: f64) -> NetworkCase {
        case_from_json(&serde_json::json!({
            "base": { "s_base_kva": 1000.0, "v_base_kv": 0.4, "impedance_unit": "pu" },
            "horizon": { "steps": 1, "dt": 1.0 },
            "buses": [
                { "id": 0, "load_p_peak": 0.0, "load_q_peak": 0.0 },
                { "id": 1, "load_p_peak": 100.0, "load_q_peak": 0.0, "load_shape_ref": "flat" }
            ],
            "branches": [
                { "id": 1, "from_bus": 0, "to_bus": 1, "r": 0.0, "x": 0.0,
                  "length": 1.0, "failure_rate": failure_rate }
            ],
            "ders": [
                {
                    "kind": "CHP", "bus": 1, "p_min": 0.0, "p_max": 200.0,
                    "om_rate": 0.01,
                    "emission": { "alpha": 0.0, "beta": 0.02 },
                    "params": {
                        "theta": 0.0, "rho": 0.5, "gamma": 0.0,
                        "efficiency": 0.5, "heat_to_electric": 1.0
                    }
                }
            ],
            "prices": {
                "grid_energy_price": 0.2, "gas_price": 0.3, "heat_credit": 0.0,
                "loss_price": 0.1, "interruption_price": interruption_price,
                "emission_price": 0.05
            },
            "profiles": {
                "load_shapes": { "flat": [1.0] },
                "default_load_shape": "flat",
                "wind_speed": [0.0], "irradiance": [0.0], "ambient_temp": [25.0]
            },
            "weights": { "h1": h1, "h2": h2, "h_c": 1.0 },
            "reliability": { "t_res": 0.0, "t_rep": 4.0 }
        }))
    }

    fn single_scenario(case: &NetworkCase) -> ScenarioSet {
        ScenarioSet {
            scenarios: vec![forecast_scenario(case)],
            seed: None,
            steps: case.horizon.steps,
        }
    }

    #[test]
    fn chp_only_matches_component_sum() {
        let case = chp_only_case(1.0, 1.0, 0.0, 0.0);
        let mut schedule = DispatchSchedule::zeros(&case);
        schedule.chp_kw[0][0] = 100.0;
        let report = evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap();

        // Hand-computed sum: fuel 0.3*100/0.5 = 60, om 0.01*100 = 1,
        // emission 0.02*100 kg * 0.05 $/kg = 0.1; no losses, no grid flow,
        // no reliability (lambda = 0), no penalties.
        let expect = 60.0 + 1.0 + 0.1;
        assert!(
            (report.z - expect).abs() <= 1e-9 * expect,
            "z {} vs {expect}",
            report.z
        );
        assert!((report.expected.f1 - expect).abs() <= 1e-9 * expect);
        assert_eq!(report.expected.f2, 0.0);
        assert_eq!(report.expected.penalty, 0.0);
        assert!(report.feasible);
        assert_eq!(report.eir, 1.0);
        assert!(report.expected.grid_cost.abs() < 1e-9);
    }

    #[test]
    fn weight_degeneracies_zero_terms() {
        let case = chp_only_case(1.0, 0.0, 5.0, 0.2);
        let mut schedule = DispatchSchedule::zeros(&case);
        schedule.chp_kw[0][0] = 100.0;
        let set = single_scenario(&case);
        let report = evaluate_schedule(&case, &schedule, &set).unwrap();
        assert!(report.expected.f2 > 0.0);
        assert!(
            (report.z - (report.expected.f1 + report.expected.penalty)).abs()
                <= 1e-12 * report.z.abs()
        );

        let case0 = chp_only_case(0.0, 1.0, 5.0, 0.2);
        let report0 = evaluate_schedule(&case0, &schedule, &single_scenario(&case0)).unwrap();
        assert!(
            (report0.z - (report0.expected.f2 + report0.expected.penalty)).abs()
                <= 1e-12 * report0.z.abs().max(1.0)
        );
    }

    #[test]
    fn interruption_price_scales_f2_linearly() {
        let mut schedule;
        let base = {
            let case = chp_only_case(1.0, 1.0, 2.0, 0.3);
            schedule = DispatchSchedule::zeros(&case);
            schedule.chp_kw[0][0] = 100.0;
            evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap()
        };
        let tripled = {
            let case = chp_only_case(1.0, 1.0, 6.0, 0.3);
            evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap()
        };
        assert!(base.expected.f2 > 0.0);
        assert!(
            (tripled.expected.f2 - 3.0 * base.expected.f2).abs() <= 1e-9 * tripled.expected.f2
        );
    }

    #[test]
    fn duplicated_scenarios_with_halved_probability_leave_z_unchanged() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        let mut schedule = DispatchSchedule::zeros(&case);
        for t in 0..24 {
            schedule.chp_kw[0][t] = 80.0;
        }
        let one = forecast_scenario(&case);
        let set = ScenarioSet {
            scenarios: vec![one.clone()],
            seed: None,
            steps: 24,
        };
        let mut half_a = one.clone();
        half_a.probability = 0.5;
        let mut half_b = one;
        half_b.probability = 0.5;
        half_b.id = 1;
        let doubled = ScenarioSet {
            scenarios: vec![half_a, half_b],
            seed: None,
            steps: 24,
        };
        let r1 = evaluate_schedule(&case, &schedule, &set).unwrap();
        let r2 = evaluate_schedule(&case, &schedule, &doubled).unwrap();
        assert!((r1.z - r2.z).abs() <= 1e-12 * r1.z.abs());
    }

    #[test]
    fn expected_values_match_manual_weighted_sum() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        let mut schedule = DispatchSchedule::zeros(&case);
        for t in 0..24 {
            schedule.chp_kw[0][t] = 60.0 + (t as f64);
            schedule.ess_kw[0][t] = if t < 12 { -20.0 } else { 20.0 };
        }
        let set = crate::uncertainty::generate_scenarios(&case, 16, 11).unwrap();
        let report = evaluate_schedule(&case, &schedule, &set).unwrap();
        let manual_f1: f64 = report
            .scenarios
            .iter()
            .map(|s| s.probability * s.f1)
            .sum();
        assert!((report.expected.f1 - manual_f1).abs() <= 1e-9 * manual_f1.abs());
        let manual_ens: f64 = report
            .scenarios
            .iter()
            .map(|s| s.probability * s.ens_kwh)
            .sum();
        assert!((report.aens_kwh - manual_ens).abs() <= 1e-9 * manual_ens.abs().max(1e-12));
        assert!(report.eir >= 0.0 && report.eir <= 1.0);
        // Z composition is exact.
        let z = case.weights.h1 * report.expected.f1
            + case.weights.h2 * report.expected.f2
            + report.expected.penalty;
        assert_eq!(report.z, z);
    }

    #[test]
    fn soc_violation_penalty_formula() {
        // rho = 1000, SOC pushed 1 kWh over soc_max in the final hour.
        let case = case_from_json(&serde_json::json!({
            "base": { "s_base_kva": 1000.0, "v_base_kv": 0.4, "impedance_unit": "pu" },
            "horizon": { "steps": 1, "dt": 1.0 },
            "buses": [
                { "id": 0, "load_p_peak": 0.0, "load_q_peak": 0.0 },
                { "id": 1, "load_p_peak": 0.0, "load_q_peak": 0.0 }
            ],
            "branches": [
                { "id": 1, "from_bus": 0, "to_bus": 1, "r": 0.0, "x": 0.0,
                  "length": 1.0, "failure_rate": 0.0 }
            ],
            "ders": [
                {
                    "kind": "ESS", "bus": 1, "p_min": -100.0, "p_max": 100.0,
                    "om_rate": 0.0,
                    "params": {
                        "capacity": 200.0, "soc_min": 0.0, "soc_max": 120.0,
                        "soc_init": 100.0, "p_ch_max": 100.0, "p_dis_max": 100.0,
                        "eta_ch": 1.0, "eta_dis": 1.0
                    }
                }
            ],
            "prices": {
                "grid_energy_price": 0.0, "gas_price": 0.0, "heat_credit": 0.0,
                "loss_price": 0.0, "interruption_price": 0.0, "emission_price": 0.0
            },
            "profiles": {
                "load_shapes": {},
                "wind_speed": [0.0], "irradiance": [0.0], "ambient_temp": [25.0]
            },
            "weights": { "h1": 1.0, "h2": 1.0, "h_c": 1.0 },
            "limits": { "penalty_weight": 1000.0, "soc_terminal_band": 1.0 }
        }));
        let mut schedule = DispatchSchedule::zeros(&case);
        // charge 21 kWh: SOC 100 -> 121, one kWh above soc_max
        schedule.ess_kw[0][0] = -21.0;
        let report = evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap();
        assert!(
            (report.expected.penalty - 1000.0).abs() < 1e-9,
            "penalty {}",
            report.expected.penalty
        );
        assert!(!report.feasible);
    }

    #[test]
    fn diverged_hour_costs_the_declared_constant() {
        // Absurd load far beyond the branch rating collapses the flow.
        let case = case_from_json(&serde_json::json!({
            "base": { "s_base_kva": 1000.0, "v_base_kv": 0.4, "impedance_unit": "pu" },
            "horizon": { "steps": 1, "dt": 1.0 },
            "buses": [
                { "id": 0, "load_p_peak": 0.0, "load_q_peak": 0.0 },
                { "id": 1, "load_p_peak": 3000.0, "load_q_peak": 1000.0, "load_shape_ref": "flat" }
            ],
            "branches": [
                { "id": 1, "from_bus": 0, "to_bus": 1, "r": 0.2, "x": 0.2,
                  "length": 1.0, "failure_rate": 0.0 }
            ],
            "ders": [],
            "prices": {
                "grid_energy_price": 0.1, "gas_price": 0.0, "heat_credit": 0.0,
                "loss_price": 0.0, "interruption_price": 0.0, "emission_price": 0.0
            },
            "profiles": {
                "load_shapes": { "flat": [1.0] },
                "default_load_shape": "flat",
                "wind_speed": [0.0], "irradiance": [0.0], "ambient_temp": [25.0]
            },
            "weights": { "h1": 1.0, "h2": 1.0, "h_c": 1.0 }
        }));
        let schedule = DispatchSchedule::zeros(&case);
        let report = evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap();
        assert_eq!(report.expected.penalty, 1e9);
        assert!(!report.feasible);
    }

    #[test]
    fn feasible_schedule_has_zero_penalty() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        let mut schedule = DispatchSchedule::zeros(&case);
        for t in 0..24 {
            schedule.chp_kw[0][t] = 100.0;
        }
        let report = evaluate_schedule(&case, &schedule, &single_scenario(&case)).unwrap();
        assert_eq!(report.expected.penalty, 0.0, "{:?}", report.scenarios[0].penalty_breakdown);
        assert!(report.feasible);
    }
}
