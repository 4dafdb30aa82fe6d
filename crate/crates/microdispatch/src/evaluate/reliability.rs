//! Outage partitioning and the energy-not-supplied cost.
//!
//! A fault on branch `b` is isolated at the deepest sectionalizing switch on
//! the root path of `b` (including `b` itself); everything below that switch
//! waits for repair (`T_rep`). The rest of the faulted feeder — the subtree
//! of the root-child branch on that path — is de-energized only during fault
//! location and switching (`T_res`). Buses on other feeders ride through.

use std::collections::BTreeSet;

use crate::grid::{subtree_of, GridError, NetworkCase};
use crate::uncertainty::Scenario;

/// Bus sets affected by a fault on one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultPartition {
    /// Buses restored by switching after `t_res` hours.
    pub restored: BTreeSet<u32>,
    /// Buses de-energized until the repair completes (`t_rep` hours).
    pub repaired: BTreeSet<u32>,
}

/// Partition the buses affected by a fault on `branch_id` into
/// switching-restored and repair-bound sets.
pub fn branch_fault_partition(
    case: &NetworkCase,
    branch_id: u32,
) -> Result<FaultPartition, GridError> {
    let bi = case
        .branch_idx(branch_id)
        .ok_or(GridError::UnknownBranch(branch_id))?;
    let topo = case.topology();

    // Root path of the faulted branch, child to root.
    let mut path = vec![bi];
    let mut bus = case.bus_idx(case.branches[bi].from_bus).unwrap();
    while let Some(pb) = topo.parent[bus] {
        path.push(pb);
        bus = case.bus_idx(case.branches[pb].from_bus).unwrap();
    }
    // Isolation point: nearest switch at or above the fault; the feeder-head
    // breaker isolates the whole feeder when no switch exists on the path.
    let isolation = path
        .iter()
        .copied()
        .find(|&b| case.branches[b].has_sectionalizer)
        .unwrap_or(*path.last().unwrap());
    let feeder_head = *path.last().unwrap();

    let repaired = subtree_of(case, case.branches[isolation].id)?;
    let feeder = subtree_of(case, case.branches[feeder_head].id)?;
    let restored = feeder.difference(&repaired).copied().collect();
    Ok(FaultPartition { restored, repaired })
}

/// Reliability outcome of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityOutcome {
    /// Expected unsupplied energy over the study day, kWh.
    pub ens_kwh: f64,
    /// Interruption cost of that energy, $/day.
    pub c_aens: f64,
    /// Total scenario energy demand, kWh.
    pub demand_kwh: f64,
}

/// Expected daily unsupplied energy and its cost for one scenario.
///
/// Interrupted power per bus is the scenario's hourly load averaged over the
/// day; branch fault frequencies (per year) are scaled to the study day by
/// dividing by 365.
pub fn reliability_cost(case: &NetworkCase, scenario: &Scenario) -> ReliabilityOutcome {
    let partitions: Vec<FaultPartition> = case
        .branches
        .iter()
        .map(|b| branch_fault_partition(case, b.id).expect("case branches are known"))
        .collect();
    reliability_cost_with(case, scenario, &partitions)
}

pub(crate) fn reliability_cost_with(
    case: &NetworkCase,
    scenario: &Scenario,
    partitions: &[FaultPartition],
) -> ReliabilityOutcome {
    let steps = case.horizon.steps;
    let dt = case.horizon.dt;

    // Scenario-average load per bus, kW, and total demand.
    let mut avg_load = vec![0.0f64; case.n_buses()];
    let mut demand_kwh = 0.0;
    for (i, avg) in avg_load.iter_mut().enumerate() {
        let mut sum = 0.0;
        for t in 0..steps {
            let (p, _) = case.bus_load_kw(i, t);
            sum += p * scenario.load_mult[t];
        }
        *avg = sum / steps as f64;
        demand_kwh += sum * dt;
    }
    let load_of = |buses: &BTreeSet<u32>| -> f64 {
        buses
            .iter()
            .map(|&id| avg_load[case.bus_idx(id).unwrap()])
            .sum()
    };

    let mut ens_kwh = 0.0;
    for (bi, branch) in case.branches.iter().enumerate() {
        let faults_per_day = branch.failure_rate * branch.length / 365.0;
        if faults_per_day == 0.0 {
            continue;
        }
        let part = &partitions[bi];
        let energy_per_fault = load_of(&part.restored) * case.reliability.t_res
            + load_of(&part.repaired) * case.reliability.t_rep;
        ens_kwh += faults_per_day * energy_per_fault;
    }

    ReliabilityOutcome {
        ens_kwh,
        c_aens: case.prices.interruption_price * ens_kwh,
        demand_kwh,
    }
}
