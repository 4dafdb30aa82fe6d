//! Radial load flow by backward/forward sweep over the branch-flow
//! recursions.
//!
//! The backward pass accumulates receiving-end branch flows plus branch
//! losses `r (P^2 + Q^2) / V^2` (receiving-end voltage from the previous
//! iterate); the forward pass propagates squared voltage drops from the
//! slack bus. Loads and injections are constant power. Flat start at the
//! slack voltage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::NetworkCase;

#[derive(Debug, Error)]
pub enum PowerFlowError {
    #[error("voltage collapse at bus {bus_id}: |V| = {v:.4} pu")]
    VoltageCollapse { bus_id: u32, v: f64 },
    #[error("solution did not converge")]
    NotConverged,
    #[error("injection vector has {got} buses, case has {want}")]
    DimensionMismatch { got: usize, want: usize },
}

/// Per-bus net injections for one hour of one scenario: generation minus
/// load, in kW / kVAr, indexed like `case.buses`. The root entry is ignored
/// (slack).
#[derive(Debug, Clone, PartialEq)]
pub struct InjectionVector {
    pub p_kw: Vec<f64>,
    pub q_kvar: Vec<f64>,
}

impl InjectionVector {
    pub fn zeros(n_buses: usize) -> Self {
        InjectionVector {
            p_kw: vec![0.0; n_buses],
            q_kvar: vec![0.0; n_buses],
        }
    }

    pub fn add(&mut self, bus: usize, p_kw: f64, q_kvar: f64) {
        self.p_kw[bus] += p_kw;
        self.q_kvar[bus] += q_kvar;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSolution {
    /// Voltage magnitude per bus, pu.
    pub v_pu: Vec<f64>,
    /// Receiving-end active flow per branch, pu.
    pub branch_p_pu: Vec<f64>,
    /// Receiving-end reactive flow per branch, pu.
    pub branch_q_pu: Vec<f64>,
    /// Active loss per branch, kW.
    pub branch_loss_kw: Vec<f64>,
    /// Sum of the per-branch losses, kW.
    pub total_loss_kw: f64,
    /// Net import from the upstream grid at the slack bus, kW.
    pub slack_p_kw: f64,
    pub slack_q_kvar: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    /// Convergence threshold on the largest voltage change, pu.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            tol: 1e-8,
            max_iter: 50,
        }
    }
}

/// Solve the radial load flow with default options. Non-convergence is
/// reported through `converged = false` on the returned solution; a voltage
/// collapse (any |V| under 0.5 pu) is an error.
pub fn solve_radial(case: &NetworkCase, inj: &InjectionVector) -> Result<FlowSolution, PowerFlowError> {
    solve_radial_opts(case, inj, SweepOptions::default())
}

pub fn solve_radial_opts(
    case: &NetworkCase,
    inj: &InjectionVector,
    opts: SweepOptions,
) -> Result<FlowSolution, PowerFlowError> {
    let n = case.n_buses();
    if inj.p_kw.len() != n || inj.q_kvar.len() != n {
        return Err(PowerFlowError::DimensionMismatch {
            got: inj.p_kw.len().min(inj.q_kvar.len()),
            want: n,
        });
    }
    let nb = case.branches.len();
    let order = case.sweep_order();
    let topo = case.topology();

    let inj_p: Vec<f64> = inj.p_kw.iter().map(|&kw| case.kw_to_pu(kw)).collect();
    let inj_q: Vec<f64> = inj.q_kvar.iter().map(|&kv| case.kw_to_pu(kv)).collect();
    let rx: Vec<(f64, f64)> = (0..nb).map(|b| case.branch_rx_pu(b)).collect();
    let to_bus: Vec<usize> = (0..nb)
        .map(|b| case.bus_idx(case.branches[b].to_bus).unwrap())
        .collect();
    let from_bus: Vec<usize> = (0..nb)
        .map(|b| case.bus_idx(case.branches[b].from_bus).unwrap())
        .collect();

    let v0 = case.base.slack_voltage_pu;
    let mut v = vec![v0; n];
    let mut p_recv = vec![0.0; nb];
    let mut q_recv = vec![0.0; nb];
    let mut loss_p = vec![0.0; nb];
    let mut loss_q = vec![0.0; nb];

    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..opts.max_iter {
        iterations += 1;

        // Backward: child branches appear after their parent in `order`, so
        // the reverse order accumulates subtree flows toward the root.
        for &b in order.iter().rev() {
            let c = to_bus[b];
            let mut p = -inj_p[c];
            let mut q = -inj_q[c];
            for &d in &topo.children[c] {
                p += p_recv[d] + loss_p[d];
                q += q_recv[d] + loss_q[d];
            }
            p_recv[b] = p;
            q_recv[b] = q;
            let (r, x) = rx[b];
            let flow2 = p * p + q * q;
            let v2 = v[c] * v[c];
            loss_p[b] = r * flow2 / v2;
            loss_q[b] = x * flow2 / v2;
        }

        // Forward: propagate voltage magnitudes from the slack bus.
        let mut max_dv = 0.0f64;
        for &b in order {
            let u = from_bus[b];
            let c = to_bus[b];
            let (r, x) = rx[b];
            let p_send = p_recv[b] + loss_p[b];
            let q_send = q_recv[b] + loss_q[b];
            let vu2 = v[u] * v[u];
            let v2 = vu2 - 2.0 * (r * p_send + x * q_send)
                + (r * r + x * x) * (p_send * p_send + q_send * q_send) / vu2;
            if !(v2 > 0.25) {
                return Err(PowerFlowError::VoltageCollapse {
                    bus_id: case.buses[c].id,
                    v: v2.max(0.0).sqrt(),
                });
            }
            let v_new = v2.sqrt();
            max_dv = max_dv.max((v_new - v[c]).abs());
            v[c] = v_new;
        }

        if max_dv < opts.tol {
            converged = true;
            break;
        }
    }

    let branch_loss_kw: Vec<f64> = loss_p.iter().map(|&l| case.pu_to_kw(l)).collect();
    let total_loss_kw = branch_loss_kw.iter().sum();
    let (slack_p, slack_q) = topo.children[topo.root]
        .iter()
        .fold((0.0, 0.0), |(p, q), &b| {
            (p + p_recv[b] + loss_p[b], q + q_recv[b] + loss_q[b])
        });

    Ok(FlowSolution {
        v_pu: v,
        branch_p_pu: p_recv,
        branch_q_pu: q_recv,
        branch_loss_kw,
        total_loss_kw,
        slack_p_kw: case.pu_to_kw(slack_p),
        slack_q_kvar: case.pu_to_kw(slack_q),
        converged,
        iterations,
    })
}

/// Total network loss of a converged solution, kW.
pub fn total_losses(sol: &FlowSolution) -> Result<f64, PowerFlowError> {
    if !sol.converged {
        return Err(PowerFlowError::NotConverged);
    }
    Ok(sol.total_loss_kw)
}

/// Active power balance residual in pu: slack import plus net injections
/// minus losses. Near zero for a converged solution.
pub fn conservation_residual_pu(
    case: &NetworkCase,
    inj: &InjectionVector,
    sol: &FlowSolution,
) -> f64 {
    let root = case.root();
    let inj_sum: f64 = inj
        .p_kw
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != root)
        .map(|(_, &kw)| case.kw_to_pu(kw))
        .sum();
    case.kw_to_pu(sol.slack_p_kw) + inj_sum - case.kw_to_pu(sol.total_loss_kw)
}
