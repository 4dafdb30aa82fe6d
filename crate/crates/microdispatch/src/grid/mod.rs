//! Static problem description: feeder topology, DER fleet, prices, forecast
//! profiles and study weights, together with case-file ingestion and
//! validation.
//!
//! A [`NetworkCase`] is immutable after [`load_case`] returns; all downstream
//! stages share it by reference.

mod schema;
mod topology;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::der::{ChpParams, EssParams, PvParams, WtParams};
use crate::uncertainty::UncertaintyConfig;

pub use schema::{load_case, save_case};
pub use topology::{subtree_of, validate_radial};

#[derive(Debug, Error)]
pub enum GridError {
    #[error("failed to read case file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse case file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("failed to read profile CSV: {0}")]
    ProfileCsv(#[from] csv::Error),
    #[error("invalid case at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("network is not a rooted radial tree: {0}")]
    Topology(String),
    #[error("unknown branch id {0}")]
    UnknownBranch(u32),
}

impl GridError {
    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        GridError::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A value that is either constant over the horizon or given per hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarOrSeries {
    Scalar(f64),
    Series(Vec<f64>),
}

impl ScalarOrSeries {
    pub fn value_at(&self, hour: usize) -> f64 {
        match self {
            ScalarOrSeries::Scalar(v) => *v,
            ScalarOrSeries::Series(vs) => vs[hour],
        }
    }

    pub fn resolve(&self, steps: usize) -> Result<Vec<f64>, String> {
        match self {
            ScalarOrSeries::Scalar(v) => Ok(vec![*v; steps]),
            ScalarOrSeries::Series(vs) if vs.len() == steps => Ok(vs.clone()),
            ScalarOrSeries::Series(vs) => Err(format!(
                "expected {steps} entries, got {}",
                vs.len()
            )),
        }
    }

    pub(crate) fn check_len(&self, steps: usize) -> Result<(), String> {
        if let ScalarOrSeries::Series(vs) = self {
            if vs.len() != steps {
                return Err(format!("expected {steps} entries, got {}", vs.len()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: u32,
    /// Peak active load at this bus, kW.
    pub load_p_peak: f64,
    /// Peak reactive load at this bus, kVAr.
    pub load_q_peak: f64,
    /// Name of the load shape profile; falls back to the case default.
    #[serde(default)]
    pub load_shape_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    /// Series resistance, in the unit declared by `base.impedance_unit`.
    pub r: f64,
    pub x: f64,
    /// Line length, km.
    pub length: f64,
    /// Failure rate, faults per km per year.
    pub failure_rate: f64,
    /// Sectionalizing switch at the sending end.
    #[serde(default = "default_true")]
    pub has_sectionalizer: bool,
}

fn default_true() -> bool {
    true
}

/// Emission curve coefficients: `alpha + beta*p + gamma*p^2 + zeta*exp(lambda*p)`
/// in kg/h for p in kW.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmissionCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum DerKindTag {
    Wt,
    Pv,
    Chp,
    Ess,
}

impl std::fmt::Display for DerKindTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DerKindTag::Wt => "WT",
            DerKindTag::Pv => "PV",
            DerKindTag::Chp => "CHP",
            DerKindTag::Ess => "ESS",
        };
        f.write_str(s)
    }
}

/// Kind-specific parameter block of a DER unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DerParams {
    Wt(WtParams),
    Pv(PvParams),
    Chp(ChpParams),
    Ess(EssParams),
}

impl DerParams {
    pub fn kind(&self) -> DerKindTag {
        match self {
            DerParams::Wt(_) => DerKindTag::Wt,
            DerParams::Pv(_) => DerKindTag::Pv,
            DerParams::Chp(_) => DerKindTag::Chp,
            DerParams::Ess(_) => DerKindTag::Ess,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerUnit {
    pub bus: u32,
    /// Active power lower limit, kW (for ESS: negative of max charge power).
    pub p_min: f64,
    pub p_max: f64,
    /// Operation and maintenance rate, $/kWh of throughput.
    pub om_rate: f64,
    #[serde(default)]
    pub emission: EmissionCoeffs,
    /// Fixed operating power factor; `None` means unity (no reactive power).
    #[serde(default)]
    pub power_factor: Option<f64>,
    pub params: DerParams,
}

impl DerUnit {
    pub fn kind(&self) -> DerKindTag {
        self.params.kind()
    }

    /// Reactive power accompanying an active output at the unit's fixed
    /// power factor, kVAr (zero at unity).
    pub fn reactive_kvar(&self, p_kw: f64) -> f64 {
        match self.power_factor {
            None => 0.0,
            Some(pf) => p_kw * (1.0 / (pf * pf) - 1.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceBook {
    /// Grid energy price per hour, $/kWh.
    pub grid_energy_price: Vec<f64>,
    /// CHP fuel price, $/fuel unit.
    pub gas_price: f64,
    /// Credit for recovered heat, $/kWh thermal.
    pub heat_credit: f64,
    /// Price of network losses, $/kWh.
    pub loss_price: f64,
    /// Price of energy not supplied, $/kWh.
    pub interruption_price: f64,
    /// Emission price, $/kg.
    pub emission_price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Horizon {
    pub steps: usize,
    /// Hours per step.
    pub dt: f64,
}

impl Default for Horizon {
    fn default() -> Self {
        Horizon { steps: 24, dt: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImpedanceUnit {
    Ohm,
    Pu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseValues {
    pub s_base_kva: f64,
    pub v_base_kv: f64,
    #[serde(default = "default_slack_voltage")]
    pub slack_voltage_pu: f64,
    #[serde(default = "default_impedance_unit")]
    pub impedance_unit: ImpedanceUnit,
}

fn default_slack_voltage() -> f64 {
    1.0
}

fn default_impedance_unit() -> ImpedanceUnit {
    ImpedanceUnit::Ohm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profiles {
    /// Named per-hour load shapes (multipliers on peak load).
    pub load_shapes: BTreeMap<String, Vec<f64>>,
    /// Shape used by buses without an explicit `load_shape_ref`.
    #[serde(default)]
    pub default_load_shape: Option<String>,
    /// Forecast wind speed per hour, m/s.
    pub wind_speed: Vec<f64>,
    /// Clear-sky irradiance per hour, W/m².
    pub irradiance: Vec<f64>,
    /// Ambient (cell) temperature per hour, °C.
    pub ambient_temp: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub h1: f64,
    pub h2: f64,
    pub h_c: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            h1: 1.0,
            h2: 1.0,
            h_c: 1.0,
        }
    }
}

/// Fault handling times used by the reliability model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReliabilityParams {
    /// Fault location/isolation time, h.
    pub t_res: f64,
    /// Repair time, h.
    pub t_rep: f64,
}

impl Default for ReliabilityParams {
    fn default() -> Self {
        ReliabilityParams {
            t_res: 1.0,
            t_rep: 4.0,
        }
    }
}

/// Operating limits and penalty coefficients used by the evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatingLimits {
    /// Tie-line exchange limit with the upstream grid, kW (both directions).
    pub grid_tie_kw: Option<f64>,
    pub v_min_pu: f64,
    pub v_max_pu: f64,
    /// Quadratic exterior penalty weight, $ per squared kW (or squared pu).
    pub penalty_weight: f64,
    /// Fixed penalty per diverged hourly power flow, $.
    pub divergence_penalty: f64,
    /// Allowed terminal SOC deviation from the initial SOC, as a fraction of
    /// capacity.
    pub soc_terminal_band: f64,
}

impl Default for OperatingLimits {
    fn default() -> Self {
        OperatingLimits {
            grid_tie_kw: None,
            v_min_pu: 0.95,
            v_max_pu: 1.05,
            penalty_weight: 1e4,
            divergence_penalty: 1e9,
            soc_terminal_band: 0.05,
        }
    }
}

/// Rooted-tree view of the feeder, derived from buses and branches at load
/// time. Branch and bus references are indexes into the case vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub root: usize,
    pub bus_index: BTreeMap<u32, usize>,
    pub branch_index: BTreeMap<u32, usize>,
    /// Parent branch of each bus (None for the root).
    pub parent: Vec<Option<usize>>,
    /// Child branches of each bus, sorted by branch id.
    pub children: Vec<Vec<usize>>,
    /// Branch indexes in parent-before-child order (ties by branch id).
    pub order: Vec<usize>,
}

/// The validated, immutable problem description.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCase {
    pub base: BaseValues,
    pub horizon: Horizon,
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub ders: Vec<DerUnit>,
    pub prices: PriceBook,
    pub profiles: Profiles,
    pub weights: Weights,
    pub reliability: ReliabilityParams,
    pub uncertainty: UncertaintyConfig,
    pub limits: OperatingLimits,
    pub(crate) topo: Topology,
    /// Resolved load shape per bus (index parallel to `buses`).
    pub(crate) bus_shape: Vec<Vec<f64>>,
}

impl NetworkCase {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn root(&self) -> usize {
        self.topo.root
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn bus_idx(&self, id: u32) -> Option<usize> {
        self.topo.bus_index.get(&id).copied()
    }

    pub fn branch_idx(&self, id: u32) -> Option<usize> {
        self.topo.branch_index.get(&id).copied()
    }

    /// Branch indexes in sweep order (every parent before its children).
    pub fn sweep_order(&self) -> &[usize] {
        &self.topo.order
    }

    pub fn z_base_ohm(&self) -> f64 {
        1000.0 * self.base.v_base_kv * self.base.v_base_kv / self.base.s_base_kva
    }

    pub fn kw_to_pu(&self, kw: f64) -> f64 {
        kw / self.base.s_base_kva
    }

    pub fn pu_to_kw(&self, pu: f64) -> f64 {
        pu * self.base.s_base_kva
    }

    /// Series impedance of a branch in per unit.
    pub fn branch_rx_pu(&self, branch: usize) -> (f64, f64) {
        let b = &self.branches[branch];
        match self.base.impedance_unit {
            ImpedanceUnit::Pu => (b.r, b.x),
            ImpedanceUnit::Ohm => {
                let z = self.z_base_ohm();
                (b.r / z, b.x / z)
            }
        }
    }

    /// Load shape of a bus (per-hour multipliers on peak load).
    pub fn load_shape(&self, bus: usize) -> &[f64] {
        &self.bus_shape[bus]
    }

    /// Nominal (forecast) load of a bus at an hour, before any scenario
    /// multiplier: (P kW, Q kVAr).
    pub fn bus_load_kw(&self, bus: usize, hour: usize) -> (f64, f64) {
        let shape = self.bus_shape[bus][hour];
        let b = &self.buses[bus];
        (b.load_p_peak * shape, b.load_q_peak * shape)
    }

    /// Indexes of DER units of one kind, in case-file order.
    pub fn units_of_kind(&self, kind: DerKindTag) -> Vec<usize> {
        self.ders
            .iter()
            .enumerate()
            .filter(|(_, d)| d.kind() == kind)
            .map(|(i, _)| i)
            .collect()
    }

    /// Stable display label for a DER unit, e.g. `chp0_bus2`.
    pub fn unit_label(&self, unit: usize) -> String {
        let der = &self.ders[unit];
        let nth = self.ders[..unit]
            .iter()
            .filter(|d| d.kind() == der.kind())
            .count();
        format!(
            "{}{}_bus{}",
            der.kind().to_string().to_lowercase(),
            nth,
            der.bus
        )
    }
}

/// Path to a case file shipped with the crate under `cases/`.
pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("cases")
        .join(name)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::uncertainty::UncertaintyConfig;

    /// Write a JSON document to a temp file and load it through the full
    /// case loader.
    pub(crate) fn case_from_json(doc: &serde_json::Value) -> NetworkCase {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("case.json");
        std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap()).unwrap();
        super::load_case(&path).unwrap()
    }

    /// Minimal zero-load case over the given `(branch_id, from, to)` edges,
    /// with unit-length branches and a one-hour horizon. Power-flow tests
    /// supply injections separately.
    pub(crate) fn case_from_edges(edges: &[(u32, u32, u32)]) -> NetworkCase {
        case_from_edges_rx(edges, 0.0, 0.0)
    }

    pub(crate) fn case_from_edges_rx(
        edges: &[(u32, u32, u32)],
        r_pu: f64,
        x_pu: f64,
    ) -> NetworkCase {
        let mut bus_ids: Vec<u32> = edges.iter().flat_map(|&(_, f, t)| [f, t]).collect();
        bus_ids.sort_unstable();
        bus_ids.dedup();
        let buses: Vec<Bus> = bus_ids
            .iter()
            .map(|&id| Bus {
                id,
                load_p_peak: 0.0,
                load_q_peak: 0.0,
                load_shape_ref: None,
            })
            .collect();
        let branches: Vec<Branch> = edges
            .iter()
            .map(|&(id, from_bus, to_bus)| Branch {
                id,
                from_bus,
                to_bus,
                r: r_pu,
                x: x_pu,
                length: 1.0,
                failure_rate: 0.0,
                has_sectionalizer: true,
            })
            .collect();
        let topo = super::topology::build_topology(&buses, &branches).unwrap();
        let steps = 1;
        let n = buses.len();
        NetworkCase {
            base: BaseValues {
                s_base_kva: 1000.0,
                v_base_kv: 1.0,
                slack_voltage_pu: 1.0,
                impedance_unit: ImpedanceUnit::Pu,
            },
            horizon: Horizon { steps, dt: 1.0 },
            buses,
            branches,
            ders: Vec::new(),
            prices: PriceBook {
                grid_energy_price: vec![0.1; steps],
                gas_price: 0.0,
                heat_credit: 0.0,
                loss_price: 0.0,
                interruption_price: 0.0,
                emission_price: 0.0,
            },
            profiles: Profiles {
                load_shapes: BTreeMap::new(),
                default_load_shape: None,
                wind_speed: vec![0.0; steps],
                irradiance: vec![0.0; steps],
                ambient_temp: vec![25.0; steps],
            },
            weights: Weights::default(),
            reliability: ReliabilityParams::default(),
            uncertainty: UncertaintyConfig::default(),
            limits: OperatingLimits::default(),
            topo,
            bus_shape: vec![vec![0.0; steps]; n],
        }
    }
}
