//! Case file ingestion: a single JSON document with optional CSV sidecars
//! for bulk profiles.
//!
//! Top-level keys: `base`, `horizon`, `buses`, `branches`, `ders`, `prices`,
//! `profiles`, `weights`, plus optional `reliability`, `uncertainty` and
//! `limits` sections. Profile entries are inline arrays or
//! `{"csv": "relative/path.csv"}` references; sidecar CSVs carry a
//! `hour,value` header with hours 0..steps-1.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::der::{ChpParams, EssParams, PvParams, WtParams};
use crate::uncertainty::UncertaintyConfig;

use super::topology::build_topology;
use super::{
    BaseValues, Branch, Bus, DerKindTag, DerParams, DerUnit, EmissionCoeffs, GridError, Horizon,
    NetworkCase, OperatingLimits, PriceBook, Profiles, ReliabilityParams, ScalarOrSeries, Weights,
};

/// A profile that is either inline or stored in a CSV sidecar.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ProfileSpec {
    Inline(Vec<f64>),
    Csv { csv: String },
}

impl ProfileSpec {
    fn resolve(&self, base_dir: &Path, steps: usize, path: &str) -> Result<Vec<f64>, GridError> {
        let values = match self {
            ProfileSpec::Inline(v) => v.clone(),
            ProfileSpec::Csv { csv } => read_profile_csv(&base_dir.join(csv))?,
        };
        if values.len() != steps {
            return Err(GridError::validation(
                path,
                format!("expected {steps} entries, got {}", values.len()),
            ));
        }
        Ok(values)
    }
}

fn read_profile_csv(path: &Path) -> Result<Vec<f64>, GridError> {
    #[derive(Deserialize)]
    struct Row {
        hour: usize,
        value: f64,
    }
    let mut reader = csv::Reader::from_path(path)?;
    let mut values = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row?;
        if row.hour != values.len() {
            return Err(GridError::validation(
                path.display().to_string(),
                format!("expected hour {}, found {}", values.len(), row.hour),
            ));
        }
        values.push(row.value);
    }
    Ok(values)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProfilesSpec {
    load_shapes: BTreeMap<String, ProfileSpec>,
    #[serde(default)]
    default_load_shape: Option<String>,
    wind_speed: ProfileSpec,
    irradiance: ProfileSpec,
    ambient_temp: ProfileSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PricesSpec {
    grid_energy_price: ScalarOrSeries,
    gas_price: f64,
    heat_credit: f64,
    loss_price: f64,
    interruption_price: f64,
    emission_price: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DerSpec {
    kind: DerKindTag,
    bus: u32,
    p_min: f64,
    p_max: f64,
    om_rate: f64,
    #[serde(default)]
    emission: EmissionCoeffs,
    #[serde(default)]
    power_factor: Option<f64>,
    params: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CaseFile {
    base: BaseValues,
    #[serde(default)]
    horizon: Horizon,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    ders: Vec<DerSpec>,
    prices: PricesSpec,
    profiles: ProfilesSpec,
    #[serde(default)]
    weights: Weights,
    #[serde(default)]
    reliability: ReliabilityParams,
    #[serde(default)]
    uncertainty: UncertaintyConfig,
    #[serde(default)]
    limits: OperatingLimits,
}

/// Load and fully validate a case file.
pub fn load_case(path: impl AsRef<Path>) -> Result<NetworkCase, GridError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let file: CaseFile = serde_json::from_str(&text)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    resolve_case(file, base_dir)
}

fn ensure(cond: bool, path: &str, msg: impl Into<String>) -> Result<(), GridError> {
    if cond {
        Ok(())
    } else {
        Err(GridError::validation(path, msg.into()))
    }
}

fn resolve_case(file: CaseFile, base_dir: &Path) -> Result<NetworkCase, GridError> {
    let steps = file.horizon.steps;
    ensure(steps >= 1, "horizon.steps", "must be >= 1")?;
    ensure(file.horizon.dt > 0.0, "horizon.dt", "must be > 0")?;
    ensure(file.base.s_base_kva > 0.0, "base.s_base_kva", "must be > 0")?;
    ensure(file.base.v_base_kv > 0.0, "base.v_base_kv", "must be > 0")?;
    ensure(
        file.base.slack_voltage_pu > 0.0,
        "base.slack_voltage_pu",
        "must be > 0",
    )?;

    for (i, b) in file.buses.iter().enumerate() {
        ensure(
            b.load_p_peak >= 0.0,
            &format!("buses[{i}].load_p_peak"),
            "must be >= 0",
        )?;
        ensure(
            b.load_q_peak >= 0.0,
            &format!("buses[{i}].load_q_peak"),
            "must be >= 0",
        )?;
    }
    for (i, b) in file.branches.iter().enumerate() {
        ensure(b.r >= 0.0, &format!("branches[{i}].r"), "must be >= 0")?;
        ensure(b.x >= 0.0, &format!("branches[{i}].x"), "must be >= 0")?;
        ensure(b.length > 0.0, &format!("branches[{i}].length"), "must be > 0")?;
        ensure(
            b.failure_rate >= 0.0,
            &format!("branches[{i}].failure_rate"),
            "must be >= 0",
        )?;
    }

    // Profiles.
    let mut load_shapes = BTreeMap::new();
    for (name, spec) in &file.profiles.load_shapes {
        let values = spec.resolve(base_dir, steps, &format!("profiles.load_shapes.{name}"))?;
        for (t, v) in values.iter().enumerate() {
            ensure(
                *v >= 0.0,
                &format!("profiles.load_shapes.{name}[{t}]"),
                "load shape must be >= 0",
            )?;
        }
        load_shapes.insert(name.clone(), values);
    }
    let profiles = Profiles {
        load_shapes,
        default_load_shape: file.profiles.default_load_shape.clone(),
        wind_speed: file
            .profiles
            .wind_speed
            .resolve(base_dir, steps, "profiles.wind_speed")?,
        irradiance: file
            .profiles
            .irradiance
            .resolve(base_dir, steps, "profiles.irradiance")?,
        ambient_temp: file
            .profiles
            .ambient_temp
            .resolve(base_dir, steps, "profiles.ambient_temp")?,
    };
    if let Some(name) = &profiles.default_load_shape {
        ensure(
            profiles.load_shapes.contains_key(name),
            "profiles.default_load_shape",
            format!("references unknown load shape {name:?}"),
        )?;
    }

    // Per-bus shape resolution.
    let mut bus_shape = Vec::with_capacity(file.buses.len());
    for (i, b) in file.buses.iter().enumerate() {
        let name = b
            .load_shape_ref
            .as_ref()
            .or(profiles.default_load_shape.as_ref());
        let name = match name {
            Some(n) => n,
            None => {
                ensure(
                    b.load_p_peak == 0.0 && b.load_q_peak == 0.0,
                    &format!("buses[{i}].load_shape_ref"),
                    "bus has load but no load shape and no default_load_shape is set",
                )?;
                bus_shape.push(vec![0.0; steps]);
                continue;
            }
        };
        let shape = profiles.load_shapes.get(name).ok_or_else(|| {
            GridError::validation(
                format!("buses[{i}].load_shape_ref"),
                format!("references unknown load shape {name:?}"),
            )
        })?;
        bus_shape.push(shape.clone());
    }

    // Prices.
    file.prices
        .grid_energy_price
        .check_len(steps)
        .map_err(|e| GridError::validation("prices.grid_energy_price", e))?;
    let grid_energy_price = file.prices.grid_energy_price.resolve(steps).unwrap();
    for (name, v) in [
        ("gas_price", file.prices.gas_price),
        ("heat_credit", file.prices.heat_credit),
        ("loss_price", file.prices.loss_price),
        ("interruption_price", file.prices.interruption_price),
        ("emission_price", file.prices.emission_price),
    ] {
        ensure(v >= 0.0, &format!("prices.{name}"), "must be >= 0")?;
    }
    for (t, v) in grid_energy_price.iter().enumerate() {
        ensure(
            *v >= 0.0,
            &format!("prices.grid_energy_price[{t}]"),
            "must be >= 0",
        )?;
    }
    let prices = PriceBook {
        grid_energy_price,
        gas_price: file.prices.gas_price,
        heat_credit: file.prices.heat_credit,
        loss_price: file.prices.loss_price,
        interruption_price: file.prices.interruption_price,
        emission_price: file.prices.emission_price,
    };

    // Weights.
    ensure(file.weights.h1 >= 0.0, "weights.h1", "must be >= 0")?;
    ensure(file.weights.h2 >= 0.0, "weights.h2", "must be >= 0")?;
    ensure(file.weights.h_c >= 0.0, "weights.h_c", "must be >= 0")?;

    // Reliability and limits.
    ensure(
        file.reliability.t_res >= 0.0,
        "reliability.t_res",
        "must be >= 0",
    )?;
    ensure(
        file.reliability.t_rep >= 0.0,
        "reliability.t_rep",
        "must be >= 0",
    )?;
    ensure(
        file.limits.v_min_pu > 0.0 && file.limits.v_min_pu < file.limits.v_max_pu,
        "limits.v_min_pu",
        "must satisfy 0 < v_min_pu < v_max_pu",
    )?;
    ensure(
        file.limits.penalty_weight >= 0.0,
        "limits.penalty_weight",
        "must be >= 0",
    )?;

    // Uncertainty config.
    file.uncertainty
        .validate(steps)
        .map_err(|e| GridError::validation("uncertainty", e))?;

    // DER units.
    let bus_ids: BTreeMap<u32, usize> = file
        .buses
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id, i))
        .collect();
    let mut ders = Vec::with_capacity(file.ders.len());
    for (i, spec) in file.ders.iter().enumerate() {
        let at = |field: &str| format!("ders[{i}].{field}");
        ensure(
            bus_ids.contains_key(&spec.bus),
            &at("bus"),
            format!("references unknown bus {}", spec.bus),
        )?;
        ensure(
            spec.p_min <= spec.p_max,
            &at("p_min"),
            "p_min must not exceed p_max",
        )?;
        ensure(spec.om_rate >= 0.0, &at("om_rate"), "must be >= 0")?;
        for (name, v) in [
            ("alpha", spec.emission.alpha),
            ("beta", spec.emission.beta),
            ("gamma", spec.emission.gamma),
            ("zeta", spec.emission.zeta),
            ("lambda", spec.emission.lambda),
        ] {
            ensure(
                v.is_finite(),
                &at(&format!("emission.{name}")),
                "must be finite",
            )?;
        }
        if let Some(pf) = spec.power_factor {
            ensure(
                pf > 0.0 && pf <= 1.0,
                &at("power_factor"),
                "must be in (0, 1]",
            )?;
        }
        let params = parse_der_params(spec, &at("params"))?;
        ders.push(DerUnit {
            bus: spec.bus,
            p_min: spec.p_min,
            p_max: spec.p_max,
            om_rate: spec.om_rate,
            emission: spec.emission.clone(),
            power_factor: spec.power_factor,
            params,
        });
    }

    let topo = build_topology(&file.buses, &file.branches)?;

    Ok(NetworkCase {
        base: file.base,
        horizon: file.horizon,
        buses: file.buses,
        branches: file.branches,
        ders,
        prices,
        profiles,
        weights: file.weights,
        reliability: file.reliability,
        uncertainty: file.uncertainty,
        limits: file.limits,
        topo,
        bus_shape,
    })
}

fn parse_der_params(spec: &DerSpec, path: &str) -> Result<DerParams, GridError> {
    let bad = |e: String| GridError::validation(path, e);
    match spec.kind {
        DerKindTag::Wt => {
            let p: WtParams =
                serde_json::from_value(spec.params.clone()).map_err(|e| bad(e.to_string()))?;
            Ok(DerParams::Wt(p))
        }
        DerKindTag::Pv => {
            let p: PvParams =
                serde_json::from_value(spec.params.clone()).map_err(|e| bad(e.to_string()))?;
            p.validate().map_err(|e| bad(e.to_string()))?;
            Ok(DerParams::Pv(p))
        }
        DerKindTag::Chp => {
            // The unit-level limits double as the fuel-curve operating range.
            #[derive(Deserialize)]
            struct ChpRaw {
                theta: f64,
                rho: f64,
                gamma: f64,
                efficiency: f64,
                heat_to_electric: f64,
                #[serde(default)]
                ramp: Option<f64>,
            }
            let raw: ChpRaw =
                serde_json::from_value(spec.params.clone()).map_err(|e| bad(e.to_string()))?;
            let p = ChpParams {
                theta: raw.theta,
                rho: raw.rho,
                gamma: raw.gamma,
                efficiency: raw.efficiency,
                heat_to_electric: raw.heat_to_electric,
                ramp: raw.ramp,
                p_min: spec.p_min,
                p_max: spec.p_max,
            };
            p.validate().map_err(|e| bad(e.to_string()))?;
            Ok(DerParams::Chp(p))
        }
        DerKindTag::Ess => {
            let p: EssParams =
                serde_json::from_value(spec.params.clone()).map_err(|e| bad(e.to_string()))?;
            p.validate().map_err(|e| bad(e.to_string()))?;
            Ok(DerParams::Ess(p))
        }
    }
}

/// Write a case back in canonical form (all profiles inline, prices as full
/// series). `load_case(save_case(c)) == c`.
pub fn save_case(case: &NetworkCase, path: impl AsRef<Path>) -> Result<(), GridError> {
    let file = CaseFile {
        base: case.base,
        horizon: case.horizon,
        buses: case.buses.clone(),
        branches: case.branches.clone(),
        ders: case
            .ders
            .iter()
            .map(|d| {
                let params = match &d.params {
                    DerParams::Wt(p) => serde_json::to_value(p),
                    DerParams::Pv(p) => serde_json::to_value(p),
                    DerParams::Chp(p) => {
                        // Drop the mirrored limits; they live at the unit level.
                        let mut v = serde_json::to_value(p).unwrap();
                        let obj = v.as_object_mut().unwrap();
                        obj.remove("p_min");
                        obj.remove("p_max");
                        Ok(v)
                    }
                    DerParams::Ess(p) => serde_json::to_value(p),
                }
                .expect("DER params serialize");
                DerSpec {
                    kind: d.kind(),
                    bus: d.bus,
                    p_min: d.p_min,
                    p_max: d.p_max,
                    om_rate: d.om_rate,
                    emission: d.emission.clone(),
                    power_factor: d.power_factor,
                    params,
                }
            })
            .collect(),
        prices: PricesSpec {
            grid_energy_price: ScalarOrSeries::Series(case.prices.grid_energy_price.clone()),
            gas_price: case.prices.gas_price,
            heat_credit: case.prices.heat_credit,
            loss_price: case.prices.loss_price,
            interruption_price: case.prices.interruption_price,
            emission_price: case.prices.emission_price,
        },
        profiles: ProfilesSpec {
            load_shapes: case
                .profiles
                .load_shapes
                .iter()
                .map(|(k, v)| (k.clone(), ProfileSpec::Inline(v.clone())))
                .collect(),
            default_load_shape: case.profiles.default_load_shape.clone(),
            wind_speed: ProfileSpec::Inline(case.profiles.wind_speed.clone()),
            irradiance: ProfileSpec::Inline(case.profiles.irradiance.clone()),
            ambient_temp: ProfileSpec::Inline(case.profiles.ambient_temp.clone()),
        },
        weights: case.weights,
        reliability: case.reliability,
        uncertainty: case.uncertainty.clone(),
        limits: case.limits,
    };
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fixture_path;

    #[test]
    fn minimal_two_bus_case_loads() {
        let case = load_case(fixture_path("two_bus.json")).unwrap();
        assert_eq!(case.buses.len(), 2);
        assert_eq!(case.branches.len(), 1);
        assert_eq!(case.root(), 0);
        assert_eq!(case.buses[case.root()].id, 0);
    }

    #[test]
    fn duplicate_bus_id_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(fixture_path("two_bus.json")).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["buses"][1]["id"] = doc["buses"][0]["id"].clone();
        let path = dir.path().join("dup.json");
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let err = load_case(&path).unwrap_err();
        assert!(err.to_string().contains("duplicate bus id"), "{err}");
    }

    #[test]
    fn lv_fixture_round_trips() {
        let case = load_case(fixture_path("lv_microgrid.json")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("saved.json");
        save_case(&case, &path).unwrap();
        let reloaded = load_case(&path).unwrap();
        assert_eq!(case, reloaded);
    }

    #[test]
    fn csv_sidecar_profile_loads() {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(fixture_path("two_bus.json")).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let steps = doc["horizon"]["steps"].as_u64().unwrap() as usize;
        let mut csv_text = String::from("hour,value\n");
        for t in 0..steps {
            csv_text.push_str(&format!("{t},{}\n", 3.0 + t as f64));
        }
        std::fs::write(dir.path().join("wind.csv"), csv_text).unwrap();
        doc["profiles"]["wind_speed"] = serde_json::json!({ "csv": "wind.csv" });
        let path = dir.path().join("case.json");
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let case = load_case(&path).unwrap();
        assert_eq!(case.profiles.wind_speed[0], 3.0);
        assert_eq!(case.profiles.wind_speed[steps - 1], 3.0 + (steps - 1) as f64);
    }

    #[test]
    fn wrong_profile_length_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(fixture_path("two_bus.json")).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["profiles"]["wind_speed"] = serde_json::json!([1.0, 2.0]);
        let path = dir.path().join("short.json");
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let err = load_case(&path).unwrap_err();
        assert!(matches!(err, GridError::Validation { .. }), "{err}");
    }

    #[test]
    fn branch_count_mismatch_is_topology_error() {
        let dir = tempfile::tempdir().unwrap();
        let text = std::fs::read_to_string(fixture_path("two_bus.json")).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["branches"] = serde_json::json!([]);
        let path = dir.path().join("nobranch.json");
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        assert!(matches!(
            load_case(&path).unwrap_err(),
            GridError::Topology(_)
        ));
    }

    #[test]
    fn sixty_nine_bus_fixture_is_a_tree() {
        let case = load_case(fixture_path("feeder69.json")).unwrap();
        assert_eq!(case.buses.len(), 69);
        assert_eq!(case.branches.len(), 68);
        let order = crate::grid::validate_radial(&case).unwrap();
        assert_eq!(order.len(), 68);
        // DFS oracle: walk the tree from the root and count reachable buses.
        let mut reached = std::collections::BTreeSet::new();
        let mut stack = vec![case.root()];
        while let Some(b) = stack.pop() {
            reached.insert(case.buses[b].id);
            for &child in &case.topology().children[b] {
                stack.push(case.bus_idx(case.branches[child].to_bus).unwrap());
            }
        }
        assert_eq!(reached.len(), 69);
        // Parent precedes child in the returned order.
        let pos: std::collections::BTreeMap<u32, usize> = order
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect();
        for br in &case.branches {
            let parent_bus = case.bus_idx(br.from_bus).unwrap();
            if let Some(pb) = case.topology().parent[parent_bus] {
                assert!(pos[&case.branches[pb].id] < pos[&br.id]);
            }
        }
    }
}
