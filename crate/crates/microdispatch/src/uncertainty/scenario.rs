//! Scenario generation by Monte Carlo sampling, the forecast scenario, and
//! the scenario CSV format.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_distr::{Beta as BetaDist, Distribution, Normal as NormalDist, Weibull as WeibullDist};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::grid::NetworkCase;
use crate::rng::stream_rng;

use super::{beta_params_from_moments, UncertaintyError, WindModel};

/// Stream tag separating scenario sampling from other RNG consumers.
const SCENARIO_STREAM: u64 = 0x5ce0;

/// One weighted 24-hour realization of the uncertain quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: u64,
    pub probability: f64,
    /// Multiplier on every bus's forecast load, per hour.
    pub load_mult: Vec<f64>,
    /// Wind speed, m/s per hour.
    pub wind_ms: Vec<f64>,
    /// Incident irradiance, W/m² per hour.
    pub irradiance_wm2: Vec<f64>,
    /// Multiplier on the hourly grid energy price.
    pub price_mult: Vec<f64>,
}

/// A weighted scenario collection; probabilities sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    pub scenarios: Vec<Scenario>,
    /// Seed the set was generated from, when known.
    pub seed: Option<u64>,
    pub steps: usize,
}

impl ScenarioSet {
    pub fn total_probability(&self) -> f64 {
        self.scenarios.iter().map(|s| s.probability).sum()
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub(crate) fn check_normalized(&self) -> Result<(), UncertaintyError> {
        let total = self.total_probability();
        if (total - 1.0).abs() > 1e-12 {
            return Err(UncertaintyError::InvalidParameter(format!(
                "scenario probabilities sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// The single point-forecast scenario: per-hour expected values of every
/// uncertain quantity, probability one.
pub fn forecast_scenario(case: &NetworkCase) -> Scenario {
    let steps = case.horizon.steps;
    let cfg = &case.uncertainty;
    let irradiance = (0..steps)
        .map(|t| cfg.irradiance_mu.value_at(t) * case.profiles.irradiance[t].max(0.0))
        .collect();
    Scenario {
        id: 0,
        probability: 1.0,
        load_mult: vec![1.0; steps],
        wind_ms: case.profiles.wind_speed.clone(),
        irradiance_wm2: irradiance,
        price_mult: vec![1.0; steps],
    }
}

/// Generate `n` equally weighted scenarios by sampling the case's
/// uncertainty model. A pure function of `(case, n, seed)`: scenarios are
/// sampled from per-index RNG streams, so the result does not depend on
/// execution order.
pub fn generate_scenarios(
    case: &NetworkCase,
    n: usize,
    seed: u64,
) -> Result<ScenarioSet, UncertaintyError> {
    if n == 0 {
        return Err(UncertaintyError::InvalidParameter(
            "scenario count must be >= 1".into(),
        ));
    }
    let steps = case.horizon.steps;
    let cfg = &case.uncertainty;
    for (name, profile) in [
        ("wind_speed", &case.profiles.wind_speed),
        ("irradiance", &case.profiles.irradiance),
    ] {
        if profile.len() != steps {
            return Err(UncertaintyError::MissingProfile(name.into()));
        }
    }

    // Per-hour Beta parameters for the clearness fraction; None where the
    // hour is deterministic (sigma 0 or no clear-sky irradiance).
    let beta_by_hour: Vec<Option<(f64, f64)>> = (0..steps)
        .map(|t| {
            let sigma = cfg.irradiance_sigma.value_at(t);
            if sigma == 0.0 || case.profiles.irradiance[t] <= 0.0 {
                Ok(None)
            } else {
                beta_params_from_moments(cfg.irradiance_mu.value_at(t), sigma).map(Some)
            }
        })
        .collect::<Result<_, _>>()?;

    let weibull_mean_factor = gamma(1.0 + 1.0 / cfg.weibull_shape);
    let prob = 1.0 / n as f64;

    let scenarios: Vec<Scenario> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, &[SCENARIO_STREAM, i]);
            let mut load_mult = Vec::with_capacity(steps);
            let mut wind_ms = Vec::with_capacity(steps);
            let mut irradiance_wm2 = Vec::with_capacity(steps);
            let mut price_mult = Vec::with_capacity(steps);
            for t in 0..steps {
                load_mult.push(sample_truncated_normal(&mut rng, cfg.sigma_load));

                let forecast = case.profiles.wind_speed[t];
                let wind = if forecast <= 0.0 {
                    0.0
                } else {
                    match cfg.wind_model {
                        WindModel::Forecast => forecast,
                        WindModel::Rayleigh => {
                            // Scale chosen so the Rayleigh mean (c*sqrt(pi)/2
                            // in the shape-2 convention) equals the forecast
                            // speed; inverse-CDF sampling.
                            let c = forecast * 2.0 / std::f64::consts::PI.sqrt();
                            let u: f64 = rng.gen();
                            c * (-(1.0 - u).ln()).sqrt()
                        }
                        WindModel::Weibull => {
                            let scale = forecast / weibull_mean_factor;
                            WeibullDist::new(scale, cfg.weibull_shape)
                                .expect("validated weibull parameters")
                                .sample(&mut rng)
                        }
                    }
                };
                wind_ms.push(wind);

                let g_clear = case.profiles.irradiance[t].max(0.0);
                let g = match beta_by_hour[t] {
                    None => cfg.irradiance_mu.value_at(t) * g_clear,
                    Some((alpha, beta)) => {
                        let s = BetaDist::new(alpha, beta)
                            .expect("validated beta parameters")
                            .sample(&mut rng);
                        s * g_clear
                    }
                };
                irradiance_wm2.push(g);

                price_mult.push(sample_truncated_normal(&mut rng, cfg.price_sigma));
            }
            Scenario {
                id: i,
                probability: prob,
                load_mult,
                wind_ms,
                irradiance_wm2,
                price_mult,
            }
        })
        .collect();

    let set = ScenarioSet {
        scenarios,
        seed: Some(seed),
        steps,
    };
    set.check_normalized()?;
    Ok(set)
}

/// Multiplicative forecast-error sample: Normal(1, sigma) truncated at zero.
fn sample_truncated_normal<R: Rng>(rng: &mut R, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let dist = NormalDist::new(1.0, sigma).expect("validated sigma");
    dist.sample(rng).max(0.0)
}

/// Write a scenario set as CSV with columns
/// `scenario_id,probability,hour,load_mult,wind_ms,irradiance_wm2,price_mult`.
pub fn write_scenarios_csv(set: &ScenarioSet, path: &Path) -> Result<(), UncertaintyError> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record([
            "scenario_id",
            "probability",
            "hour",
            "load_mult",
            "wind_ms",
            "irradiance_wm2",
            "price_mult",
        ])?;
        for s in &set.scenarios {
            for t in 0..set.steps {
                w.write_record([
                    s.id.to_string(),
                    s.probability.to_string(),
                    t.to_string(),
                    s.load_mult[t].to_string(),
                    s.wind_ms[t].to_string(),
                    s.irradiance_wm2[t].to_string(),
                    s.price_mult[t].to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    Ok(())
}

/// Read a scenario set back from the CSV format written by
/// [`write_scenarios_csv`]. Hours must be contiguous per scenario and
/// probabilities must sum to one.
pub fn read_scenarios_csv(path: &Path) -> Result<ScenarioSet, UncertaintyError> {
    #[derive(Deserialize)]
    struct Row {
        scenario_id: u64,
        probability: f64,
        hour: usize,
        load_mult: f64,
        wind_ms: f64,
        irradiance_wm2: f64,
        price_mult: f64,
    }

    let mut reader = csv::Reader::from_path(path)?;
    let mut scenarios: Vec<Scenario> = Vec::new();
    let mut steps = 0usize;
    for row in reader.deserialize::<Row>() {
        let row = row?;
        let need_new = scenarios
            .last()
            .map(|s| s.id != row.scenario_id)
            .unwrap_or(true);
        if need_new {
            if let Some(prev) = scenarios.last() {
                if prev.load_mult.len() != steps {
                    return Err(UncertaintyError::MalformedCsv(format!(
                        "scenario {} has {} hours, expected {steps}",
                        prev.id,
                        prev.load_mult.len()
                    )));
                }
            }
            scenarios.push(Scenario {
                id: row.scenario_id,
                probability: row.probability,
                load_mult: Vec::new(),
                wind_ms: Vec::new(),
                irradiance_wm2: Vec::new(),
                price_mult: Vec::new(),
            });
        }
        let s = scenarios.last_mut().unwrap();
        if row.hour != s.load_mult.len() {
            return Err(UncertaintyError::MalformedCsv(format!(
                "scenario {}: expected hour {}, found {}",
                s.id,
                s.load_mult.len(),
                row.hour
            )));
        }
        if row.probability != s.probability {
            return Err(UncertaintyError::MalformedCsv(format!(
                "scenario {}: probability changes between rows",
                s.id
            )));
        }
        s.load_mult.push(row.load_mult);
        s.wind_ms.push(row.wind_ms);
        s.irradiance_wm2.push(row.irradiance_wm2);
        s.price_mult.push(row.price_mult);
        steps = steps.max(s.load_mult.len());
    }
    if scenarios.is_empty() {
        return Err(UncertaintyError::MalformedCsv("no scenarios".into()));
    }
    for s in &scenarios {
        if s.load_mult.len() != steps {
            return Err(UncertaintyError::MalformedCsv(format!(
                "scenario {} has {} hours, expected {steps}",
                s.id,
                s.load_mult.len()
            )));
        }
    }
    let set = ScenarioSet {
        scenarios,
        seed: None,
        steps,
    };
    set.check_normalized()?;
    Ok(set)
}
