//! Backward scenario reduction and fidelity reporting.
//!
//! Reduction repeatedly deletes the scenario with the smallest
//! probability-weighted distance to its nearest surviving neighbour and
//! transfers its probability to that neighbour. Distances are Euclidean over
//! the concatenated per-hour arrays with each quantity z-scored by its
//! population standard deviation, so mixed units cannot dominate each other.

use serde::{Deserialize, Serialize};

use super::{Scenario, ScenarioSet, UncertaintyError};

/// Column-wise features of one scenario, z-scored per quantity.
fn feature_matrix(set: &ScenarioSet) -> Vec<Vec<f64>> {
    let quantities: [fn(&Scenario) -> &[f64]; 4] = [
        |s| &s.load_mult,
        |s| &s.wind_ms,
        |s| &s.irradiance_wm2,
        |s| &s.price_mult,
    ];
    let mut scales = [1.0f64; 4];
    for (q, get) in quantities.iter().enumerate() {
        let mut count = 0usize;
        let mut mean = 0.0;
        for s in &set.scenarios {
            for &v in get(s) {
                mean += v;
                count += 1;
            }
        }
        if count == 0 {
            continue;
        }
        mean /= count as f64;
        let mut var = 0.0;
        for s in &set.scenarios {
            for &v in get(s) {
                var += (v - mean) * (v - mean);
            }
        }
        let std = (var / count as f64).sqrt();
        if std > 0.0 {
            scales[q] = std;
        }
    }
    set.scenarios
        .iter()
        .map(|s| {
            let mut row = Vec::with_capacity(4 * set.steps);
            for (q, get) in quantities.iter().enumerate() {
                for &v in get(s) {
                    row.push(v / scales[q]);
                }
            }
            row
        })
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Backward-reduce a scenario set to `target` scenarios. Deterministic for a
/// given input: ties are broken by the lowest scenario id.
pub fn reduce_scenarios(
    set: &ScenarioSet,
    target: usize,
) -> Result<ScenarioSet, UncertaintyError> {
    let n = set.len();
    if target == 0 || target > n {
        return Err(UncertaintyError::BadTarget { target, len: n });
    }
    set.check_normalized()?;
    if target == n {
        return Ok(set.clone());
    }

    let features = feature_matrix(set);
    // Full distance matrix; n is at most a few thousand in practice.
    let mut dist = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&features[i], &features[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    let mut alive = vec![true; n];
    let mut probs: Vec<f64> = set.scenarios.iter().map(|s| s.probability).collect();
    let ids: Vec<u64> = set.scenarios.iter().map(|s| s.id).collect();
    let mut remaining = n;

    while remaining > target {
        // Victim: argmin over survivors of prob * nearest-survivor distance.
        let mut victim = usize::MAX;
        let mut victim_cost = f64::INFINITY;
        let mut victim_heir = usize::MAX;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            let mut nearest = usize::MAX;
            let mut nearest_d = f64::INFINITY;
            for j in 0..n {
                if i == j || !alive[j] {
                    continue;
                }
                let d = dist[i * n + j];
                if d < nearest_d || (d == nearest_d && nearest != usize::MAX && ids[j] < ids[nearest])
                {
                    nearest_d = d;
                    nearest = j;
                }
            }
            let cost = probs[i] * nearest_d;
            if cost < victim_cost
                || (cost == victim_cost && victim != usize::MAX && ids[i] < ids[victim])
            {
                victim_cost = cost;
                victim = i;
                victim_heir = nearest;
            }
        }
        alive[victim] = false;
        probs[victim_heir] += probs[victim];
        probs[victim] = 0.0;
        remaining -= 1;
    }

    let scenarios = set
        .scenarios
        .iter()
        .enumerate()
        .filter(|(i, _)| alive[*i])
        .map(|(i, s)| Scenario {
            probability: probs[i],
            ..s.clone()
        })
        .collect();
    let out = ScenarioSet {
        scenarios,
        seed: set.seed,
        steps: set.steps,
    };
    out.check_normalized()?;
    Ok(out)
}

/// Fidelity of one quantity's probability-weighted hourly means after
/// reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantityFidelity {
    pub quantity: String,
    /// Largest absolute error of any hourly mean.
    pub max_abs_error: f64,
    pub mean_abs_error: f64,
    /// Largest relative error (absolute where the original mean is ~0).
    pub max_rel_error: f64,
    /// Coefficient of variation of the reduced set's daily-mean estimator.
    pub cv: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FidelityReport {
    pub quantities: Vec<QuantityFidelity>,
}

impl FidelityReport {
    pub fn quantity(&self, name: &str) -> Option<&QuantityFidelity> {
        self.quantities.iter().find(|q| q.quantity == name)
    }
}

fn weighted_hourly_means(set: &ScenarioSet, get: fn(&Scenario) -> &[f64]) -> Vec<f64> {
    let mut means = vec![0.0; set.steps];
    for s in &set.scenarios {
        for (t, &v) in get(s).iter().enumerate() {
            means[t] += s.probability * v;
        }
    }
    means
}

/// Compare probability-weighted hourly means between an original and a
/// reduced set, per quantity.
pub fn reduction_fidelity(
    original: &ScenarioSet,
    reduced: &ScenarioSet,
) -> Result<FidelityReport, UncertaintyError> {
    if original.steps != reduced.steps {
        return Err(UncertaintyError::HorizonMismatch(
            original.steps,
            reduced.steps,
        ));
    }
    let quantities: [(&str, fn(&Scenario) -> &[f64]); 4] = [
        ("load_mult", |s| &s.load_mult),
        ("wind_ms", |s| &s.wind_ms),
        ("irradiance_wm2", |s| &s.irradiance_wm2),
        ("price_mult", |s| &s.price_mult),
    ];
    let mut out = Vec::new();
    for (name, get) in quantities {
        let a = weighted_hourly_means(original, get);
        let b = weighted_hourly_means(reduced, get);
        let mut max_abs = 0.0f64;
        let mut sum_abs = 0.0f64;
        let mut max_rel = 0.0f64;
        for t in 0..original.steps {
            let err = (a[t] - b[t]).abs();
            max_abs = max_abs.max(err);
            sum_abs += err;
            let rel = if a[t].abs() > 1e-9 { err / a[t].abs() } else { err };
            max_rel = max_rel.max(rel);
        }

        // CV of the weighted-mean estimator of the daily mean: the standard
        // error of a weighted mean is sigma * sqrt(sum p^2).
        let daily: Vec<f64> = reduced
            .scenarios
            .iter()
            .map(|s| {
                let vs = get(s);
                vs.iter().sum::<f64>() / vs.len().max(1) as f64
            })
            .collect();
        let mean: f64 = reduced
            .scenarios
            .iter()
            .zip(&daily)
            .map(|(s, &v)| s.probability * v)
            .sum();
        let var: f64 = reduced
            .scenarios
            .iter()
            .zip(&daily)
            .map(|(s, &v)| s.probability * (v - mean) * (v - mean))
            .sum();
        let p2: f64 = reduced
            .scenarios
            .iter()
            .map(|s| s.probability * s.probability)
            .sum();
        let cv = if mean.abs() > 1e-12 {
            var.sqrt() * p2.sqrt() / mean.abs()
        } else {
            0.0
        };

        out.push(QuantityFidelity {
            quantity: name.into(),
            max_abs_error: max_abs,
            mean_abs_error: sum_abs / original.steps as f64,
            max_rel_error: max_rel,
            cv,
        });
    }
    Ok(FidelityReport { quantities: out })
}
