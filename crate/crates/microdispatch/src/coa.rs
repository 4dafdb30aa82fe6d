//! Cuckoo optimization over bounded real vectors.
//!
//! Each habitat lays a random clutch of eggs uniformly inside its egg-laying
//! radius (ELR, proportional to its share of all eggs), the worst fraction
//! of new eggs is discarded, the population is truncated by fitness, and the
//! survivors migrate most of the way toward the centroid of the best
//! cluster with a per-dimension random deviation. Fitness is minimized.
//!
//! All randomness comes from per-(generation, individual) streams derived
//! from the seed, so a run is reproducible bit for bit regardless of how the
//! objective evaluations are scheduled.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::stream_rng;

const STREAM_INIT: u64 = 0xc0a0;
const STREAM_EGGS: u64 = 0xc0a1;
const STREAM_MIGRATE: u64 = 0xc0a2;
const STREAM_KMEANS: u64 = 0xc0a3;

/// Fitness assigned to non-finite objective values so ranking stays total.
pub const NON_FINITE_FITNESS: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum CoaError {
    #[error("population is degenerate (all habitats identical)")]
    DegeneratePopulation,
}

/// One candidate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Habitat {
    pub position: Vec<f64>,
    pub fitness: f64,
    pub n_eggs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoaParams {
    pub n_initial: usize,
    pub min_eggs: usize,
    pub max_eggs: usize,
    pub max_population: usize,
    /// ELR scale coefficient.
    pub alpha_elr: f64,
    /// Fraction of the distance to the goal point covered in migration.
    pub migration_ratio: f64,
    /// Half-width of the uniform per-dimension deviation angle, radians.
    pub deviation_angle: f64,
    pub n_clusters: usize,
    pub max_iterations: usize,
    /// Iterations without relative improvement before declaring convergence.
    pub convergence_window: usize,
    pub convergence_tol: f64,
    /// Fraction of each generation's eggs discarded outright.
    pub egg_kill_fraction: f64,
    /// Hard cap on objective evaluations (soft stop: best-so-far returned).
    pub max_evaluations: Option<usize>,
    /// Optional heavy-tailed step noise during migration, for escaping
    /// premature convergence. Off by default.
    pub heavy_tail_perturbation: bool,
    pub seed: u64,
}

impl Default for CoaParams {
    fn default() -> Self {
        CoaParams {
            n_initial: 20,
            min_eggs: 2,
            max_eggs: 4,
            max_population: 50,
            alpha_elr: 1.0,
            migration_ratio: 0.9,
            deviation_angle: std::f64::consts::PI / 6.0,
            n_clusters: 3,
            max_iterations: 200,
            convergence_window: 20,
            convergence_tol: 1e-9,
            egg_kill_fraction: 0.10,
            max_evaluations: None,
            heavy_tail_perturbation: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// Best-so-far and population mean per iteration (entry 0 is the
    /// initial population).
    pub history: Vec<IterationStats>,
    pub evaluations: usize,
    pub converged: bool,
}

/// Per-dimension egg-laying radius: the cuckoo's share of all eggs scaled
/// onto each dimension's range.
pub fn elr(n_eggs: usize, total_eggs: usize, lower: &[f64], upper: &[f64], alpha: f64) -> Vec<f64> {
    assert!(total_eggs > 0, "total egg count must be positive");
    let share = n_eggs as f64 / total_eggs as f64;
    lower
        .iter()
        .zip(upper)
        .map(|(&lo, &hi)| (alpha * share * (hi - lo)).clamp(0.0, hi - lo))
        .collect()
}

/// Uniform egg positions inside `[pos - radius, pos + radius]`, clamped to
/// the bounds.
pub fn lay_eggs<R: Rng>(
    position: &[f64],
    radius: &[f64],
    n_eggs: usize,
    lower: &[f64],
    upper: &[f64],
    rng: &mut R,
) -> Vec<Vec<f64>> {
    (0..n_eggs)
        .map(|_| {
            position
                .iter()
                .zip(radius)
                .zip(lower.iter().zip(upper))
                .map(|((&x, &r), (&lo, &hi))| {
                    let v = if r > 0.0 { x + rng.gen_range(-r..=r) } else { x };
                    v.clamp(lo, hi)
                })
                .collect()
        })
        .collect()
}

/// Discard the worst `kill_fraction` of the new eggs, merge with the
/// parents, and keep the `max_population` fittest (stable order on ties, so
/// earlier insertion wins).
pub fn survival_selection(
    mut population: Vec<Habitat>,
    mut eggs: Vec<Habitat>,
    max_population: usize,
    kill_fraction: f64,
) -> Vec<Habitat> {
    let kill = (eggs.len() as f64 * kill_fraction).floor() as usize;
    if kill > 0 {
        eggs.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        eggs.truncate(eggs.len() - kill);
    }
    population.extend(eggs);
    population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
    population.truncate(max_population);
    population
}

/// Group habitats with k-means (fixed 10 Lloyd iterations, seeded choice of
/// initial centroids), pick the cluster with the best mean fitness, and
/// move every habitat `migration_ratio` of the way toward its centroid with
/// a per-dimension deviation. Positions are clamped to the bounds and
/// fitnesses are left stale for the caller to re-evaluate.
pub fn cluster_and_migrate<R: Rng>(
    population: &mut [Habitat],
    params: &CoaParams,
    lower: &[f64],
    upper: &[f64],
    kmeans_rng: &mut R,
    mut deviation_rng: impl FnMut(usize) -> rand_chacha::ChaCha12Rng,
) -> Result<(), CoaError> {
    let n = population.len();
    let dim = lower.len();
    let identical = population
        .iter()
        .all(|h| h.position == population[0].position);
    if identical {
        return Err(CoaError::DegeneratePopulation);
    }

    let k = params.n_clusters.clamp(1, n);
    // Seeded init: the fittest habitat anchors the first centroid, the rest
    // are distinct random members.
    let fittest = population
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.fitness.total_cmp(&b.1.fitness))
        .map(|(i, _)| i)
        .unwrap();
    let mut indices: Vec<usize> = (0..n).collect();
    indices.swap(0, fittest);
    for i in 1..k {
        let j = kmeans_rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut centroids: Vec<Vec<f64>> = indices[..k]
        .iter()
        .map(|&i| population[i].position.clone())
        .collect();

    let mut assignment = vec![0usize; n];
    for _ in 0..10 {
        for (i, h) in population.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d: f64 = h
                    .position
                    .iter()
                    .zip(centroid)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            assignment[i] = best;
        }
        for (c, centroid) in centroids.iter_mut().enumerate() {
            let members: Vec<&Habitat> = population
                .iter()
                .enumerate()
                .filter(|(i, _)| assignment[*i] == c)
                .map(|(_, h)| h)
                .collect();
            if members.is_empty() {
                continue; // keep the previous centroid
            }
            for d in 0..dim {
                centroid[d] =
                    members.iter().map(|h| h.position[d]).sum::<f64>() / members.len() as f64;
            }
        }
    }

    // Goal point: centroid of the non-empty cluster with the best (lowest)
    // mean fitness.
    let mut goal = None;
    let mut goal_mean = f64::INFINITY;
    for c in 0..k {
        let members: Vec<&Habitat> = population
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment[*i] == c)
            .map(|(_, h)| h)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mean = members.iter().map(|h| h.fitness).sum::<f64>() / members.len() as f64;
        if mean < goal_mean {
            goal_mean = mean;
            goal = Some(centroids[c].clone());
        }
    }
    let goal = goal.expect("at least one cluster is non-empty");

    for (i, h) in population.iter_mut().enumerate() {
        let mut rng = deviation_rng(i);
        for d in 0..dim {
            let step = params.migration_ratio * (goal[d] - h.position[d]);
            let phi = if params.deviation_angle > 0.0 {
                rng.gen_range(-params.deviation_angle..=params.deviation_angle)
            } else {
                0.0
            };
            let mut x = h.position[d] + step * (1.0 + phi.tan());
            if params.heavy_tail_perturbation {
                // Sparse Cauchy kicks: roughly one dimension per habitat
                // jumps, the rest keep their exact contracted position, so a
                // kick that lands in a better basin is not drowned in noise
                // from the other dimensions.
                if rng.gen::<f64>() < 1.0 / dim as f64 {
                    let u: f64 = rng.gen();
                    x += 0.01 * (upper[d] - lower[d]) * (std::f64::consts::PI * (u - 0.5)).tan();
                }
            }
            h.position[d] = x.clamp(lower[d], upper[d]);
        }
    }
    Ok(())
}

/// Minimize `objective` over the box `[lower, upper]`.
pub fn optimize<F>(objective: F, lower: &[f64], upper: &[f64], params: &CoaParams) -> OptResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lower.len();
    assert_eq!(dim, upper.len(), "bound arrays must have equal length");
    assert!(dim > 0, "need at least one dimension");
    for d in 0..dim {
        assert!(
            lower[d].is_finite() && upper[d].is_finite() && lower[d] <= upper[d],
            "bounds must be finite with lower <= upper (dimension {d})"
        );
    }
    assert!(params.n_initial >= 1 && params.max_population >= 1);
    assert!(params.min_eggs >= 1 && params.min_eggs <= params.max_eggs);

    let budget = params.max_evaluations.unwrap_or(usize::MAX);
    let mut evaluations = 0usize;

    let guard = |v: f64| if v.is_finite() { v } else { NON_FINITE_FITNESS };
    let eval_batch = |positions: Vec<Vec<f64>>, evaluations: &mut usize| -> Vec<Habitat> {
        let take = positions.len().min(budget - *evaluations);
        let kept = &positions[..take];
        let fitnesses: Vec<f64> = kept.par_iter().map(|p| guard(objective(p))).collect();
        *evaluations += take;
        kept.iter()
            .zip(fitnesses)
            .map(|(p, f)| Habitat {
                position: p.clone(),
                fitness: f,
                n_eggs: 0,
            })
            .collect()
    };

    // Initial population, uniform over the box.
    let init_positions: Vec<Vec<f64>> = (0..params.n_initial)
        .map(|i| {
            let mut rng = stream_rng(params.seed, &[STREAM_INIT, i as u64]);
            (0..dim)
                .map(|d| {
                    if lower[d] == upper[d] {
                        lower[d]
                    } else {
                        rng.gen_range(lower[d]..=upper[d])
                    }
                })
                .collect()
        })
        .collect();
    let mut population = eval_batch(init_positions, &mut evaluations);
    assert!(
        !population.is_empty(),
        "evaluation budget too small for the initial population"
    );

    let mut best = population
        .iter()
        .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .cloned()
        .unwrap();
    let mean = population.iter().map(|h| h.fitness).sum::<f64>() / population.len() as f64;
    let mut history = vec![IterationStats {
        iteration: 0,
        best_fitness: best.fitness,
        mean_fitness: mean,
        evaluations,
    }];
    let mut converged = false;

    for iter in 1..=params.max_iterations {
        if evaluations >= budget {
            break;
        }

        // Egg laying within each cuckoo's ELR.
        let mut total_eggs = 0usize;
        for (i, h) in population.iter_mut().enumerate() {
            let mut rng = stream_rng(params.seed, &[STREAM_EGGS, iter as u64, i as u64]);
            h.n_eggs = rng.gen_range(params.min_eggs..=params.max_eggs);
            total_eggs += h.n_eggs;
        }
        let mut egg_positions = Vec::with_capacity(total_eggs);
        for (i, h) in population.iter().enumerate() {
            let mut rng = stream_rng(params.seed, &[STREAM_EGGS, iter as u64, i as u64]);
            let _ = rng.gen_range(params.min_eggs..=params.max_eggs); // reproduce the count draw
            let radius = elr(h.n_eggs, total_eggs, lower, upper, params.alpha_elr);
            egg_positions.extend(lay_eggs(
                &h.position,
                &radius,
                h.n_eggs,
                lower,
                upper,
                &mut rng,
            ));
        }
        let eggs = eval_batch(egg_positions, &mut evaluations);
        for egg in &eggs {
            if egg.fitness < best.fitness {
                best = egg.clone();
            }
        }
        population = survival_selection(
            population,
            eggs,
            params.max_population,
            params.egg_kill_fraction,
        );

        // Migration toward the best cluster; moved habitats need fresh
        // fitness, so skip it when the evaluation budget cannot pay for it.
        if evaluations + population.len() <= budget {
            let mut kmeans_rng = stream_rng(params.seed, &[STREAM_KMEANS, iter as u64]);
            let seed = params.seed;
            let moved = cluster_and_migrate(
                &mut population,
                params,
                lower,
                upper,
                &mut kmeans_rng,
                |i| stream_rng(seed, &[STREAM_MIGRATE, iter as u64, i as u64]),
            );
            if moved.is_ok() {
                let positions: Vec<Vec<f64>> =
                    population.iter().map(|h| h.position.clone()).collect();
                let refreshed = eval_batch(positions, &mut evaluations);
                for (h, r) in population.iter_mut().zip(refreshed) {
                    h.fitness = r.fitness;
                }
            }
        }

        for h in &population {
            if h.fitness < best.fitness {
                best = h.clone();
            }
        }
        // Elitism across the migration step: if the champion was migrated
        // away, put it back in place of the current worst habitat.
        if population.iter().all(|h| h.fitness > best.fitness) {
            let worst = population
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.fitness.total_cmp(&b.1.fitness))
                .map(|(i, _)| i)
                .unwrap();
            population[worst] = best.clone();
        }
        debug_assert!(best.fitness <= history.last().unwrap().best_fitness);
        let mean = population.iter().map(|h| h.fitness).sum::<f64>() / population.len() as f64;
        history.push(IterationStats {
            iteration: iter,
            best_fitness: best.fitness,
            mean_fitness: mean,
            evaluations,
        });

        // Converged when the windowed relative improvement stalls.
        if iter >= params.convergence_window {
            let then = history[history.len() - 1 - params.convergence_window].best_fitness;
            let now = best.fitness;
            let scale = then.abs().max(1e-30);
            if (then - now) / scale < params.convergence_tol {
                converged = true;
                break;
            }
        }
    }

    OptResult {
        best_position: best.position,
        best_fitness: best.fitness,
        history,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn elr_formula_cases() {
        let lo = [0.0, -5.0];
        let hi = [5.0, 5.0];
        // single cuckoo holding all eggs, alpha 1: full range
        assert_eq!(elr(4, 4, &lo, &hi, 1.0), vec![5.0, 10.0]);
        // zero eggs: zero radius
        assert_eq!(elr(0, 10, &lo, &hi, 1.0), vec![0.0, 0.0]);
        // 2 of 10 eggs over a range of 5: radius 1
        assert_eq!(elr(2, 10, &lo[..1], &hi[..1], 1.0), vec![1.0]);
    }

    #[test]
    fn eggs_stay_at_position_for_zero_radius_and_inside_bounds() {
        let lo = [0.0, 0.0];
        let hi = [1.0, 1.0];
        let mut rng = stream_rng(1, &[1]);
        let eggs = lay_eggs(&[0.5, 0.5], &[0.0, 0.0], 3, &lo, &hi, &mut rng);
        assert!(eggs.iter().all(|e| e == &[0.5, 0.5]));
        // habitat at a corner with a large radius: all eggs clamped inside
        let eggs = lay_eggs(&[1.0, 0.0], &[0.8, 0.8], 64, &lo, &hi, &mut rng);
        for e in &eggs {
            assert!(e.iter().zip(lo.iter().zip(&hi)).all(|(&v, (&l, &h))| v >= l && v <= h));
        }
    }

    #[test]
    fn eggs_reproducible_for_fixed_seed() {
        let lo = [-1.0; 4];
        let hi = [1.0; 4];
        let a = lay_eggs(&[0.0; 4], &[0.5; 4], 5, &lo, &hi, &mut stream_rng(9, &[2]));
        let b = lay_eggs(&[0.0; 4], &[0.5; 4], 5, &lo, &hi, &mut stream_rng(9, &[2]));
        assert_eq!(a, b);
    }

    fn habitat(pos: &[f64], fit: f64) -> Habitat {
        Habitat {
            position: pos.to_vec(),
            fitness: fit,
            n_eggs: 0,
        }
    }

    #[test]
    fn selection_keeps_everyone_under_cap_without_killing() {
        let pop = vec![habitat(&[0.0], 1.0), habitat(&[1.0], 2.0)];
        let eggs = vec![habitat(&[2.0], 3.0)];
        let out = survival_selection(pop, eggs, 10, 0.0);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].fitness, 1.0);
    }

    #[test]
    fn selection_breaks_ties_by_insertion_order() {
        let pop = vec![habitat(&[0.0], 1.0), habitat(&[1.0], 1.0), habitat(&[2.0], 1.0)];
        let eggs = vec![habitat(&[3.0], 1.0)];
        let out = survival_selection(pop, eggs, 2, 0.0);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].position, vec![0.0]);
        assert_eq!(out[1].position, vec![1.0]);
    }

    #[test]
    fn degenerate_population_skips_migration() {
        let mut pop = vec![habitat(&[1.0, 1.0], 1.0), habitat(&[1.0, 1.0], 2.0)];
        let err = cluster_and_migrate(
            &mut pop,
            &CoaParams::default(),
            &[0.0, 0.0],
            &[2.0, 2.0],
            &mut stream_rng(0, &[0]),
            |i| stream_rng(0, &[1, i as u64]),
        );
        assert_eq!(err, Err(CoaError::DegeneratePopulation));
        assert_eq!(pop[0].position, vec![1.0, 1.0]);
    }

    #[test]
    fn full_migration_without_deviation_reaches_centroid() {
        let mut pop = vec![
            habitat(&[0.0, 0.0], 1.0),
            habitat(&[2.0, 0.0], 2.0),
            habitat(&[1.0, 3.0], 3.0),
        ];
        let params = CoaParams {
            migration_ratio: 1.0,
            deviation_angle: 0.0,
            n_clusters: 1,
            ..CoaParams::default()
        };
        cluster_and_migrate(
            &mut pop,
            &params,
            &[-10.0, -10.0],
            &[10.0, 10.0],
            &mut stream_rng(0, &[0]),
            |i| stream_rng(0, &[1, i as u64]),
        )
        .unwrap();
        for h in &pop {
            assert!((h.position[0] - 1.0).abs() < 1e-12);
            assert!((h.position[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn migration_goal_sits_in_the_superior_cluster() {
        // Two well-separated groups; the left one has far better fitness.
        let mut pop = vec![
            habitat(&[0.1, 0.0], 0.1),
            habitat(&[-0.1, 0.1], 0.2),
            habitat(&[0.0, -0.1], 0.15),
            habitat(&[8.0, 8.0], 50.0),
            habitat(&[8.2, 7.9], 60.0),
            habitat(&[7.9, 8.1], 55.0),
        ];
        let before: Vec<Vec<f64>> = pop.iter().map(|h| h.position.clone()).collect();
        let params = CoaParams {
            n_clusters: 2,
            deviation_angle: 0.0,
            migration_ratio: 0.9,
            ..CoaParams::default()
        };
        cluster_and_migrate(
            &mut pop,
            &params,
            &[-10.0, -10.0],
            &[10.0, 10.0],
            &mut stream_rng(3, &[0]),
            |i| stream_rng(3, &[1, i as u64]),
        )
        .unwrap();
        // Brute-force goal: centroid of the three best habitats.
        let goal = [0.0, 0.0];
        for (h, old) in pop.iter().zip(&before) {
            let d_new: f64 = h
                .position
                .iter()
                .zip(goal)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let d_old: f64 = old.iter().zip(goal).map(|(a, b)| (a - b) * (a - b)).sum();
            assert!(d_new < d_old + 0.05, "habitat moved away from the goal");
        }
    }

    #[test]
    fn zero_iterations_returns_best_of_initial_population() {
        let params = CoaParams {
            max_iterations: 0,
            seed: 5,
            ..CoaParams::default()
        };
        let result = optimize(sphere, &[-5.0, -5.0], &[5.0, 5.0], &params);
        assert_eq!(result.history.len(), 1);
        assert_eq!(result.evaluations, params.n_initial);
        assert!(!result.converged);
        assert!(result.best_fitness >= 0.0);
    }

    #[test]
    fn sphere_converges_within_budget() {
        let params = CoaParams {
            max_evaluations: Some(5000),
            max_iterations: 500,
            convergence_window: 500, // run the budget out
            seed: 42,
            ..CoaParams::default()
        };
        let result = optimize(sphere, &[-5.0, -5.0], &[5.0, 5.0], &params);
        assert!(result.evaluations <= 5000);
        assert!(
            result.best_fitness < 1e-6,
            "fitness {}",
            result.best_fitness
        );
    }

    #[test]
    fn history_is_monotone_and_bounds_hold() {
        let params = CoaParams {
            max_iterations: 60,
            seed: 7,
            ..CoaParams::default()
        };
        let lo = [-3.0, -3.0, -3.0];
        let hi = [3.0, 3.0, 3.0];
        let result = optimize(sphere, &lo, &hi, &params);
        for w in result.history.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        for (d, &v) in result.best_position.iter().enumerate() {
            assert!(v >= lo[d] && v <= hi[d]);
        }
    }

    #[test]
    fn identical_seed_gives_bitwise_identical_results() {
        let params = CoaParams {
            max_iterations: 30,
            seed: 11,
            ..CoaParams::default()
        };
        let a = optimize(sphere, &[-5.0; 4], &[5.0; 4], &params);
        let b = optimize(sphere, &[-5.0; 4], &[5.0; 4], &params);
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_respected_exactly() {
        let params = CoaParams {
            max_evaluations: Some(137),
            max_iterations: 1000,
            seed: 3,
            ..CoaParams::default()
        };
        let result = optimize(sphere, &[-5.0; 3], &[5.0; 3], &params);
        assert!(result.evaluations <= 137);
        assert!(!result.converged);
    }
}
