//! Multi-start Levenberg–Marquardt search for `A` with `H_a(p) = H_b(A p)`.
//!
//! A small residual floor that persists over all restarts is evidence, not
//! proof, that no such `A` exists.

use super::{NumericError, PhaseField};
use crate::families::Hamiltonian;
use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const DET_MIN: f64 = 0.1;
const DET_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquivalenceConfig {
    /// Samples are drawn uniformly from `[-sample_box, sample_box]^2`.
    pub sample_box: f64,
    pub sample_count: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Restrict to `|det A| = 1` instead of `|det A|` in `[0.1, 10]`.
    pub unit_determinant: bool,
    pub max_iterations: usize,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            sample_box: 1.0,
            sample_count: 256,
            restarts: 20,
            seed: 0,
            unit_determinant: false,
            max_iterations: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartOutcome {
    pub initial: [[f64; 2]; 2],
    pub matrix: [[f64; 2]; 2],
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceSearchResult {
    pub best_matrix: [[f64; 2]; 2],
    /// Root-mean-square of `H_a(p) - H_b(A p)` over the samples.
    pub best_residual: f64,
    pub best_restart: usize,
    pub restarts: usize,
    pub sample_count: usize,
    pub converged_restarts: usize,
    pub unit_determinant: bool,
    pub restart_outcomes: Vec<RestartOutcome>,
}

fn to_matrix(a: &[f64; 4]) -> [[f64; 2]; 2] {
    [[a[0], a[1]], [a[2], a[3]]]
}

fn project(mut a: [f64; 4], unit: bool) -> [f64; 4] {
    let mut det = a[0] * a[3] - a[1] * a[2];
    if det.abs() < 1e-12 {
        a[0] += 1e-3;
        a[3] += 1e-3;
        det = a[0] * a[3] - a[1] * a[2];
    }
    let target = if unit { 1.0 } else { det.abs().clamp(DET_MIN, DET_MAX) };
    let s = (target / det.abs()).sqrt();
    if s != 1.0 {
        a.iter_mut().for_each(|v| *v *= s);
    }
    a
}

struct Objective<'a> {
    hb: &'a PhaseField,
    points: &'a [[f64; 2]],
    targets: &'a [f64],
}

impl Objective<'_> {
    fn cost(&self, a: &[f64; 4]) -> f64 {
        let mut c = 0.0;
        for (p, t) in self.points.iter().zip(self.targets) {
            let q = [a[0] * p[0] + a[1] * p[1], a[2] * p[0] + a[3] * p[1]];
            let r = t - self.hb.energy(q);
            c += r * r;
        }
        if c.is_finite() {
            c
        } else {
            f64::INFINITY
        }
    }

    /// Gauss–Newton normal matrix and gradient of `cost / 2`.
    fn normal_equations(&self, a: &[f64; 4]) -> (Matrix4<f64>, Vector4<f64>) {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (p, t) in self.points.iter().zip(self.targets) {
            let q = [a[0] * p[0] + a[1] * p[1], a[2] * p[0] + a[3] * p[1]];
            let r = t - self.hb.energy(q);
            let g = self.hb.gradient(q);
            let row = Vector4::new(-g[0] * p[0], -g[0] * p[1], -g[1] * p[0], -g[1] * p[1]);
            jtj += row * row.transpose();
            jtr += row * r;
        }
        (jtj, jtr)
    }

    fn minimize(&self, start: [f64; 4], unit: bool, max_iterations: usize) -> RestartOutcome {
        let mut a = project(start, unit);
        let mut cost = self.cost(&a);
        let mut mu = 1e-3;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < max_iterations {
            iterations += 1;
            let (jtj, jtr) = self.normal_equations(&a);
            if !jtj.iter().all(|v| v.is_finite()) {
                break;
            }
            if jtr.norm() <= 1e-15 * (1.0 + cost) {
                converged = true;
                break;
            }
            let mut accepted = false;
            while mu < 1e16 {
                let mut damped = jtj;
                for i in 0..4 {
                    damped[(i, i)] += mu * jtj[(i, i)].max(1e-12);
                }
                let Some(step) = damped.lu().solve(&(-jtr)) else {
                    mu *= 4.0;
                    continue;
                };
                let trial = project(std::array::from_fn(|i| a[i] + step[i]), unit);
                let trial_cost = self.cost(&trial);
                if trial_cost < cost {
                    let moved = (0..4).map(|i| (trial[i] - a[i]).abs()).fold(0.0, f64::max);
                    let drop = cost - trial_cost;
                    a = trial;
                    cost = trial_cost;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                    if moved <= 1e-14 * scale || drop <= 1e-16 * cost {
                        converged = true;
                    }
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                // No descent direction left at any damping: a local minimum.
                converged = true;
            }
            if converged || cost == 0.0 {
                converged = true;
                break;
            }
        }
        RestartOutcome {
            initial: to_matrix(&start),
            matrix: to_matrix(&a),
            residual: (cost / self.points.len() as f64).sqrt(),
            iterations,
            converged,
        }
    }
}

/// Minimizes the root-mean-square of `H_a(p) - H_b(A p)` over `2 x 2` matrices.
///
/// Restart 0 starts at the identity; restart `i > 0` starts from a matrix with
/// entries uniform in `[-2, 2]` drawn from a generator seeded with `seed + i`.
/// Every iterate is rescaled into the admissible determinant range. Restarts
/// run in parallel and are reported in index order.
pub fn linear_equivalence_search(
    h_a: &Hamiltonian,
    h_b: &Hamiltonian,
    cfg: &EquivalenceConfig,
) -> Result<EquivalenceSearchResult, NumericError> {
    if h_a.h.is_constant() || h_b.h.is_constant() {
        return Err(NumericError::ConstantHamiltonian);
    }
    if cfg.sample_box.is_nan() || cfg.sample_box <= 0.0 || cfg.sample_count == 0 || cfg.restarts == 0 {
        return Err(NumericError::InvalidConfig(
            "sample_box, sample_count and restarts must be positive".into(),
        ));
    }
    let (fa, fb) = (PhaseField::new(h_a), PhaseField::new(h_b));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<[f64; 2]> = (0..cfg.sample_count)
        .map(|_| {
            [
                rng.random_range(-cfg.sample_box..=cfg.sample_box),
                rng.random_range(-cfg.sample_box..=cfg.sample_box),
            ]
        })
        .collect();
    let targets: Vec<f64> = points.iter().map(|p| fa.energy(*p)).collect();
    let objective = Objective {
        hb: &fb,
        points: &points,
        targets: &targets,
    };

    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| {
            let start = if i == 0 {
                [1.0, 0.0, 0.0, 1.0]
            } else {
                let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
                std::array::from_fn(|_| r.random_range(-2.0..=2.0))
            };
            objective.minimize(start, cfg.unit_determinant, cfg.max_iterations)
        })
        .collect();

    let best_restart = outcomes
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.residual.total_cmp(&b.residual))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best = &outcomes[best_restart];
    Ok(EquivalenceSearchResult {
        best_matrix: best.matrix,
        best_residual: best.residual,
        best_restart,
        restarts: cfg.restarts,
        sample_count: cfg.sample_count,
        converged_restarts: outcomes.iter().filter(|o| o.converged).count(),
        unit_determinant: cfg.unit_determinant,
        restart_outcomes: outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{hamiltonian_of, FamilySpec};
    use crate::poly::rat;

    #[test]
    fn projection_bounds_determinant() {
        let a = project([0.01, 0.0, 0.0, 0.01], false);
        assert!((a[0] * a[3] - 0.1).abs() < 1e-12);
        let a = project([10.0, 0.0, 0.0, 10.0], false);
        assert!((a[0] * a[3] - 10.0).abs() < 1e-9);
        let a = project([0.0, 3.0, 2.0, 0.0], true);
        assert!((a[0] * a[3] - a[1] * a[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_equivalence_at_identity() {
        let f = FamilySpec::triangular(vec![rat(1, 2), rat(-1, 3)], rat(2, 1)).build().unwrap();
        let h = hamiltonian_of(&f).unwrap();
        let cfg = EquivalenceConfig {
            restarts: 3,
            ..Default::default()
        };
        let r = linear_equivalence_search(&h, &h, &cfg).unwrap();
        assert!(r.best_residual < 1e-10);
        assert_eq!(r.restart_outcomes[0].residual, 0.0);
        let m = r.restart_outcomes[0].matrix;
        assert_eq!(m, [[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = FamilySpec::triangular(vec![rat(1, 1)], rat(0, 1)).build().unwrap();
        let g = FamilySpec::triangular(vec![rat(2, 1)], rat(1, 1)).build().unwrap();
        let (ha, hb) = (hamiltonian_of(&f).unwrap(), hamiltonian_of(&g).unwrap());
        let cfg = EquivalenceConfig {
            restarts: 4,
            seed: 7,
            ..Default::default()
        };
        let a = linear_equivalence_search(&ha, &hb, &cfg).unwrap();
        let b = linear_equivalence_search(&ha, &hb, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
