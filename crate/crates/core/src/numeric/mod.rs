//! Floating-point checks of the dynamics: orbit integration, period
//! measurement on a Poincaré section, injectivity sampling and a search for
//! linear changes of coordinates between Hamiltonians.

mod dop853;
mod equivalence;
mod injectivity;
mod orbit;
mod report;

pub use dop853::{DenseSegment, Dop853, StepControl};
pub use equivalence::{linear_equivalence_search, EquivalenceConfig, EquivalenceSearchResult, RestartOutcome};
pub use injectivity::{injectivity_sample, Collision, InjectivityReport};
pub use orbit::{
    integrate_orbit, isochrony_sweep, measure_period, rotation_defect, start_for_energy, OrbitSample,
    PeriodReport, PhaseField, RotationDefect, SweepOutcome, Trajectory,
};
pub use report::{write_period_csv, write_restart_csv, PeriodRow};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("start point ({0}, {1}) is not finite")]
    NonFiniteStart(f64, f64),
    #[error("start point is the equilibrium at the origin")]
    StartAtOrigin,
    #[error("energy at the start point is {0}, expected a positive value")]
    NonPositiveEnergy(f64),
    #[error("step size underflow at t = {t} (h = {h})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("orbit left the ball of radius {radius} at t = {t}")]
    Escaped { t: f64, radius: f64 },
    #[error("step limit {0} reached")]
    MaxSteps(usize),
    #[error("no return to the section before t = {0}")]
    NoSectionCrossing(f64),
    #[error("energy drift {drift:e} exceeds the limit {limit:e}")]
    EnergyDrift { drift: f64, limit: f64 },
    #[error("hamiltonian has a source map without a shear factorization; no inverse available")]
    NoInverse,
    #[error("invalid energy list: {0}")]
    InvalidEnergies(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("hamiltonian is constant")]
    ConstantHamiltonian,
}

/// Tolerances and limits for orbit integration.
///
/// `rel_tol`, `abs_tol`, `max_step` feed the step-size controller. Returns to
/// the section are located to `section_refinement_tol` in time. A run fails if
/// it passes `t_max`, leaves the ball of radius `escape_radius`, takes more
/// than `max_steps` steps, or drifts in energy by more than
/// `drift_factor * rel_tol * E`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub section_refinement_tol: f64,
    pub t_max: f64,
    pub escape_radius: f64,
    pub max_steps: usize,
    pub drift_factor: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_step: 0.5,
            section_refinement_tol: 1e-12,
            t_max: 100.0,
            escape_radius: 1e8,
            max_steps: 1_000_000,
            drift_factor: 100.0,
        }
    }
}

impl IntegratorConfig {
    /// Default limits with `rel_tol = tol` and `abs_tol = tol / 100`.
    pub fn with_tolerance(tol: f64) -> Self {
        IntegratorConfig {
            rel_tol: tol,
            abs_tol: tol * 1e-2,
            ..Self::default()
        }
    }

    /// Both tolerances multiplied by `factor`.
    pub fn loosened(&self, factor: f64) -> Self {
        IntegratorConfig {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), NumericError> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("section_refinement_tol", self.section_refinement_tol),
            ("t_max", self.t_max),
            ("escape_radius", self.escape_radius),
            ("drift_factor", self.drift_factor),
        ];
        for (name, v) in positive {
            if v.is_nan() || v <= 0.0 {
                return Err(NumericError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(NumericError::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
        }
    }
}
