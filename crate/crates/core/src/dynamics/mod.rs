//! The dampened gradient approximation process and its comparison dynamics.

mod dgap;
mod ode;

pub use dgap::{
    decompose_step, dgap_step, empirical_lipschitz, lipschitz_start_index, mean_field, required_start_index, run_dgap,
    run_dgap_bounded, DgapStep, StepDecomposition,
};
pub use ode::{best_response, integrate_ode, OdeConfig, VectorField, BR_BRACKET_MAX, BR_TOL};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Step sizes α_{n+1} with Σα = ∞ and α → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum StepSchedule {
    /// α_{n+1} = 1/(n+1).
    #[default]
    Harmonic,
    /// α_{n+1} = scale/(n+1)^exponent with exponent in (1/2, 1].
    Power { scale: f64, exponent: f64 },
}

impl StepSchedule {
    pub fn power(scale: f64, exponent: f64) -> Result<Self> {
        let s = StepSchedule::Power { scale, exponent };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Harmonic => Ok(()),
            StepSchedule::Power { scale, exponent } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::InvalidConfig(format!("step scale {scale} must be positive")));
                }
                if !(exponent > 0.5 && exponent <= 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "step exponent {exponent} must lie in (0.5, 1]"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Step used in round `n`, i.e. α_{n+1}.
    #[inline]
    pub fn step(&self, n: u64) -> f64 {
        match *self {
            StepSchedule::Harmonic => 1.0 / (n as f64 + 1.0),
            StepSchedule::Power { scale, exponent } => scale / (n as f64 + 1.0).powf(exponent),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgapConfig {
    #[serde(default)]
    pub schedule: StepSchedule,
    /// First round index n₀; the first step is α_{n₀+1}.
    pub start_index: u64,
    pub n_steps: u64,
    pub seed: u64,
}

impl DgapConfig {
    pub fn new(n_steps: u64, seed: u64) -> Self {
        Self {
            schedule: StepSchedule::Harmonic,
            start_index: 0,
            n_steps,
            seed,
        }
    }

    pub fn with_start_index(mut self, start_index: u64) -> Self {
        self.start_index = start_index;
        self
    }

    pub fn with_schedule(mut self, schedule: StepSchedule) -> Self {
        self.schedule = schedule;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Dgap,
    OdeF,
    OdeArrow,
    OdeRosen,
    OdeBrd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub game: String,
    pub kind: TrajectoryKind,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub n: u64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub meta: TrajectoryMeta,
    pub states: Vec<State>,
    /// Smallest coordinate over every visited state, recorded or not.
    pub min_coordinate: f64,
}

impl Trajectory {
    pub fn last(&self) -> Option<&State> {
        self.states.last()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.x.len())
    }
}
