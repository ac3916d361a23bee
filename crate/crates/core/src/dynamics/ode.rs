//! Fixed-step integration of the mean-field ODE and its comparison systems.

use super::dgap::mean_field;
use super::{State, Trajectory, TrajectoryKind, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::game::{check_dim, ActionProfile, BoundingBox, Game};
use serde::{Deserialize, Serialize};

/// Bisection tolerance for best responses.
pub const BR_TOL: f64 = 1e-10;
/// Initial bracket for best responses.
pub const BR_BRACKET_MAX: f64 = 10.0;
const BR_MAX_DOUBLINGS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorField {
    /// ẋ_i = x_i ∂u_i/∂x_i.
    Dampened,
    /// Projected gradient: ẋ_i = ∂u_i/∂x_i unless x_i = 0 and the gradient is negative.
    Arrow,
    /// Weighted gradient ẋ_i = r_i ∂u_i/∂x_i, clamped at the boundary.
    Rosen { weights: Vec<f64> },
    /// ẋ = −x + BR(x).
    BestResponse { bracket_max: f64 },
}

impl VectorField {
    fn kind(&self) -> TrajectoryKind {
        match self {
            VectorField::Dampened => TrajectoryKind::OdeF,
            VectorField::Arrow => TrajectoryKind::OdeArrow,
            VectorField::Rosen { .. } => TrajectoryKind::OdeRosen,
            VectorField::BestResponse { .. } => TrajectoryKind::OdeBrd,
        }
    }

    fn is_smooth(&self) -> bool {
        matches!(self, VectorField::Dampened | VectorField::BestResponse { .. })
    }

    pub fn eval(&self, game: &dyn Game, x: &[f64]) -> Result<Vec<f64>> {
        let v = match self {
            VectorField::Dampened => mean_field(game, x)?,
            VectorField::Arrow => (0..x.len())
                .map(|i| {
                    let g = game.own_gradient(i, x);
                    if x[i] <= 0.0 && g < 0.0 {
                        0.0
                    } else {
                        g
                    }
                })
                .collect(),
            VectorField::Rosen { weights } => (0..x.len())
                .map(|i| {
                    let g = weights[i] * game.own_gradient(i, x);
                    if x[i] <= 0.0 && g < 0.0 {
                        0.0
                    } else {
                        g
                    }
                })
                .collect(),
            VectorField::BestResponse { bracket_max } => (0..x.len())
                .map(|i| Ok(best_response(game, i, x, *bracket_max)? - x[i]))
                .collect::<Result<Vec<_>>>()?,
        };
        if let Some(player) = v.iter().position(|c| !c.is_finite()) {
            return Err(Error::Domain {
                player,
                point: x.to_vec(),
            });
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub field: VectorField,
    pub horizon: f64,
    pub dt: f64,
    pub bounds: BoundingBox,
}

impl OdeConfig {
    pub fn new(field: VectorField, horizon: f64, dt: f64, n: usize) -> Self {
        Self {
            field,
            horizon,
            dt,
            bounds: BoundingBox::default_for(n),
        }
    }
}

/// RK4 for the smooth fields, forward Euler with a clamp at zero for the
/// projected ones. Every step is recorded.
pub fn integrate_ode(game: &dyn Game, x0: &ActionProfile, cfg: &OdeConfig) -> Result<Trajectory> {
    check_dim(game, x0)?;
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) || !(cfg.horizon >= cfg.dt) {
        return Err(Error::InvalidConfig(format!(
            "need dt > 0 and horizon >= dt (dt = {}, horizon = {})",
            cfg.dt, cfg.horizon
        )));
    }
    if cfg.bounds.dim() != x0.len() {
        return Err(Error::InvalidConfig("box dimension differs from player count".into()));
    }
    if let VectorField::Rosen { weights } = &cfg.field {
        if weights.len() != x0.len() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::InvalidConfig(
                "Rosen weights must be positive, one per player".into(),
            ));
        }
    }
    let steps = (cfg.horizon / cfg.dt).round() as u64;
    let dt = cfg.dt;
    let mut x = x0.to_vec();
    let mut states = Vec::with_capacity(steps as usize + 1);
    states.push(State { n: 0, x: x.clone() });
    let mut min_coordinate = x.iter().copied().fold(f64::INFINITY, f64::min);

    for k in 1..=steps {
        if cfg.field.is_smooth() {
            let k1 = cfg.field.eval(game, &x)?;
            let k2 = cfg.field.eval(game, &axpy(&x, 0.5 * dt, &k1))?;
            let k3 = cfg.field.eval(game, &axpy(&x, 0.5 * dt, &k2))?;
            let k4 = cfg.field.eval(game, &axpy(&x, dt, &k3))?;
            for i in 0..x.len() {
                x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        } else {
            let v = cfg.field.eval(game, &x)?;
            for i in 0..x.len() {
                x[i] = (x[i] + dt * v[i]).max(0.0);
            }
        }
        min_coordinate = min_coordinate.min(x.iter().copied().fold(f64::INFINITY, f64::min));
        let inside = x
            .iter()
            .zip(cfg.bounds.lower.iter().zip(&cfg.bounds.upper))
            .all(|(v, (lo, hi))| v.is_finite() && *v >= lo - 1e-9 && *v <= *hi);
        if !inside {
            return Err(Error::Diverged {
                time: k as f64 * dt,
                step: k,
                state: x,
            });
        }
        states.push(State { n: k, x: x.clone() });
    }

    Ok(Trajectory {
        meta: TrajectoryMeta {
            game: game.name().to_string(),
            kind: cfg.field.kind(),
            config: serde_json::json!({ "ode": cfg, "x0": x0 }),
        },
        states,
        min_coordinate,
    })
}

fn axpy(x: &[f64], a: f64, v: &[f64]) -> Vec<f64> {
    x.iter().zip(v).map(|(x, v)| x + a * v).collect()
}

/// Best response of player `i` to the other coordinates of `x` (x_i is
/// ignored). Assumes the own gradient is single-crossing in x_i.
pub fn best_response(game: &dyn Game, i: usize, x: &[f64], bracket_max: f64) -> Result<f64> {
    check_dim(game, x)?;
    if !(bracket_max > 0.0) {
        return Err(Error::InvalidConfig("bracket_max must be positive".into()));
    }
    let mut y = x.to_vec();
    let mut grad_at = |t: f64| {
        y[i] = t;
        game.own_gradient(i, &y)
    };
    if !(grad_at(0.0) > 0.0) {
        return Ok(0.0);
    }
    let mut hi = bracket_max;
    let mut doublings = 0;
    while grad_at(hi) > 0.0 {
        if doublings == BR_MAX_DOUBLINGS {
            return Err(Error::UnboundedBestResponse { player: i, limit: hi });
        }
        hi *= 2.0;
        doublings += 1;
    }
    let mut lo = 0.0;
    while hi - lo > BR_TOL {
        let mid = 0.5 * (lo + hi);
        if grad_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
