//! One round of the process, for every player simultaneously:
//!
//! ```text
//! explore:  e_i  = x_i + α_{n+1} ε_i            ε_i = ±1 with probability 1/2
//! observe:  Δu_i = u_i(e) − u_i(x)
//! update:   x'_i = x_i (1 + ε_i Δu_i)
//! ```
//!
//! which is a stochastic approximation of ẋ = F(x), F_i = x_i ∂u_i/∂x_i.

use super::{DgapConfig, State, StepSchedule, Trajectory, TrajectoryKind, TrajectoryMeta};
use crate::error::{Error, Result};
use crate::game::{check_dim, ActionProfile, BoundingBox, Game};
use crate::rng::{derive_seed, rademacher, stream};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgapStep {
    pub next: Vec<f64>,
    pub exploration: Vec<f64>,
    pub payoff_change: Vec<f64>,
}

/// x_{n+1} = x_n + α_{n+1} (drift + noise + remainder).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDecomposition {
    pub step_size: f64,
    pub next: Vec<f64>,
    pub drift: Vec<f64>,
    pub noise: Vec<f64>,
    pub remainder: Vec<f64>,
}

fn check_signs(signs: &[f64], n: usize) -> Result<()> {
    if signs.len() != n || signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
        return Err(Error::InvalidConfig(format!("expected {n} signs in {{-1, +1}}")));
    }
    Ok(())
}

pub fn dgap_step(game: &dyn Game, schedule: &StepSchedule, n: u64, x: &[f64], signs: &[f64]) -> Result<DgapStep> {
    check_dim(game, x)?;
    check_signs(signs, x.len())?;
    if let Some(i) = x.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InvalidProfile(format!(
            "coordinate {i} must be strictly positive"
        )));
    }
    let alpha = schedule.step(n);
    let exploration: Vec<f64> = x.iter().zip(signs).map(|(v, s)| v + alpha * s).collect();
    if let Some(i) = exploration.iter().position(|v| *v < 0.0) {
        return Err(Error::StartCondition {
            step: n,
            player: i,
            coordinate: exploration[i],
        });
    }
    let mut before = vec![0.0; x.len()];
    let mut after = vec![0.0; x.len()];
    game.payoffs_into(x, &mut before);
    game.payoffs_into(&exploration, &mut after);
    let payoff_change: Vec<f64> = after.iter().zip(&before).map(|(a, b)| a - b).collect();
    if let Some(player) = payoff_change.iter().position(|d| !d.is_finite()) {
        return Err(Error::Domain {
            player,
            point: exploration,
        });
    }
    let next = x
        .iter()
        .zip(signs.iter().zip(&payoff_change))
        .map(|(v, (s, d))| v * (1.0 + s * d))
        .collect();
    Ok(DgapStep {
        next,
        exploration,
        payoff_change,
    })
}

/// F_i(x) = x_i ∂u_i/∂x_i(x).
pub fn mean_field(game: &dyn Game, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(game, x)?;
    let f: Vec<f64> = (0..x.len())
        .map(|i| {
            if x[i] == 0.0 {
                0.0
            } else {
                x[i] * game.own_gradient(i, x)
            }
        })
        .collect();
    if let Some(player) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            player,
            point: x.to_vec(),
        });
    }
    Ok(f)
}

pub fn decompose_step(
    game: &dyn Game,
    schedule: &StepSchedule,
    n: u64,
    x: &[f64],
    signs: &[f64],
) -> Result<StepDecomposition> {
    let step = dgap_step(game, schedule, n, x, signs)?;
    let alpha = schedule.step(n);
    let drift = mean_field(game, x)?;
    let noise: Vec<f64> = (0..x.len())
        .map(|i| {
            let cross: f64 = (0..x.len())
                .filter(|&j| j != i)
                .map(|j| signs[j] * game.cross_gradient(i, j, x))
                .sum();
            signs[i] * x[i] * cross
        })
        .collect();
    let remainder = (0..x.len())
        .map(|i| (step.next[i] - x[i]) / alpha - drift[i] - noise[i])
        .collect();
    Ok(StepDecomposition {
        step_size: alpha,
        next: step.next,
        drift,
        noise,
        remainder,
    })
}

/// Smallest n₀ whose first exploration α_{n₀+1} cannot leave the orthant
/// from `x0`.
pub fn required_start_index(schedule: &StepSchedule, x0: &[f64]) -> u64 {
    let floor = x0.iter().copied().fold(f64::INFINITY, f64::min);
    if !(floor > 0.0) {
        return u64::MAX;
    }
    let mut n = match *schedule {
        StepSchedule::Harmonic => (1.0 / floor - 1.0).max(0.0).floor() as u64,
        StepSchedule::Power { scale, exponent } => ((scale / floor).powf(1.0 / exponent) - 1.0).max(0.0).floor() as u64,
    };
    while n > 0 && schedule.step(n - 1) <= floor {
        n -= 1;
    }
    while schedule.step(n) > floor {
        n += 1;
    }
    n
}

/// Largest sampled Σ_j |∂u_i/∂x_j| over players, at the box corners and
/// `samples` uniform points.
pub fn empirical_lipschitz(game: &dyn Game, bounds: &BoundingBox, samples: usize, seed: u64) -> Result<f64> {
    let n = game.n_players();
    if bounds.dim() != n {
        return Err(Error::InvalidConfig("box dimension differs from player count".into()));
    }
    let slope = |x: &[f64]| -> f64 {
        (0..n)
            .map(|i| (0..n).map(|j| game.partial(i, j, x).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let mut best = 0.0f64;
    if n <= 12 {
        for mask in 0..1u32 << n {
            let corner: Vec<f64> = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        bounds.upper[i]
                    } else {
                        bounds.lower[i]
                    }
                })
                .collect();
            best = best.max(slope(&corner));
        }
    }
    let mut rng = stream(derive_seed(seed, 3));
    for _ in 0..samples {
        best = best.max(slope(&bounds.sample(&mut rng)));
    }
    if !best.is_finite() {
        return Err(Error::Domain {
            player: 0,
            point: bounds.upper.clone(),
        });
    }
    Ok(best)
}

/// The first-order payoff change of a round is at most α·L; keeping it at or
/// below this fraction keeps every update factor 1 + εΔu away from zero.
pub const LIPSCHITZ_MARGIN: f64 = 0.5;

/// Smallest n₀ with α_{n₀+1}·L ≤ [`LIPSCHITZ_MARGIN`].
pub fn lipschitz_start_index(schedule: &StepSchedule, lipschitz: f64) -> u64 {
    if !(lipschitz > 0.0) {
        return 0;
    }
    required_start_index(schedule, &[LIPSCHITZ_MARGIN / lipschitz])
}

pub fn run_dgap(game: &dyn Game, x0: &ActionProfile, cfg: &DgapConfig, record_every: u64) -> Result<Trajectory> {
    run_dgap_bounded(game, x0, cfg, record_every, None)
}

/// As [`run_dgap`], failing with [`Error::Diverged`] if the state leaves
/// `bounds`.
pub fn run_dgap_bounded(
    game: &dyn Game,
    x0: &ActionProfile,
    cfg: &DgapConfig,
    record_every: u64,
    bounds: Option<&BoundingBox>,
) -> Result<Trajectory> {
    check_dim(game, x0)?;
    cfg.schedule.validate()?;
    if cfg.n_steps == 0 || record_every == 0 {
        return Err(Error::InvalidConfig("n_steps and record_every must be positive".into()));
    }
    if let Some(i) = x0.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::InvalidProfile(format!(
            "initial coordinate {i} must be strictly positive"
        )));
    }
    let first = cfg.schedule.step(cfg.start_index);
    if let Some(i) = x0.iter().position(|v| v - first < 0.0) {
        return Err(Error::StartCondition {
            step: cfg.start_index,
            player: i,
            coordinate: x0[i] - first,
        });
    }

    let n = x0.len();
    let mut rng = stream(cfg.seed);
    let mut x = x0.to_vec();
    let mut explore = vec![0.0; n];
    let mut signs = vec![0.0; n];
    let mut before = vec![0.0; n];
    let mut after = vec![0.0; n];
    let mut min_coordinate = x.iter().copied().fold(f64::INFINITY, f64::min);
    let mut elapsed = 0.0;
    let capacity = (cfg.n_steps / record_every + 2) as usize;
    let mut states = Vec::with_capacity(capacity);
    states.push(State {
        n: cfg.start_index,
        x: x.clone(),
    });

    for k in 0..cfg.n_steps {
        let round = cfg.start_index + k;
        let alpha = cfg.schedule.step(round);
        for i in 0..n {
            signs[i] = rademacher(&mut rng);
            explore[i] = x[i] + alpha * signs[i];
            if explore[i] < 0.0 {
                return Err(Error::StartCondition {
                    step: round,
                    player: i,
                    coordinate: explore[i],
                });
            }
        }
        game.payoffs_into(&x, &mut before);
        game.payoffs_into(&explore, &mut after);
        for i in 0..n {
            let change = after[i] - before[i];
            if !change.is_finite() {
                return Err(Error::Domain {
                    player: i,
                    point: explore.clone(),
                });
            }
            let next = x[i] * (1.0 + signs[i] * change);
            if !(next > 0.0) {
                return Err(Error::Positivity {
                    step: round,
                    player: i,
                    value: next,
                });
            }
            x[i] = next;
            min_coordinate = min_coordinate.min(next);
        }
        elapsed += alpha;
        if let Some(b) = bounds {
            if !b.contains(&x) {
                return Err(Error::Diverged {
                    time: elapsed,
                    step: round + 1,
                    state: x,
                });
            }
        }
        let done = k + 1;
        if done % record_every == 0 || done == cfg.n_steps {
            states.push(State {
                n: round + 1,
                x: x.clone(),
            });
        }
    }

    Ok(Trajectory {
        meta: TrajectoryMeta {
            game: game.name().to_string(),
            kind: TrajectoryKind::Dgap,
            config: serde_json::json!({
                "dgap": cfg,
                "record_every": record_every,
                "x0": x0,
            }),
        },
        states,
        min_coordinate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::FnGame;
    use crate::game::GameSpec;

    fn pair() -> Box<dyn Game> {
        GameSpec::AppendixExample2.build().unwrap()
    }

    /// Closed-form payoffs of the anti-symmetric pair, written out again.
    fn u_pair(x1: f64, x2: f64) -> (f64, f64) {
        (
            -x1 * x1 / 2.0 + 2.0 * x1 - x1 * (2.0 - x2) * (2.0 - x2),
            -x2 * x2 / 2.0 - x1 * x1 * (2.0 - x2),
        )
    }

    #[test]
    fn explicit_step_matches_hand_oracle() {
        let g = pair();
        let s = dgap_step(g.as_ref(), &StepSchedule::Harmonic, 9, &[1.0, 1.0], &[1.0, -1.0]).unwrap();
        assert!((s.exploration[0] - 1.1).abs() < 1e-15 && (s.exploration[1] - 0.9).abs() < 1e-15);
        let (a0, b0) = u_pair(1.0, 1.0);
        let (a1, b1) = u_pair(1.1, 0.9);
        let want = [1.0 * (1.0 + (a1 - a0)), 1.0 * (1.0 - (b1 - b0))];
        // u1: 0.5 -> -0.605 + 2.2 - 1.331 = 0.264; u2: -1.5 -> -0.405 - 1.331 = -1.736.
        assert!((a1 - 0.264).abs() < 1e-12 && (b1 + 1.736).abs() < 1e-12);
        assert!((s.next[0] - want[0]).abs() < 1e-14 && (s.next[1] - want[1]).abs() < 1e-14);
        assert!((s.next[0] - 0.764).abs() < 1e-12 && (s.next[1] - 1.236).abs() < 1e-12);
    }

    #[test]
    fn unchanged_payoffs_do_not_move() {
        let g = FnGame::new("flat", 2, |_, _x: &[f64]| 3.0);
        let s = dgap_step(&g, &StepSchedule::Harmonic, 4, &[0.7, 2.0], &[-1.0, 1.0]).unwrap();
        assert_eq!(s.next, vec![0.7, 2.0]);
    }

    #[test]
    fn mirrored_signs_explore_mirror_points() {
        let g = pair();
        let up = dgap_step(g.as_ref(), &StepSchedule::Harmonic, 3, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        let down = dgap_step(g.as_ref(), &StepSchedule::Harmonic, 3, &[1.0, 2.0], &[-1.0, -1.0]).unwrap();
        assert_eq!(up.exploration, vec![1.25, 2.25]);
        assert_eq!(down.exploration, vec![0.75, 1.75]);
    }

    #[test]
    fn mean_field_values() {
        let g = pair();
        assert_eq!(mean_field(g.as_ref(), &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(mean_field(g.as_ref(), &[1.0, 2.0]).unwrap(), vec![1.0, -2.0]);
        let d = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
        assert_eq!(mean_field(d.as_ref(), &[0.0, 1.0, 1.0]).unwrap()[0], 0.0);
    }

    #[test]
    fn single_player_has_no_noise() {
        let g = FnGame::new("solo", 1, |_, x: &[f64]| -x[0] * x[0] + x[0]);
        let d = decompose_step(&g, &StepSchedule::Harmonic, 10, &[0.8], &[1.0]).unwrap();
        assert_eq!(d.noise, vec![0.0]);
    }

    #[test]
    fn remainder_shrinks_like_one_over_n() {
        let g = pair();
        let scaled: Vec<f64> = [100u64, 1000, 10_000]
            .iter()
            .map(|&n| {
                let d = decompose_step(g.as_ref(), &StepSchedule::Harmonic, n, &[1.0, 1.0], &[1.0, -1.0]).unwrap();
                crate::linalg::norm_inf(&d.remainder) * (n + 1) as f64
            })
            .collect();
        assert!(scaled.iter().all(|v| *v < 10.0), "{scaled:?}");
        assert!(scaled[2] <= 1.5 * scaled[0] + 1e-9, "{scaled:?}");
    }

    #[test]
    fn start_condition_and_remedy() {
        let g = GameSpec::named("public_good_pair").unwrap().build().unwrap();
        let x0 = ActionProfile::new(vec![0.5, 0.5]).unwrap();
        let err = run_dgap(g.as_ref(), &x0, &DgapConfig::new(100, 3), 10).unwrap_err();
        assert!(matches!(err, Error::StartCondition { step: 0, .. }));
        assert_eq!(required_start_index(&StepSchedule::Harmonic, &x0), 1);
        let traj = run_dgap(g.as_ref(), &x0, &DgapConfig::new(100, 3).with_start_index(2), 10).unwrap();
        assert!(traj.min_coordinate > 0.0);
        assert_eq!(traj.states[0].n, 2);
        assert_eq!(traj.states.last().unwrap().n, 102);
    }

    #[test]
    fn lipschitz_start() {
        let g = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
        let b = BoundingBox::cube(3, 0.0, 3.0).unwrap();
        // Worst case at a corner: |0.2·0 − 3 + 1| + 2·0.6 = 3.2.
        let l = empirical_lipschitz(g.as_ref(), &b, 100, 1).unwrap();
        assert!((l - 3.2).abs() < 1e-12, "{l}");
        let n = lipschitz_start_index(&StepSchedule::Harmonic, l);
        assert_eq!(n, 6);
        assert_eq!(lipschitz_start_index(&StepSchedule::Harmonic, 0.0), 0);
    }

    #[test]
    fn required_start_index_edges() {
        let h = StepSchedule::Harmonic;
        assert_eq!(required_start_index(&h, &[2.0, 3.0]), 0);
        assert_eq!(required_start_index(&h, &[0.01]), 99);
        let p = StepSchedule::power(0.5, 0.75).unwrap();
        let n = required_start_index(&p, &[0.1]);
        assert!(p.step(n) <= 0.1 && (n == 0 || p.step(n - 1) > 0.1));
    }

    #[test]
    fn schedule_rejects_small_exponents() {
        assert!(StepSchedule::power(1.0, 0.5).is_err());
        assert!(StepSchedule::power(1.0, 1.2).is_err());
        assert!(StepSchedule::power(0.0, 0.8).is_err());
        assert!(StepSchedule::power(2.0, 0.8).is_ok());
    }

    #[test]
    fn recording_keeps_every_kth_and_final_state() {
        let g = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
        let x0 = ActionProfile::uniform(3, 2.0).unwrap();
        let t = run_dgap(g.as_ref(), &x0, &DgapConfig::new(25, 1), 10).unwrap();
        let ns: Vec<u64> = t.states.iter().map(|s| s.n).collect();
        assert_eq!(ns, vec![0, 10, 20, 25]);
    }
}
