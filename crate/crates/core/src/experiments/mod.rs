//! Seeded Monte-Carlo batches of DGAP runs, matched against the zero catalog.
//!
//! Frequencies in a report are finite-horizon estimates of almost-sure
//! limit statements: empirical checks, not proofs.

mod presets;
mod report;

pub use presets::{preset, preset_names};
pub use report::{Aggregates, ExperimentReport, NoiseProbeResult, RunRecord, ZeroTally};

use crate::analysis::{find_zeros, noise_excitation, Stability, ZeroCatalog, ZeroClass};
use crate::dynamics::{
    empirical_lipschitz, lipschitz_start_index, required_start_index, run_dgap_bounded, DgapConfig, Trajectory,
};
use crate::error::{Error, Result};
use crate::game::{ActionProfile, BoundingBox, GameSpec};
use crate::linalg::dist_inf;
use crate::rng::{derive_seed, stream, uniform};
use crate::SCHEMA_VERSION;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Environment variable holding the worker count used by the CLI.
pub const WORKERS_ENV: &str = "DGAP_WORKERS";

const LIPSCHITZ_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum X0Sampler {
    Fixed {
        point: Vec<f64>,
    },
    Uniform {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    /// Run k starts near `points[k % len]`: each coordinate jittered
    /// uniformly by ±jitter, then raised to at least `floor`.
    NearPoints {
        points: Vec<Vec<f64>>,
        jitter: f64,
        floor: f64,
    },
}

impl X0Sampler {
    fn dim(&self) -> Option<usize> {
        match self {
            X0Sampler::Fixed { point } => Some(point.len()),
            X0Sampler::Uniform { lower, .. } => Some(lower.len()),
            X0Sampler::NearPoints { points, .. } => points.first().map(Vec::len),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("x0 sampler: {m}")));
        match self {
            X0Sampler::Fixed { point } => {
                if point.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return bad("fixed point must be strictly positive");
                }
            }
            X0Sampler::Uniform { lower, upper } => {
                if lower.len() != upper.len()
                    || lower
                        .iter()
                        .zip(upper)
                        .any(|(l, u)| !(l.is_finite() && u.is_finite() && *l > 0.0 && l <= u))
                {
                    return bad("uniform box must satisfy 0 < lower <= upper");
                }
            }
            X0Sampler::NearPoints { points, jitter, floor } => {
                if points.is_empty() || points.iter().any(|p| p.len() != points[0].len()) {
                    return bad("need one or more points of equal dimension");
                }
                if !(*jitter >= 0.0 && *floor > 0.0) {
                    return bad("jitter must be non-negative and floor positive");
                }
            }
        }
        Ok(())
    }

    /// Initial profile for run `index`.
    pub fn sample(&self, index: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed);
        match self {
            X0Sampler::Fixed { point } => point.clone(),
            X0Sampler::Uniform { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| uniform(&mut rng, *l, *u))
                .collect(),
            X0Sampler::NearPoints { points, jitter, floor } => points[index % points.len()]
                .iter()
                .map(|c| (c + uniform(&mut rng, -jitter, *jitter)).max(*floor))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRule {
    /// Number of trailing recorded states examined.
    pub window: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseProbe {
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub game: GameSpec,
    pub x0_sampler: X0Sampler,
    /// Template: the seed is replaced per run and the start index raised so
    /// that the first exploration stays in the orthant and α·L stays below
    /// the Lipschitz margin over the escape box.
    pub dgap: DgapConfig,
    pub record_every: u64,
    pub n_runs: usize,
    pub convergence: ConvergenceRule,
    pub match_tol: f64,
    pub master_seed: u64,
    /// Box searched for zeros.
    pub zero_box: BoundingBox,
    pub zero_grid: usize,
    /// Leaving this box ends a run as escaped; payoff slopes are bounded over it.
    pub escape_box: BoundingBox,
    /// Radius of the neighbourhood used for residence fractions near
    /// linearly unstable equilibria.
    pub residence_radius: f64,
    #[serde(default)]
    pub noise_probes: Vec<NoiseProbe>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_runs == 0 {
            return bad("n_runs must be at least 1".into());
        }
        if self.convergence.window < 2 || !(self.convergence.tol > 0.0) {
            return bad("convergence window must be >= 2 and tol > 0".into());
        }
        if !(self.match_tol > 0.0) || !(self.residence_radius > 0.0) {
            return bad("match_tol and residence_radius must be positive".into());
        }
        if self.dgap.n_steps == 0 || self.record_every == 0 {
            return bad("n_steps and record_every must be positive".into());
        }
        if (self.dgap.n_steps / self.record_every + 1) < self.convergence.window as u64 {
            return bad(format!(
                "{} steps recorded every {} cannot fill a window of {}",
                self.dgap.n_steps, self.record_every, self.convergence.window
            ));
        }
        self.dgap.schedule.validate()?;
        self.x0_sampler.validate()?;
        let n = self.game.build()?.n_players();
        if self.x0_sampler.dim() != Some(n) || self.zero_box.dim() != n || self.escape_box.dim() != n {
            return bad(format!("sampler and boxes must have dimension {n}"));
        }
        if self
            .noise_probes
            .iter()
            .any(|p| p.point.len() != n || p.direction.len() != n)
        {
            return bad(format!("noise probes must have dimension {n}"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RunOutcome {
    /// Index into the report's zero catalog.
    ConvergedTo {
        zero: usize,
    },
    /// The trailing window settled away from every isolated zero; `cluster`
    /// names a catalog cluster the limit lies next to.
    ConvergedUnmatched {
        point: Vec<f64>,
        cluster: Option<usize>,
    },
    NotConverged {
        reason: String,
    },
}

/// Mean of the last `window` recorded states if all of them lie within
/// `tol` of it (sup norm).
pub fn detect_convergence(traj: &Trajectory, window: usize, tol: f64) -> Option<ActionProfile> {
    if window == 0 || traj.states.len() < window {
        return None;
    }
    let tail = &traj.states[traj.states.len() - window..];
    let n = tail[0].x.len();
    let mut mean = vec![0.0; n];
    for s in tail {
        for (m, v) in mean.iter_mut().zip(&s.x) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= window as f64;
    }
    tail.iter()
        .all(|s| dist_inf(&s.x, &mean) <= tol)
        .then(|| ActionProfile::new(mean).ok())
        .flatten()
}

/// Worker count from [`WORKERS_ENV`], defaulting to 1.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w >= 1 => Ok(w),
            _ => Err(Error::InvalidConfig(format!(
                "{WORKERS_ENV}={v} is not a positive integer"
            ))),
        },
    }
}

/// Runs the batch on `workers` threads. The report depends only on the
/// configuration.
pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<ExperimentReport> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(cfg))
}

fn run_in_pool(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let game = cfg.game.build()?;
    let catalog = find_zeros(game.as_ref(), &cfg.zero_box, cfg.zero_grid)?;
    let probes = cfg
        .noise_probes
        .iter()
        .map(|p| {
            Ok(NoiseProbeResult {
                point: p.point.clone(),
                direction: p.direction.clone(),
                excitation: noise_excitation(game.as_ref(), &p.point, &p.direction)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let unstable: Vec<&[f64]> = catalog
        .isolated()
        .filter(|(_, p)| p.klass == ZeroClass::NashEquilibrium && p.stability == Stability::LinearlyUnstable)
        .map(|(_, p)| p.location.as_slice())
        .collect();

    let lipschitz = empirical_lipschitz(game.as_ref(), &cfg.escape_box, LIPSCHITZ_SAMPLES, cfg.master_seed)?;
    let floor = cfg
        .dgap
        .start_index
        .max(lipschitz_start_index(&cfg.dgap.schedule, lipschitz));

    let per_run: Vec<RunRecord> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|index| single_run(cfg, game.as_ref(), &catalog, &unstable, floor, index))
        .collect();
    let aggregates = Aggregates::tally(&per_run, &catalog);
    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        note: report::NOTE.to_string(),
        config: cfg.clone(),
        zeros: catalog,
        per_run,
        aggregates,
        probes,
        lipschitz,
        start_index_floor: floor,
    })
}

fn single_run(
    cfg: &ExperimentConfig,
    game: &dyn crate::game::Game,
    catalog: &ZeroCatalog,
    unstable: &[&[f64]],
    floor: u64,
    index: usize,
) -> RunRecord {
    let seed = derive_seed(cfg.master_seed, index as u64);
    let x0 = cfg.x0_sampler.sample(index, derive_seed(seed, 0));
    let start_index = floor.max(required_start_index(&cfg.dgap.schedule, &x0));
    let mut record = RunRecord {
        index,
        seed,
        x0: x0.clone(),
        start_index,
        outcome: RunOutcome::NotConverged { reason: String::new() },
        final_state: None,
        limit: None,
        min_coordinate: None,
        residence_fraction: None,
    };
    let dgap = DgapConfig {
        seed,
        start_index,
        ..cfg.dgap.clone()
    };
    let traj =
        ActionProfile::new(x0).and_then(|p| run_dgap_bounded(game, &p, &dgap, cfg.record_every, Some(&cfg.escape_box)));
    let traj = match traj {
        Ok(t) => t,
        Err(Error::Diverged { .. }) => {
            record.outcome = RunOutcome::NotConverged {
                reason: "escaped".into(),
            };
            return record;
        }
        Err(e) => {
            record.outcome = RunOutcome::NotConverged { reason: e.to_string() };
            return record;
        }
    };
    record.min_coordinate = Some(traj.min_coordinate);
    let last = traj.last().map(|s| s.x.clone()).unwrap_or_default();
    if !unstable.is_empty() {
        let near = traj
            .states
            .iter()
            .filter(|s| unstable.iter().any(|u| dist_inf(u, &s.x) <= cfg.residence_radius))
            .count();
        record.residence_fraction = Some(near as f64 / traj.states.len() as f64);
    }
    record.outcome = match detect_convergence(&traj, cfg.convergence.window, cfg.convergence.tol) {
        None => RunOutcome::NotConverged {
            reason: "no settled window".into(),
        },
        Some(limit) => {
            let matched = catalog
                .nearest_isolated(&limit, cfg.match_tol)
                .filter(|(zero, _)| dist_inf(&catalog.points[*zero].location, &last) <= cfg.match_tol);
            let outcome = match matched {
                Some((zero, _)) => RunOutcome::ConvergedTo { zero },
                None => RunOutcome::ConvergedUnmatched {
                    point: limit.to_vec(),
                    cluster: catalog.cluster_near(&limit, cfg.match_tol),
                },
            };
            record.limit = Some(limit.into_inner());
            outcome
        }
    };
    record.final_state = Some(last);
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{State, TrajectoryKind, TrajectoryMeta};

    fn traj(points: &[Vec<f64>]) -> Trajectory {
        Trajectory {
            meta: TrajectoryMeta {
                game: "t".into(),
                kind: TrajectoryKind::Dgap,
                config: serde_json::Value::Null,
            },
            states: points
                .iter()
                .enumerate()
                .map(|(n, x)| State {
                    n: n as u64,
                    x: x.clone(),
                })
                .collect(),
            min_coordinate: 0.0,
        }
    }

    #[test]
    fn constant_trajectory_converges() {
        let t = traj(&vec![vec![0.7, 2.0]; 10]);
        assert_eq!(detect_convergence(&t, 5, 1e-9).unwrap().coords(), &[0.7, 2.0]);
    }

    #[test]
    fn oscillation_does_not_converge() {
        let tol = 0.05;
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|k| vec![1.0 + if k % 2 == 0 { 2.0 * tol } else { 0.0 }])
            .collect();
        assert!(detect_convergence(&traj(&pts), 4, tol * 0.99).is_none());
        assert!(detect_convergence(&traj(&pts[..3]), 4, 1.0).is_none());
    }

    #[test]
    fn samplers() {
        let s = X0Sampler::NearPoints {
            points: vec![vec![1.25, 1.25, 0.0], vec![1.0, 0.0, 0.0]],
            jitter: 0.01,
            floor: 0.01,
        };
        let a = s.sample(0, 3);
        assert!(a[2] >= 0.01 && (a[0] - 1.25).abs() <= 0.01);
        let b = s.sample(1, 3);
        assert!((b[0] - 1.0).abs() <= 0.01 && b[1] >= 0.01);
        assert_eq!(s.sample(0, 3), a);
        let u = X0Sampler::Uniform {
            lower: vec![0.5; 3],
            upper: vec![3.0; 3],
        };
        assert!(u.sample(4, 9).iter().all(|v| (0.5..3.0).contains(v)));
    }

    #[test]
    fn small_batch_is_reproducible_and_partitioned() {
        let mut cfg = preset("rosen_unique").unwrap();
        cfg.n_runs = 6;
        cfg.dgap.n_steps = 20_000;
        cfg.record_every = 100;
        let a = run_experiment(&cfg, 1).unwrap();
        let b = run_experiment(&cfg, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let ag = &a.aggregates;
        assert_eq!(ag.converged + ag.unmatched + ag.not_converged, cfg.n_runs);
        for r in &a.per_run {
            if let RunOutcome::ConvergedTo { zero } = r.outcome {
                let last = r.final_state.as_ref().unwrap();
                assert!(dist_inf(&a.zeros.points[zero].location, last) <= cfg.match_tol);
            }
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = preset("rosen_unique").unwrap();
        cfg.n_runs = 0;
        assert!(run_experiment(&cfg, 1).is_err());
        let mut cfg = preset("rosen_unique").unwrap();
        cfg.convergence.window = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("rosen_unique").unwrap();
        cfg.record_every = cfg.dgap.n_steps;
        assert!(cfg.validate().is_err());
    }
}
