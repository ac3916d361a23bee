use super::{ConvergenceRule, ExperimentConfig, NoiseProbe, X0Sampler};
use crate::dynamics::DgapConfig;
use crate::error::{Error, Result};
use crate::game::{complete_graph, BoundingBox, Cost, GameSpec};

const PRESETS: [&str; 5] = [
    "complements_nonbipartite",
    "lopg_isolated",
    "oz_repulsion",
    "rosen_unique",
    "bipartite_noise",
];

pub fn preset_names() -> &'static [&'static str] {
    &PRESETS
}

const DEFAULT_SEED: u64 = 20_240_601;

fn base(name: &str, game: GameSpec, n: usize, x0: X0Sampler, runs: usize, steps: u64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        game,
        x0_sampler: x0,
        dgap: DgapConfig::new(steps, 0),
        record_every: (steps / 1000).max(1),
        n_runs: runs,
        convergence: ConvergenceRule { window: 100, tol: 0.05 },
        match_tol: 0.05,
        master_seed: DEFAULT_SEED,
        zero_box: BoundingBox::default_for(n),
        zero_grid: 4,
        escape_box: BoundingBox::cube(n, 0.0, 20.0).expect("valid box"),
        residence_radius: 0.05,
        noise_probes: Vec::new(),
    }
}

fn uniform(n: usize, lo: f64, hi: f64) -> X0Sampler {
    X0Sampler::Uniform {
        lower: vec![lo; n],
        upper: vec![hi; n],
    }
}

/// Documented configuration of a named scenario.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let diamond = GameSpec::DiamondSearch {
        alpha: 0.2,
        delta: complete_graph(3),
        cost: Cost::default(),
    };
    Ok(match name {
        // Strategic complements on a triangle with a pendant vertex.
        "complements_nonbipartite" => {
            let delta = vec![
                vec![0.0, 1.0, 1.0, 0.0],
                vec![1.0, 0.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ];
            let game = GameSpec::DiamondSearch {
                alpha: 0.25,
                delta,
                cost: Cost::default(),
            };
            base(name, game, 4, uniform(4, 0.5, 3.0), 100, 100_000)
        }
        "lopg_isolated" => base(
            name,
            GameSpec::named("public_good_path3")?,
            3,
            uniform(3, 0.5, 2.0),
            100,
            100_000,
        ),
        "oz_repulsion" => {
            let h = 1.25;
            let points = vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![h, h, 0.0],
                vec![h, 0.0, h],
                vec![0.0, h, h],
            ];
            let sampler = X0Sampler::NearPoints {
                points,
                jitter: 0.01,
                floor: 0.01,
            };
            base(name, diamond, 3, sampler, 100, 1_000_000)
        }
        "rosen_unique" => base(name, diamond, 3, uniform(3, 0.5, 3.0), 200, 1_000_000),
        "bipartite_noise" => {
            let ne = vec![1.0 / 3.0; 4];
            let mut cfg = base(
                name,
                GameSpec::named("appendix_example_1")?,
                4,
                X0Sampler::Fixed { point: ne.clone() },
                50,
                100_000,
            );
            cfg.noise_probes = vec![NoiseProbe {
                point: ne,
                direction: vec![1.0, -1.0, 1.0, -1.0],
            }];
            cfg
        }
        other => {
            return Err(Error::UnknownPreset {
                name: other.into(),
                known: PRESETS.join(", "),
            })
        }
    })
}
