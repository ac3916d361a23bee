//! Numerical laboratory for payoff-based learning in continuous games.
//!
//! Players repeatedly explore a random ±α perturbation of their action and
//! move multiplicatively in the direction that paid off. This crate
//! simulates that process, integrates the mean-field ODE ẋ_i = x_i ∂u_i/∂x_i
//! together with the classical comparison dynamics, locates and classifies
//! the stationary points, and runs seeded Monte-Carlo batches that estimate
//! where the process ends up.
//!
//! Player indices are zero-based throughout the API and in JSON output;
//! CSV headers and printed tables number players from 1.

// `!(a > b)` is used deliberately so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod game;
pub mod io;
pub mod linalg;
pub mod rng;

pub use analysis::{
    check_lopg, check_rosen, classify_zero, find_zeros, is_bipartite, jacobian_f, local_max_check, noise_excitation,
    stability_of, Bipartition, PotentialFunction, Stability, StationaryPoint, ZeroCatalog, ZeroClass,
};
pub use dynamics::{
    best_response, decompose_step, dgap_step, integrate_ode, mean_field, run_dgap, DgapConfig, OdeConfig, StepSchedule,
    Trajectory, TrajectoryKind, VectorField,
};
pub use eigen::{eigen_spectrum, Eigenvalue, Spectrum};
pub use error::{Error, Result};
pub use experiments::{detect_convergence, preset, run_experiment, ExperimentConfig, ExperimentReport, RunOutcome};
pub use game::{
    build_interaction_graph, builtin_game, check_hypotheses, eval_payoff, ActionProfile, BoundingBox, Game, GameSpec,
    InteractionGraph,
};
pub use linalg::SquareMatrix;

/// Version tag written into every serialized artifact.
pub const SCHEMA_VERSION: u32 = 1;
