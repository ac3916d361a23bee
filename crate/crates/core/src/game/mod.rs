//! Continuous N-player games on the non-negative orthant.

mod builtin;
mod graph;
mod hypotheses;

pub use builtin::{
    builtin_game, builtin_names, complete_graph, cycle_graph, AntisymmetricPair, Benefit, Cost, DiamondSearch,
    GameSpec, PerPlayer, PublicGood,
};
pub use graph::{build_interaction_graph, InteractionGraph};
pub use hypotheses::{check_hypotheses, HypothesisReport, Screen, Witness};

use crate::error::{Error, Result};
use crate::rng::{uniform, SplitMix64};
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Central-difference step for first derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Central-difference step for second derivatives (taken on gradients).
pub const FD_STEP_SECOND: f64 = 1e-4;
/// |v| at or below this counts as zero in sign tests.
pub const SIGN_TOL: f64 = 1e-9;

/// Structural properties a game claims to have. Declarations only; see
/// [`check_hypotheses`] and the analysis module for verification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredProperties {
    pub strategic_complements: bool,
    pub symmetric_externalities: bool,
    pub lopg: bool,
    pub rosen: bool,
}

/// A smooth N-player game. Player and coordinate indices are zero-based.
///
/// Only [`Game::payoff`] is required. The derivative methods default to
/// central finite differences; builtin games override them analytically.
pub trait Game: Send + Sync {
    fn n_players(&self) -> usize;

    fn name(&self) -> &str;

    /// u_i(x).
    fn payoff(&self, i: usize, x: &[f64]) -> f64;

    /// ∂u_i/∂x_j (x).
    fn partial(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        central_difference(|y| self.payoff(i, y), x, j, FD_STEP)
    }

    /// ∂²u_i/∂x_j∂x_k (x).
    fn second_partial(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        central_difference(|y| self.partial(i, j, y), x, k, FD_STEP_SECOND)
    }

    fn declared_properties(&self) -> DeclaredProperties {
        DeclaredProperties::default()
    }

    /// Writes u_i(x) for every player into `out`.
    fn payoffs_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.payoff(i, x);
        }
    }

    fn own_gradient(&self, i: usize, x: &[f64]) -> f64 {
        self.partial(i, i, x)
    }

    fn cross_gradient(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        self.partial(i, j, x)
    }

    /// ∂²u_i/∂x_i∂x_j (x).
    fn second_derivative(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        self.second_partial(i, i, j, x)
    }
}

pub(crate) fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], coord: usize, h: f64) -> f64 {
    let mut y = x.to_vec();
    y[coord] = x[coord] + h;
    let up = f(&y);
    y[coord] = x[coord] - h;
    let down = f(&y);
    (up - down) / (2.0 * h)
}

/// A point of X = [0, ∞)^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionProfile(Vec<f64>);

impl ActionProfile {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidProfile("profile has no coordinates".into()));
        }
        if let Some((i, v)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidProfile(format!(
                "coordinate {i} is {v}; actions must be finite and non-negative"
            )));
        }
        Ok(Self(coords))
    }

    pub fn uniform(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Parse `"1,2.5,0"`.
    pub fn parse(text: &str) -> Result<Self> {
        let coords = text
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidProfile(format!("`{t}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coords)
    }
}

impl Deref for ActionProfile {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ActionProfile {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ActionProfile> for Vec<f64> {
    fn from(p: ActionProfile) -> Vec<f64> {
        p.0
    }
}

/// Axis-aligned box inside the orthant. Games are only trusted in here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub const DEFAULT_UPPER: f64 = 10.0;

    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidConfig(
                "box bounds must have equal, non-zero length".into(),
            ));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && *l >= 0.0 && l <= u) {
                return Err(Error::InvalidConfig(format!("bad box side [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    /// [0, 10]^N.
    pub fn default_for(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![Self::DEFAULT_UPPER; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Uniform sample.
    pub fn sample(&self, rng: &mut SplitMix64) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| uniform(rng, *l, *u))
            .collect()
    }
}

/// u_i(x) for every player.
pub fn eval_payoff(game: &dyn Game, x: &ActionProfile) -> Result<Vec<f64>> {
    check_dim(game, x)?;
    let mut out = vec![0.0; game.n_players()];
    game.payoffs_into(x, &mut out);
    if let Some(player) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            player,
            point: x.to_vec(),
        });
    }
    Ok(out)
}

pub(crate) fn check_dim(game: &dyn Game, x: &[f64]) -> Result<()> {
    if x.len() != game.n_players() {
        return Err(Error::InvalidProfile(format!(
            "profile has {} coordinates but {} has {} players",
            x.len(),
            game.name(),
            game.n_players()
        )));
    }
    Ok(())
}

/// Sign with a zero band of [`SIGN_TOL`].
pub fn sign_with_tol(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// A game given by payoff closures; derivatives fall back to finite
/// differences unless supplied.
pub struct FnGame<F>
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    name: String,
    n: usize,
    payoff: F,
    properties: DeclaredProperties,
}

impl<F> FnGame<F>
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, n: usize, payoff: F) -> Self {
        Self {
            name: name.into(),
            n,
            payoff,
            properties: DeclaredProperties::default(),
        }
    }

    pub fn with_properties(mut self, properties: DeclaredProperties) -> Self {
        self.properties = properties;
        self
    }
}

impl<F> Game for FnGame<F>
where
    F: Fn(usize, &[f64]) -> f64 + Send + Sync,
{
    fn n_players(&self) -> usize {
        self.n
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn payoff(&self, i: usize, x: &[f64]) -> f64 {
        (self.payoff)(i, x)
    }
    fn declared_properties(&self) -> DeclaredProperties {
        self.properties
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_rejects_negative_and_nan() {
        assert!(ActionProfile::new(vec![1.0, -0.1]).is_err());
        assert!(ActionProfile::new(vec![f64::NAN]).is_err());
        assert!(ActionProfile::new(vec![]).is_err());
        assert!(ActionProfile::new(vec![0.0, 2.0]).is_ok());
    }

    #[test]
    fn profile_parses_lists() {
        assert_eq!(ActionProfile::parse("1, 2.5,0").unwrap().coords(), &[1.0, 2.5, 0.0]);
        assert!(ActionProfile::parse("1,x").is_err());
    }

    #[test]
    fn fn_game_uses_finite_differences() {
        let g = FnGame::new("quad", 2, |i, x: &[f64]| x[i] * x[i] * x[1 - i]);
        let x = [1.5, 2.0];
        assert!((g.own_gradient(0, &x) - 2.0 * 1.5 * 2.0).abs() < 1e-8);
        assert!((g.cross_gradient(0, 1, &x) - 1.5 * 1.5).abs() < 1e-8);
        assert!((g.second_derivative(0, 1, &x) - 2.0 * 1.5).abs() < 1e-6);
    }

    #[test]
    fn eval_payoff_reports_domain_errors() {
        let g = FnGame::new("log", 1, |_, x: &[f64]| (x[0] - 1.0).ln());
        let err = eval_payoff(&g, &ActionProfile::new(vec![0.5]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Domain { player: 0, .. }));
    }
}
