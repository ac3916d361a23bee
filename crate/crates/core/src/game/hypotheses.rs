//! Sampled screens for the standing hypotheses on a concrete game.
//!
//! Each screen is a necessary-condition check over random points of a box;
//! a pass is evidence, a failure comes with a witness that can be checked by
//! hand.

use super::{sign_with_tol, BoundingBox, Game, SIGN_TOL};
use crate::error::{Error, Result};
use crate::rng::stream;
use serde::{Deserialize, Serialize};

/// Grid resolution of the single-peakedness scan along each own axis.
const PEAK_GRID: usize = 201;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub player: usize,
    pub other: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screen {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Screen {
    fn pass() -> Self {
        Self {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: Witness) -> Self {
        Self {
            holds: false,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub single_peaked: Screen,
    pub symmetric_externalities: Screen,
    pub boundary_condition: Screen,
    pub strategic_complements: Screen,
}

impl HypothesisReport {
    /// [single_peaked, symmetric_externalities, boundary_condition, strategic_complements]
    pub fn flags(&self) -> [bool; 4] {
        [
            self.single_peaked.holds,
            self.symmetric_externalities.holds,
            self.boundary_condition.holds,
            self.strategic_complements.holds,
        ]
    }
}

pub fn check_hypotheses(game: &dyn Game, bounds: &BoundingBox, samples: usize, seed: u64) -> Result<HypothesisReport> {
    let n = game.n_players();
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    if bounds.dim() != n {
        return Err(Error::InvalidConfig("box dimension differs from player count".into()));
    }
    let mut rng = stream(seed);
    let points: Vec<Vec<f64>> = (0..samples).map(|_| bounds.sample(&mut rng)).collect();

    let single_peaked = first_failure(&points, |x| single_peak_violation(game, bounds, x));
    let symmetric_externalities = first_failure(&points, |x| {
        for i in 0..n {
            for j in (i + 1)..n {
                let a = game.cross_gradient(i, j, x);
                let b = game.cross_gradient(j, i, x);
                if sign_with_tol(a, SIGN_TOL) != sign_with_tol(b, SIGN_TOL) {
                    return Some(Witness {
                        point: x.to_vec(),
                        player: i,
                        other: Some(j),
                        detail: format!("du_{i}/dx_{j} = {a:e} but du_{j}/dx_{i} = {b:e}"),
                    });
                }
            }
        }
        None
    });
    let origin = vec![0.0; n];
    let boundary_condition = (0..n)
        .find_map(|i| {
            let g = game.own_gradient(i, &origin);
            (!(g > SIGN_TOL)).then(|| Witness {
                point: origin.clone(),
                player: i,
                other: None,
                detail: format!("own gradient at the origin is {g:e}"),
            })
        })
        .map_or_else(Screen::pass, Screen::fail);
    let strategic_complements = first_failure(&points, |x| {
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let s = game.second_derivative(i, j, x);
                if s < -SIGN_TOL {
                    return Some(Witness {
                        point: x.to_vec(),
                        player: i,
                        other: Some(j),
                        detail: format!("d2u_{i}/dx_{i}dx_{j} = {s:e}"),
                    });
                }
            }
        }
        None
    });

    Ok(HypothesisReport {
        single_peaked,
        symmetric_externalities,
        boundary_condition,
        strategic_complements,
    })
}

fn first_failure(points: &[Vec<f64>], check: impl Fn(&[f64]) -> Option<Witness>) -> Screen {
    points
        .iter()
        .find_map(|x| check(x))
        .map_or_else(Screen::pass, Screen::fail)
}

/// The own gradient along player i's axis may switch from + to − at most
/// once and must never switch from − back to +.
fn single_peak_violation(game: &dyn Game, bounds: &BoundingBox, x: &[f64]) -> Option<Witness> {
    let mut y = x.to_vec();
    for i in 0..game.n_players() {
        let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
        let mut seen_negative = false;
        for k in 0..PEAK_GRID {
            y[i] = lo + (hi - lo) * k as f64 / (PEAK_GRID - 1) as f64;
            match sign_with_tol(game.own_gradient(i, &y), SIGN_TOL) {
                -1 => seen_negative = true,
                1 if seen_negative => {
                    return Some(Witness {
                        point: y.clone(),
                        player: i,
                        other: None,
                        detail: format!("own gradient turns positive again at x_{i} = {}", y[i]),
                    })
                }
                _ => {}
            }
        }
        y[i] = x[i];
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{FnGame, GameSpec};

    fn report(name: &str) -> HypothesisReport {
        let g = GameSpec::named(name).unwrap().build().unwrap();
        let b = BoundingBox::default_for(g.n_players());
        check_hypotheses(g.as_ref(), &b, 200, 11).unwrap()
    }

    #[test]
    fn search_game_passes_everything() {
        assert_eq!(report("diamond_search_k3").flags(), [true; 4]);
    }

    #[test]
    fn antisymmetric_pair_fails_symmetry() {
        let r = report("appendix_example_2");
        assert!(!r.symmetric_externalities.holds);
        let w = r.symmetric_externalities.witness.unwrap();
        let g = GameSpec::AppendixExample2.build().unwrap();
        assert!(g.cross_gradient(0, 1, &w.point) * g.cross_gradient(1, 0, &w.point) < 0.0);
    }

    #[test]
    fn square_game_is_substitutes() {
        let r = report("appendix_example_1");
        assert!(!r.strategic_complements.holds);
        assert!(r.boundary_condition.holds);
    }

    #[test]
    fn double_peaked_gradient_is_caught() {
        // Own gradient cos(x) changes sign several times on [0, 10].
        let g = FnGame::new("wave", 1, |_, x: &[f64]| x[0].sin());
        let r = check_hypotheses(&g, &BoundingBox::default_for(1), 3, 0).unwrap();
        assert!(!r.single_peaked.holds);
    }
}
