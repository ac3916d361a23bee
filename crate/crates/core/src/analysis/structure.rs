use crate::eigen::eigen_spectrum;
use crate::error::{Error, Result};
use crate::game::{
    central_difference, check_dim, sign_with_tol, Benefit, BoundingBox, DiamondSearch, Game, GameSpec, PublicGood,
    FD_STEP, SIGN_TOL,
};
use crate::linalg::{dot, SquareMatrix};
use crate::rng::{derive_seed, stream, unit_f64};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// A scalar function on the orthant whose coordinate slopes are compared
/// against own gradients.
pub trait PotentialFunction: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;

    fn gradient(&self, i: usize, x: &[f64]) -> f64 {
        central_difference(|y| self.eval(y), x, i, FD_STEP)
    }
}

/// P(x) = α Σ_{i<j} δ_ij x_i x_j − Σ_i c(x_i), exact for symmetric δ.
#[derive(Debug, Clone)]
pub struct SearchPotential {
    game: DiamondSearch,
}

impl SearchPotential {
    pub fn new(game: &DiamondSearch) -> Result<Self> {
        let n = game.n_players();
        for i in 0..n {
            for j in 0..i {
                if game.delta(i, j) != game.delta(j, i) {
                    return Err(Error::InvalidGame(
                        "search potential needs a symmetric interaction matrix".into(),
                    ));
                }
            }
        }
        Ok(Self { game: game.clone() })
    }
}

impl PotentialFunction for SearchPotential {
    fn eval(&self, x: &[f64]) -> f64 {
        let g = &self.game;
        let c = g.cost();
        let mut cross = 0.0;
        let mut own = 0.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                cross += g.delta(i, j) * x[i] * x[j];
            }
            own += 0.5 * c.quadratic * x[i] * x[i] - c.linear * x[i];
        }
        g.alpha() * cross - own
    }

    fn gradient(&self, i: usize, x: &[f64]) -> f64 {
        // Equal to the own gradient by construction; kept independent of Game::partial.
        let g = &self.game;
        let c = g.cost();
        let nb: f64 = (0..x.len()).map(|j| g.delta(i, j) * x[j]).sum();
        g.alpha() * nb - (c.quadratic * x[i] - c.linear)
    }
}

/// Exact potential of a quadratic public-good game with κ_i δ_ij = κ_j δ_ji:
/// P = Σ (s_i − c_i − κ_i) x_i + Σ κ_i x_i²/2 + Σ_{i<j} κ_i δ_ij x_i x_j.
#[derive(Debug, Clone)]
pub struct QuadraticPublicGoodPotential {
    linear: Vec<f64>,
    curvature: Vec<f64>,
    cross: Vec<Vec<f64>>,
}

impl QuadraticPublicGoodPotential {
    pub fn new(game: &PublicGood) -> Result<Self> {
        let n = game.n_players();
        let mut linear = Vec::with_capacity(n);
        let mut curvature = Vec::with_capacity(n);
        for i in 0..n {
            match game.benefit(i) {
                Benefit::Quadratic { slope, curvature: k } => {
                    linear.push(slope - game.cost(i) - k);
                    curvature.push(k);
                }
                Benefit::Log1p => {
                    return Err(Error::InvalidGame(
                        "no closed-form potential for a logarithmic benefit".into(),
                    ))
                }
            }
        }
        let mut cross = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = curvature[i] * game.weight(i, j);
                let b = curvature[j] * game.weight(j, i);
                if (a - b).abs() > 1e-15 * (1.0 + a.abs()) {
                    return Err(Error::InvalidGame("cross curvatures are not symmetric".into()));
                }
                cross[i][j] = a;
            }
        }
        Ok(Self {
            linear,
            curvature,
            cross,
        })
    }
}

impl PotentialFunction for QuadraticPublicGoodPotential {
    fn eval(&self, x: &[f64]) -> f64 {
        let mut p = 0.0;
        for i in 0..x.len() {
            p += self.linear[i] * x[i] + 0.5 * self.curvature[i] * x[i] * x[i];
            for j in (i + 1)..x.len() {
                p += self.cross[i][j] * x[i] * x[j];
            }
        }
        p
    }

    fn gradient(&self, i: usize, x: &[f64]) -> f64 {
        let off: f64 = (0..x.len()).map(|j| self.cross[i][j] * x[j]).sum();
        self.linear[i] + self.curvature[i] * x[i] + off
    }
}

/// Potential given by a closure; gradient by central differences.
pub struct FnPotential<F: Fn(&[f64]) -> f64 + Send + Sync>(pub F);

impl<F: Fn(&[f64]) -> f64 + Send + Sync> PotentialFunction for FnPotential<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

/// Closed-form exact potential for the builtin families that have one.
pub fn exact_potential(spec: &GameSpec) -> Option<Box<dyn PotentialFunction>> {
    if let Some(Ok(g)) = spec.as_diamond_search() {
        return SearchPotential::new(&g)
            .ok()
            .map(|p| Box::new(p) as Box<dyn PotentialFunction>);
    }
    if let Some(Ok(g)) = spec.as_public_good() {
        return QuadraticPublicGoodPotential::new(&g)
            .ok()
            .map(|p| Box::new(p) as Box<dyn PotentialFunction>);
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LopgReport {
    pub holds: bool,
    pub samples: usize,
    /// First sampled point where some player's sign disagrees.
    pub witness: Option<Vec<f64>>,
    pub witness_player: Option<usize>,
}

fn check_box(game: &dyn Game, bounds: &BoundingBox, samples: usize) -> Result<()> {
    if bounds.dim() != game.n_players() {
        return Err(Error::InvalidConfig("box dimension differs from player count".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    Ok(())
}

/// Sign agreement between own gradients and potential slopes at sampled points.
pub fn check_lopg(
    game: &dyn Game,
    p: &dyn PotentialFunction,
    bounds: &BoundingBox,
    samples: usize,
    seed: u64,
) -> Result<LopgReport> {
    check_box(game, bounds, samples)?;
    let mut rng = stream(derive_seed(seed, 0));
    for _ in 0..samples {
        let x = bounds.sample(&mut rng);
        for i in 0..x.len() {
            if sign_with_tol(game.own_gradient(i, &x), SIGN_TOL) != sign_with_tol(p.gradient(i, &x), SIGN_TOL) {
                return Ok(LopgReport {
                    holds: false,
                    samples,
                    witness: Some(x),
                    witness_player: Some(i),
                });
            }
        }
    }
    Ok(LopgReport {
        holds: true,
        samples,
        witness: None,
        witness_player: None,
    })
}

/// G(x, r) + G(x, r)' with G_ij = r_i ∂²u_i/∂x_i∂x_j.
pub fn rosen_matrix(game: &dyn Game, r: &[f64], x: &[f64]) -> Result<SquareMatrix> {
    check_dim(game, x)?;
    let g = SquareMatrix::from_fn(x.len(), |i, j| r[i] * game.second_derivative(i, j, x));
    Ok(g.add(&g.transpose()))
}

/// The split G + G' = A − Σ_k B^k + C at r = 1, built from full payoff Hessians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenDecomposition {
    pub a: SquareMatrix,
    pub b_sum: SquareMatrix,
    pub c: SquareMatrix,
    /// max |A − ΣB + C − (G + G')| at r = 1.
    pub residual: f64,
}

impl RosenDecomposition {
    pub fn at(game: &dyn Game, x: &[f64]) -> Result<Self> {
        let n = x.len();
        let a = SquareMatrix::from_fn(n, |i, j| if i == j { game.second_partial(i, i, i, x) } else { 0.0 });
        let b_sum = SquareMatrix::from_fn(n, |i, j| {
            (0..n)
                .filter(|&k| k != i && k != j)
                .map(|k| game.second_partial(k, i, j, x))
                .sum()
        });
        let c = SquareMatrix::from_fn(n, |i, j| (0..n).map(|k| game.second_partial(k, i, j, x)).sum());
        let total = a.sub(&b_sum).add(&c);
        let residual = total.sub(&rosen_matrix(game, &vec![1.0; n], x)?).max_abs();
        Ok(Self { a, b_sum, c, residual })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RosenWitness {
    Pairwise { x0: Vec<f64>, x1: Vec<f64>, value: f64 },
    Matrix { point: Vec<f64>, max_eigenvalue: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosenReport {
    pub weights: Vec<f64>,
    pub samples: usize,
    /// Sampled pairs all satisfied the pairing inequality. A falsifier only.
    pub pairwise_holds: bool,
    /// G + G' negative definite at every sample: consistent with the condition.
    pub matrix_holds: bool,
    /// Sample with the largest top eigenvalue of G + G'.
    pub worst_point: Vec<f64>,
    /// Real eigenvalues of G + G' there, ascending.
    pub worst_spectrum: Vec<f64>,
    pub decomposition: RosenDecomposition,
    pub witness: Option<RosenWitness>,
}

fn weighted_gradient(game: &dyn Game, r: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| r[i] * game.own_gradient(i, x)).collect()
}

/// Samples the weighted pairing inequality and the symmetric-part spectrum.
pub fn check_rosen(game: &dyn Game, r: &[f64], bounds: &BoundingBox, samples: usize, seed: u64) -> Result<RosenReport> {
    check_box(game, bounds, samples)?;
    if r.len() != game.n_players() || r.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidConfig(
            "Rosen weights must be strictly positive, one per player".into(),
        ));
    }
    let mut rng = stream(derive_seed(seed, 1));
    let mut pairwise_holds = true;
    let mut matrix_holds = true;
    let mut witness = None;
    let mut worst: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for _ in 0..samples {
        let x0 = bounds.sample(&mut rng);
        let x1 = bounds.sample(&mut rng);
        let d: Vec<f64> = x1.iter().zip(&x0).map(|(a, b)| a - b).collect();
        if d.iter().any(|v| *v != 0.0) {
            let g0 = weighted_gradient(game, r, &x0);
            let g1 = weighted_gradient(game, r, &x1);
            let value = dot(&d, &g0) - dot(&d, &g1);
            if !(value > 0.0) && pairwise_holds {
                pairwise_holds = false;
                witness.get_or_insert(RosenWitness::Pairwise {
                    x0: x0.clone(),
                    x1,
                    value,
                });
            }
        }
        let spectrum = eigen_spectrum(&rosen_matrix(game, r, &x0)?)?;
        let top = spectrum.max_real_part();
        if !(top < 0.0) && matrix_holds {
            matrix_holds = false;
            witness.get_or_insert(RosenWitness::Matrix {
                point: x0.clone(),
                max_eigenvalue: top,
            });
        }
        if worst.as_ref().is_none_or(|w| top > w.0) {
            worst = Some((top, x0, spectrum.real_parts()));
        }
    }
    let (_, worst_point, worst_spectrum) = worst.expect("at least one sample");
    let decomposition = RosenDecomposition::at(game, &worst_point)?;
    Ok(RosenReport {
        weights: r.to_vec(),
        samples,
        pairwise_holds,
        matrix_holds,
        worst_point,
        worst_spectrum,
        decomposition,
        witness,
    })
}

/// True iff P(y) ≤ P(x) + 1e-9 at every sampled y of the ball around x
/// intersected with the orthant.
pub fn local_max_check(p: &dyn PotentialFunction, x: &[f64], radius: f64, samples: usize, seed: u64) -> Result<bool> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("radius {radius} must be positive")));
    }
    let n = x.len();
    let px = p.eval(x);
    let mut rng = stream(derive_seed(seed, 2));
    let mut y = vec![0.0; n];
    for _ in 0..samples {
        let dir: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&dir, &dir).sqrt();
        if norm == 0.0 {
            continue;
        }
        let rho = radius * unit_f64(&mut rng).powf(1.0 / n as f64);
        for k in 0..n {
            y[k] = (x[k] + rho * dir[k] / norm).max(0.0);
        }
        if p.eval(&y) > px + 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{FnGame, GameSpec};

    fn diamond() -> DiamondSearch {
        DiamondSearch::complete(3, 0.2)
    }

    #[test]
    fn search_potential_slopes_match() {
        let g = diamond();
        let p = SearchPotential::new(&g).unwrap();
        let x = [0.3, 1.7, 2.2];
        for i in 0..3 {
            assert!((p.gradient(i, &x) - g.own_gradient(i, &x)).abs() < 1e-14);
            let fd = central_difference(|y| p.eval(y), &x, i, FD_STEP);
            assert!((fd - p.gradient(i, &x)).abs() < 1e-8);
        }
    }

    #[test]
    fn public_good_potential_slopes_match() {
        for name in ["public_good_path3", "appendix_example_1"] {
            let game = GameSpec::named(name).unwrap().as_public_good().unwrap().unwrap();
            let p = QuadraticPublicGoodPotential::new(&game).unwrap();
            let x = [0.4, 1.1, 0.2, 0.9][..game.n_players()].to_vec();
            for i in 0..x.len() {
                assert!((p.gradient(i, &x) - game.own_gradient(i, &x)).abs() < 1e-13);
                let fd = central_difference(|y| p.eval(y), &x, i, FD_STEP);
                assert!((fd - p.gradient(i, &x)).abs() < 1e-8);
            }
        }
        assert!(exact_potential(&GameSpec::named("public_good_pair").unwrap()).is_none());
        assert!(exact_potential(&GameSpec::named("diamond_search_k3").unwrap()).is_some());
    }

    #[test]
    fn lopg_exact_potential_holds() {
        let g = diamond();
        let p = SearchPotential::new(&g).unwrap();
        let r = check_lopg(&g, &p, &BoundingBox::cube(3, 0.0, 5.0).unwrap(), 1000, 7).unwrap();
        assert!(r.holds && r.witness.is_none());
    }

    #[test]
    fn lopg_opposed_interests_fail() {
        // u_1 = x_1 x_2 − x_1², u_2 = −x_1 x_2 − x_2²/2 + x_2: P = u_1 slopes in x_2 like u_1, not u_2.
        let g = FnGame::new("opposed", 2, |i, x: &[f64]| {
            if i == 0 {
                x[0] * x[1] - x[0] * x[0]
            } else {
                -x[0] * x[1] - 0.5 * x[1] * x[1] + x[1]
            }
        });
        let p = FnPotential(|x: &[f64]| x[0] * x[1] - x[0] * x[0]);
        let r = check_lopg(&g, &p, &BoundingBox::cube(2, 0.0, 3.0).unwrap(), 500, 1).unwrap();
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }

    #[test]
    fn lopg_single_player() {
        let g = FnGame::new("solo", 1, |_, x: &[f64]| x[0] - x[0] * x[0]);
        let p = FnPotential(|x: &[f64]| x[0] - x[0] * x[0]);
        assert!(
            check_lopg(&g, &p, &BoundingBox::cube(1, 0.0, 2.0).unwrap(), 200, 3)
                .unwrap()
                .holds
        );
    }

    #[test]
    fn rosen_diamond_spectrum() {
        let g = diamond();
        let r = check_rosen(&g, &[1.0; 3], &BoundingBox::cube(3, 0.0, 5.0).unwrap(), 50, 11).unwrap();
        assert!(r.pairwise_holds && r.matrix_holds && r.witness.is_none());
        for (e, w) in r.worst_spectrum.iter().zip([-2.4, -2.4, -1.2]) {
            assert!((e - w).abs() < 1e-12, "{:?}", r.worst_spectrum);
        }
        assert!(r.decomposition.residual < 1e-14);
    }

    #[test]
    fn rosen_decomposition_identity_on_other_games() {
        for name in ["appendix_example_1", "appendix_example_2", "public_good_pair"] {
            let g = GameSpec::named(name).unwrap().build().unwrap();
            let x = vec![0.7; g.n_players()];
            let d = RosenDecomposition::at(g.as_ref(), &x).unwrap();
            assert!(d.residual < 1e-12, "{name}: {}", d.residual);
        }
    }

    #[test]
    fn rosen_convex_own_payoff_fails() {
        let g = FnGame::new(
            "convex",
            2,
            |i, x: &[f64]| if i == 0 { x[0] * x[0] } else { -x[1] * x[1] },
        );
        let r = check_rosen(&g, &[1.0, 1.0], &BoundingBox::cube(2, 0.0, 2.0).unwrap(), 200, 5).unwrap();
        assert!(!r.pairwise_holds && !r.matrix_holds);
        assert!(r.witness.is_some());
        // Pairs that differ only in the convex coordinate always violate the inequality.
        let r = check_rosen(
            &g,
            &[1.0, 1.0],
            &BoundingBox::new(vec![0.0, 1.0], vec![2.0, 1.0]).unwrap(),
            5,
            5,
        )
        .unwrap();
        assert!(matches!(r.witness, Some(RosenWitness::Pairwise { .. })));
    }

    #[test]
    fn rosen_scalar_concave() {
        let g = FnGame::new("solo", 1, |_, x: &[f64]| -(x[0] - 1.0).powi(2));
        let r = check_rosen(&g, &[2.0], &BoundingBox::cube(1, 0.0, 3.0).unwrap(), 100, 5).unwrap();
        assert!(r.pairwise_holds && r.matrix_holds);
    }

    #[test]
    fn local_max_fixtures() {
        let p = SearchPotential::new(&diamond()).unwrap();
        let s = 5.0 / 3.0;
        assert!(local_max_check(&p, &[s, s, s], 0.1, 2000, 1).unwrap());
        assert!(!local_max_check(&p, &[1.25, 1.25, 0.0], 0.1, 2000, 1).unwrap());
        let flat = FnPotential(|_: &[f64]| 4.0);
        assert!(local_max_check(&flat, &[0.0, 2.0], 0.5, 100, 1).unwrap());
        assert!(local_max_check(&flat, &[1.0], 0.0, 10, 1).is_err());
    }
}
