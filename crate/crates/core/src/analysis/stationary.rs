use crate::dynamics::mean_field;
use crate::eigen::{eigen_spectrum, Eigenvalue};
use crate::error::{Error, Result};
use crate::game::{check_dim, Game};
use crate::linalg::{norm2, norm_inf, SquareMatrix};
use serde::{Deserialize, Serialize};

/// ‖F(x)‖_∞ at or below this makes x a zero.
pub const ZERO_TOL: f64 = 1e-8;
/// Coordinates at or below this count as idle.
pub const SUPPORT_TOL: f64 = 1e-7;
/// Real parts within ±SPEC_TOL are treated as zero.
pub const SPEC_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroClass {
    NashEquilibrium,
    /// Some idle player has a strictly positive own gradient.
    OtherZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stability {
    LinearlyStable,
    LinearlyUnstable,
    /// Neither test is conclusive: the largest real part is within the band.
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub location: Vec<f64>,
    /// Zero-based indices of players with x_i > SUPPORT_TOL.
    pub support: Vec<usize>,
    pub klass: ZeroClass,
    pub eigenvalues: Vec<Eigenvalue>,
    pub stability: Stability,
    /// Unit eigenvectors of simple real eigenvalues with positive real part.
    pub unstable_directions: Vec<Vec<f64>>,
    /// ‖F(location)‖_∞.
    pub residual: f64,
    /// False for members of a continuum of zeros; those carry no stability claim.
    #[serde(default = "yes")]
    pub isolated: bool,
    #[serde(default)]
    pub cluster: Option<usize>,
}

fn yes() -> bool {
    true
}

/// ‖F(x)‖_∞.
pub fn residual(game: &dyn Game, x: &[f64]) -> Result<f64> {
    Ok(norm_inf(&mean_field(game, x)?))
}

/// DF_ij = δ_ij ∂u_i/∂x_i + x_i ∂²u_i/∂x_i∂x_j.
pub fn jacobian_f(game: &dyn Game, x: &[f64]) -> Result<SquareMatrix> {
    check_dim(game, x)?;
    let n = x.len();
    let m = SquareMatrix::from_fn(n, |i, j| {
        let curvature = if x[i] == 0.0 {
            0.0
        } else {
            x[i] * game.second_derivative(i, j, x)
        };
        if i == j {
            game.own_gradient(i, x) + curvature
        } else {
            curvature
        }
    });
    if !m.is_finite() {
        return Err(Error::Domain {
            player: 0,
            point: x.to_vec(),
        });
    }
    Ok(m)
}

pub fn classify_zero(game: &dyn Game, x: &[f64], tol: f64) -> Result<ZeroClass> {
    let r = residual(game, x)?;
    if r > ZERO_TOL {
        return Err(Error::NotAZero { residual: r });
    }
    let other = (0..x.len()).any(|i| x[i] <= tol && game.own_gradient(i, x) > tol);
    Ok(if other {
        ZeroClass::OtherZero
    } else {
        ZeroClass::NashEquilibrium
    })
}

/// Classifies a verified zero and computes its linear stability.
pub fn stability_of(game: &dyn Game, x: &[f64], spec_tol: f64) -> Result<StationaryPoint> {
    let klass = classify_zero(game, x, SUPPORT_TOL)?;
    let spectrum = eigen_spectrum(&jacobian_f(game, x)?)?;
    let top = spectrum.max_real_part();
    let stability = if top > spec_tol {
        Stability::LinearlyUnstable
    } else if top < -spec_tol {
        Stability::LinearlyStable
    } else {
        Stability::Marginal
    };
    let unstable_directions = spectrum
        .eigenvalues
        .iter()
        .zip(&spectrum.eigenvectors)
        .filter(|(e, _)| e.re > spec_tol)
        .filter_map(|(_, v)| v.clone())
        .collect();
    Ok(StationaryPoint {
        location: x.to_vec(),
        support: (0..x.len()).filter(|&i| x[i] > SUPPORT_TOL).collect(),
        klass,
        eigenvalues: spectrum.eigenvalues,
        stability,
        unstable_directions,
        residual: residual(game, x)?,
        isolated: true,
        cluster: None,
    })
}

/// E(⟨U, v⟩² | x) = Σ_{i<j} (v_i x_i ∂u_i/∂x_j + v_j x_j ∂u_j/∂x_i)².
pub fn noise_excitation(game: &dyn Game, x: &[f64], v: &[f64]) -> Result<f64> {
    check_dim(game, x)?;
    if v.len() != x.len() || !(norm2(v) > 0.0) {
        return Err(Error::InvalidConfig(
            "direction must be non-zero with one entry per player".into(),
        ));
    }
    let n = x.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let t = v[i] * x[i] * game.cross_gradient(i, j, x) + v[j] * x[j] * game.cross_gradient(j, i, x);
            total += t * t;
        }
    }
    if !total.is_finite() {
        return Err(Error::Domain {
            player: 0,
            point: x.to_vec(),
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameSpec;

    fn game(name: &str) -> Box<dyn Game> {
        GameSpec::named(name).unwrap().build().unwrap()
    }

    #[test]
    fn jacobian_fixtures() {
        let j = jacobian_f(game("appendix_example_2").as_ref(), &[1.0, 1.0]).unwrap();
        assert_eq!(j.rows(), vec![vec![-1.0, 2.0], vec![2.0, -1.0]]);

        let j = jacobian_f(game("appendix_example_1").as_ref(), &[1.0 / 3.0; 4]).unwrap();
        let want = [
            [-1.0, -1.0, 0.0, -1.0],
            [-1.0, -1.0, -1.0, 0.0],
            [0.0, -1.0, -1.0, -1.0],
            [-1.0, 0.0, -1.0, -1.0],
        ];
        for i in 0..4 {
            for k in 0..4 {
                assert!((j[(i, k)] - want[i][k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn idle_rows_are_diagonal() {
        let g = game("diamond_search_k3");
        let x = [0.0, 1.2, 0.4];
        let j = jacobian_f(g.as_ref(), &x).unwrap();
        assert_eq!(j[(0, 1)], 0.0);
        assert_eq!(j[(0, 2)], 0.0);
        assert_eq!(j[(0, 0)], g.own_gradient(0, &x));
    }

    #[test]
    fn classification() {
        let g = game("diamond_search_k3");
        let s = 5.0 / 3.0;
        assert_eq!(
            classify_zero(g.as_ref(), &[s, s, s], SUPPORT_TOL).unwrap(),
            ZeroClass::NashEquilibrium
        );
        assert_eq!(
            classify_zero(g.as_ref(), &[1.25, 1.25, 0.0], SUPPORT_TOL).unwrap(),
            ZeroClass::OtherZero
        );
        assert!((g.own_gradient(2, &[1.25, 1.25, 0.0]) - 1.5).abs() < 1e-15);
        assert!(matches!(
            classify_zero(g.as_ref(), &[1.0, 1.0, 1.0], SUPPORT_TOL),
            Err(Error::NotAZero { .. })
        ));
    }

    #[test]
    fn stability_fixtures() {
        let p = stability_of(game("appendix_example_2").as_ref(), &[1.0, 1.0], SPEC_TOL).unwrap();
        assert_eq!(p.stability, Stability::LinearlyUnstable);
        assert_eq!(p.klass, ZeroClass::NashEquilibrium);
        let v = &p.unstable_directions[0];
        assert!((v[0] - v[1]).abs() < 1e-9);

        let p = stability_of(game("appendix_example_1").as_ref(), &[1.0 / 3.0; 4], SPEC_TOL).unwrap();
        assert_eq!(p.stability, Stability::LinearlyUnstable);
        let v = &p.unstable_directions[0];
        for (c, sign) in v.iter().zip([1.0, -1.0, 1.0, -1.0]) {
            assert!((c - 0.5 * sign * v[0].signum()).abs() < 1e-9, "{v:?}");
        }

        let s = 5.0 / 3.0;
        let p = stability_of(game("diamond_search_k3").as_ref(), &[s, s, s], SPEC_TOL).unwrap();
        assert_eq!(p.stability, Stability::LinearlyStable);
        // DF = x*(-I + 0.2 A(K3)), adjacency spectrum {-1, -1, 2}.
        let want = [s * -1.2, s * -1.2, s * -0.6];
        for (e, w) in p.eigenvalues.iter().zip(want) {
            assert!((e.re - w).abs() < 1e-12 && e.im == 0.0);
        }
    }

    #[test]
    fn noise_fixtures() {
        let g = game("appendix_example_2");
        assert_eq!(noise_excitation(g.as_ref(), &[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(noise_excitation(g.as_ref(), &[1.0, 1.0], &[1.0, -1.0]).unwrap(), 16.0);
        let g = game("appendix_example_1");
        let v = [1.0, -1.0, 1.0, -1.0];
        assert!(noise_excitation(g.as_ref(), &[1.0 / 3.0; 4], &v).unwrap() < 1e-30);
        assert!(noise_excitation(g.as_ref(), &[1.0 / 3.0; 4], &[0.0; 4]).is_err());
    }
}
