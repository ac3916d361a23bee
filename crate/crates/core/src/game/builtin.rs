//! Builtin game families and their JSON descriptors.
//!
//! Descriptor schema: `{"type": <family>, "params": {...}}`, interaction
//! matrices given row-major as arrays of rows. See the README for the full
//! parameter list of each family.

use super::{DeclaredProperties, Game};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Concave benefit b(y) of aggregate effort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Benefit {
    /// b(y) = ln(1 + y)
    Log1p,
    /// b(y) = slope·y + curvature·(y − 1)²/2, so b'(1) = slope and b'' = curvature.
    Quadratic { slope: f64, curvature: f64 },
}

impl Benefit {
    #[inline]
    pub fn value(&self, y: f64) -> f64 {
        match *self {
            Benefit::Log1p => y.ln_1p(),
            Benefit::Quadratic { slope, curvature } => slope * y + 0.5 * curvature * (y - 1.0).powi(2),
        }
    }

    #[inline]
    pub fn first(&self, y: f64) -> f64 {
        match *self {
            Benefit::Log1p => 1.0 / (1.0 + y),
            Benefit::Quadratic { slope, curvature } => slope + curvature * (y - 1.0),
        }
    }

    #[inline]
    pub fn second(&self, y: f64) -> f64 {
        match *self {
            Benefit::Log1p => -1.0 / (1.0 + y).powi(2),
            Benefit::Quadratic { curvature, .. } => curvature,
        }
    }
}

/// Search cost c(x) = quadratic·x²/2 − linear·x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cost {
    pub quadratic: f64,
    pub linear: f64,
}

impl Default for Cost {
    /// c(x) = x²/2 − x.
    fn default() -> Self {
        Self {
            quadratic: 1.0,
            linear: 1.0,
        }
    }
}

impl Cost {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        0.5 * self.quadratic * x * x - self.linear * x
    }
    #[inline]
    fn first(&self, x: f64) -> f64 {
        self.quadratic * x - self.linear
    }
}

/// One value shared by every player, or one per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerPlayer<T> {
    Uniform(T),
    Each(Vec<T>),
}

impl<T: Clone> PerPlayer<T> {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<T>> {
        match self {
            PerPlayer::Uniform(v) => Ok(vec![v.clone(); n]),
            PerPlayer::Each(v) if v.len() == n => Ok(v.clone()),
            PerPlayer::Each(v) => Err(Error::InvalidGame(format!(
                "{what} has {} entries for {n} players",
                v.len()
            ))),
        }
    }
}

fn validate_delta(delta: &[Vec<f64>]) -> Result<usize> {
    let n = delta.len();
    if n == 0 {
        return Err(Error::InvalidGame("interaction matrix is empty".into()));
    }
    for (i, row) in delta.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGame(format!(
                "interaction matrix row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &d) in row.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidGame(format!("delta[{i}][{j}] = {d} is negative")));
            }
            if i == j && d != 0.0 {
                return Err(Error::InvalidGame(format!("delta[{i}][{i}] = {d} must be zero")));
            }
        }
    }
    Ok(n)
}

fn support_symmetric(delta: &[f64], n: usize) -> bool {
    (0..n).all(|i| (0..n).all(|j| (delta[i * n + j] > 0.0) == (delta[j * n + i] > 0.0)))
}

fn exactly_symmetric(delta: &[f64], n: usize) -> bool {
    (0..n).all(|i| (0..n).all(|j| delta[i * n + j] == delta[j * n + i]))
}

/// Public-good game: u_i(x) = b_i(x_i + Σ_j δ_ij x_j) − c_i x_i.
#[derive(Debug, Clone)]
pub struct PublicGood {
    name: String,
    n: usize,
    benefits: Vec<Benefit>,
    costs: Vec<f64>,
    /// Row-major weights with unit diagonal.
    weights: Vec<f64>,
}

impl PublicGood {
    pub fn new(name: impl Into<String>, benefits: Vec<Benefit>, costs: Vec<f64>, delta: &[Vec<f64>]) -> Result<Self> {
        let n = validate_delta(delta)?;
        if benefits.len() != n || costs.len() != n {
            return Err(Error::InvalidGame(
                "benefit/cost length differs from player count".into(),
            ));
        }
        let mut weights = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                weights[i * n + j] = if i == j { 1.0 } else { delta[i][j] };
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            benefits,
            costs,
            weights,
        })
    }

    #[inline]
    fn aggregate(&self, i: usize, x: &[f64]) -> f64 {
        let row = &self.weights[i * self.n..(i + 1) * self.n];
        row.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn benefit(&self, i: usize) -> Benefit {
        self.benefits[i]
    }

    pub fn cost(&self, i: usize) -> f64 {
        self.costs[i]
    }
}

impl Game for PublicGood {
    fn n_players(&self) -> usize {
        self.n
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn payoff(&self, i: usize, x: &[f64]) -> f64 {
        self.benefits[i].value(self.aggregate(i, x)) - self.costs[i] * x[i]
    }
    fn partial(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let slope = self.benefits[i].first(self.aggregate(i, x)) * self.weight(i, j);
        if i == j {
            slope - self.costs[i]
        } else {
            slope
        }
    }
    fn second_partial(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        self.benefits[i].second(self.aggregate(i, x)) * self.weight(i, j) * self.weight(i, k)
    }
    fn declared_properties(&self) -> DeclaredProperties {
        let delta: Vec<f64> = (0..self.n * self.n)
            .map(|k| if k / self.n == k % self.n { 0.0 } else { self.weights[k] })
            .collect();
        let concave_quadratic = self
            .benefits
            .iter()
            .all(|b| matches!(b, Benefit::Quadratic { curvature, .. } if *curvature < 0.0));
        DeclaredProperties {
            strategic_complements: delta.iter().all(|d| *d == 0.0),
            symmetric_externalities: support_symmetric(&delta, self.n),
            lopg: concave_quadratic && exactly_symmetric(&delta, self.n),
            rosen: false,
        }
    }
}

/// Local search game: u_i(x) = α x_i Σ_j δ_ij x_j − c(x_i).
#[derive(Debug, Clone)]
pub struct DiamondSearch {
    name: String,
    n: usize,
    alpha: f64,
    delta: Vec<f64>,
    cost: Cost,
}

impl DiamondSearch {
    pub fn new(name: impl Into<String>, alpha: f64, delta: &[Vec<f64>], cost: Cost) -> Result<Self> {
        let n = validate_delta(delta)?;
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidGame(format!("alpha = {alpha} must be non-negative")));
        }
        Ok(Self {
            name: name.into(),
            n,
            alpha,
            delta: delta.iter().flatten().copied().collect(),
            cost,
        })
    }

    /// Complete interaction graph K_n with the default cost x²/2 − x.
    pub fn complete(n: usize, alpha: f64) -> Self {
        Self::new(
            format!("diamond_search_k{n}"),
            alpha,
            &complete_graph(n),
            Cost::default(),
        )
        .expect("complete graph is a valid interaction matrix")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self, i: usize, j: usize) -> f64 {
        self.delta[i * self.n + j]
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    #[inline]
    fn neighbourhood(&self, i: usize, x: &[f64]) -> f64 {
        let row = &self.delta[i * self.n..(i + 1) * self.n];
        row.iter().zip(x).map(|(d, v)| d * v).sum()
    }
}

impl Game for DiamondSearch {
    fn n_players(&self) -> usize {
        self.n
    }
    fn name(&self) -> &str {
        &self.name
    }
    fn payoff(&self, i: usize, x: &[f64]) -> f64 {
        self.alpha * x[i] * self.neighbourhood(i, x) - self.cost.value(x[i])
    }
    fn partial(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        if i == j {
            self.alpha * self.neighbourhood(i, x) - self.cost.first(x[i])
        } else {
            self.alpha * x[i] * self.delta(i, j)
        }
    }
    fn second_partial(&self, i: usize, j: usize, k: usize, _x: &[f64]) -> f64 {
        match (j == i, k == i) {
            (true, true) => -self.cost.quadratic,
            (true, false) => self.alpha * self.delta(i, k),
            (false, true) => self.alpha * self.delta(i, j),
            (false, false) => 0.0,
        }
    }
    fn declared_properties(&self) -> DeclaredProperties {
        // Gershgorin bound on the spectrum of G + G' = −2qI + α(δ + δ').
        let row_bound = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.delta(i, j) + self.delta(j, i)).sum::<f64>())
            .fold(0.0, f64::max);
        DeclaredProperties {
            strategic_complements: true,
            symmetric_externalities: support_symmetric(&self.delta, self.n),
            lopg: exactly_symmetric(&self.delta, self.n),
            rosen: self.alpha * row_bound < 2.0 * self.cost.quadratic,
        }
    }
}

/// Two-player polynomial game with anti-symmetric externalities:
/// u_1 = −x_1²/2 + 2x_1 − x_1(2 − x_2)², u_2 = −x_2²/2 − x_1²(2 − x_2).
#[derive(Debug, Clone, Copy, Default)]
pub struct AntisymmetricPair;

impl Game for AntisymmetricPair {
    fn n_players(&self) -> usize {
        2
    }
    fn name(&self) -> &str {
        "appendix_example_2"
    }
    fn payoff(&self, i: usize, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match i {
            0 => -0.5 * a * a + 2.0 * a - a * (2.0 - b).powi(2),
            _ => -0.5 * b * b - a * a * (2.0 - b),
        }
    }
    fn partial(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match (i, j) {
            (0, 0) => -a + 2.0 - (2.0 - b).powi(2),
            (0, _) => 2.0 * a * (2.0 - b),
            (_, 0) => -2.0 * a * (2.0 - b),
            _ => -b + a * a,
        }
    }
    fn second_partial(&self, i: usize, j: usize, k: usize, x: &[f64]) -> f64 {
        let (a, b) = (x[0], x[1]);
        match (i, j.min(k), j.max(k)) {
            (0, 0, 0) => -1.0,
            (0, 0, _) => 2.0 * (2.0 - b),
            (0, _, _) => -2.0 * a,
            (_, 0, 0) => -2.0 * (2.0 - b),
            (_, 0, _) => 2.0 * a,
            _ => -1.0,
        }
    }
    fn declared_properties(&self) -> DeclaredProperties {
        DeclaredProperties {
            strategic_complements: true,
            ..DeclaredProperties::default()
        }
    }
}

pub fn complete_graph(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
        .collect()
}

pub fn cycle_graph(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if (i + 1) % n == j || (j + 1) % n == i { 1.0 } else { 0.0 })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PublicGoodParams {
    benefit: PerPlayer<Benefit>,
    cost: PerPlayer<f64>,
    delta: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiamondParams {
    alpha: f64,
    delta: Vec<Vec<f64>>,
    #[serde(default)]
    cost: Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SquareParams {
    #[serde(default = "unit")]
    c: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

/// Serializable game descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum GameSpec {
    PublicGood {
        benefit: PerPlayer<Benefit>,
        cost: PerPlayer<f64>,
        delta: Vec<Vec<f64>>,
    },
    DiamondSearch {
        alpha: f64,
        delta: Vec<Vec<f64>>,
        cost: Cost,
    },
    /// Four players on a square with b(y) = c·y − 1.5(y − 1)².
    AppendixExample1 {
        c: f64,
    },
    AppendixExample2,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    params: Value,
}

impl TryFrom<RawSpec> for GameSpec {
    type Error = String;
    fn try_from(raw: RawSpec) -> std::result::Result<Self, String> {
        let params = match raw.params {
            Value::Null => Value::Object(Default::default()),
            v => v,
        };
        let err = |e: serde_json::Error| format!("bad params for `{}`: {e}", raw.kind);
        Ok(match raw.kind.as_str() {
            "public_good" => {
                let p: PublicGoodParams = serde_json::from_value(params).map_err(err)?;
                GameSpec::PublicGood {
                    benefit: p.benefit,
                    cost: p.cost,
                    delta: p.delta,
                }
            }
            "diamond_search" => {
                let p: DiamondParams = serde_json::from_value(params).map_err(err)?;
                GameSpec::DiamondSearch {
                    alpha: p.alpha,
                    delta: p.delta,
                    cost: p.cost,
                }
            }
            "appendix_example_1" => {
                let p: SquareParams = serde_json::from_value(params).map_err(err)?;
                GameSpec::AppendixExample1 { c: p.c }
            }
            "appendix_example_2" => {
                let _: NoParams = serde_json::from_value(params).map_err(err)?;
                GameSpec::AppendixExample2
            }
            other => return Err(format!("unknown game type `{other}`")),
        })
    }
}

impl From<GameSpec> for RawSpec {
    fn from(spec: GameSpec) -> RawSpec {
        let to_value = |v: std::result::Result<Value, serde_json::Error>| v.expect("game parameters serialize");
        let (kind, params) = match spec {
            GameSpec::PublicGood { benefit, cost, delta } => (
                "public_good",
                to_value(serde_json::to_value(PublicGoodParams { benefit, cost, delta })),
            ),
            GameSpec::DiamondSearch { alpha, delta, cost } => (
                "diamond_search",
                to_value(serde_json::to_value(DiamondParams { alpha, delta, cost })),
            ),
            GameSpec::AppendixExample1 { c } => {
                ("appendix_example_1", to_value(serde_json::to_value(SquareParams { c })))
            }
            GameSpec::AppendixExample2 => ("appendix_example_2", Value::Object(Default::default())),
        };
        RawSpec {
            kind: kind.into(),
            params,
        }
    }
}

const BUILTIN_NAMES: [&str; 5] = [
    "diamond_search_k3",
    "public_good_pair",
    "public_good_path3",
    "appendix_example_1",
    "appendix_example_2",
];

pub fn builtin_names() -> &'static [&'static str] {
    &BUILTIN_NAMES
}

impl GameSpec {
    /// Named fixture.
    pub fn named(name: &str) -> Result<Self> {
        Ok(match name {
            "diamond_search_k3" => GameSpec::DiamondSearch {
                alpha: 0.2,
                delta: complete_graph(3),
                cost: Cost::default(),
            },
            "public_good_pair" => GameSpec::PublicGood {
                benefit: PerPlayer::Uniform(Benefit::Log1p),
                cost: PerPlayer::Uniform(0.5),
                delta: complete_graph(2),
            },
            "public_good_path3" => GameSpec::PublicGood {
                benefit: PerPlayer::Uniform(Benefit::Quadratic {
                    slope: 1.0,
                    curvature: -1.0,
                }),
                cost: PerPlayer::Uniform(1.0),
                delta: vec![vec![0.0, 0.25, 0.0], vec![0.25, 0.0, 0.25], vec![0.0, 0.25, 0.0]],
            },
            "appendix_example_1" => GameSpec::AppendixExample1 { c: 1.0 },
            "appendix_example_2" => GameSpec::AppendixExample2,
            other => {
                return Err(Error::UnknownGame {
                    name: other.into(),
                    known: BUILTIN_NAMES.join(", "),
                })
            }
        })
    }

    pub fn label(&self) -> String {
        match self {
            GameSpec::PublicGood { .. } => "public_good".into(),
            GameSpec::DiamondSearch { .. } => "diamond_search".into(),
            GameSpec::AppendixExample1 { .. } => "appendix_example_1".into(),
            GameSpec::AppendixExample2 => "appendix_example_2".into(),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Game>> {
        Ok(match self {
            GameSpec::PublicGood { benefit, cost, delta } => {
                let n = validate_delta(delta)?;
                let costs = cost.expand(n, "cost")?;
                if let Some(c) = costs.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                    return Err(Error::InvalidGame(format!("marginal cost {c} must be positive")));
                }
                Box::new(PublicGood::new(
                    self.label(),
                    benefit.expand(n, "benefit")?,
                    costs,
                    delta,
                )?)
            }
            GameSpec::DiamondSearch { alpha, delta, cost } => {
                Box::new(DiamondSearch::new(self.label(), *alpha, delta, *cost)?)
            }
            GameSpec::AppendixExample1 { c } => Box::new(PublicGood::new(
                self.label(),
                vec![
                    Benefit::Quadratic {
                        slope: *c,
                        curvature: -3.0,
                    };
                    4
                ],
                vec![*c; 4],
                &cycle_graph(4),
            )?),
            GameSpec::AppendixExample2 => Box::new(AntisymmetricPair),
        })
    }
}

impl GameSpec {
    /// The concrete public-good game behind this descriptor, if it is one.
    pub fn as_public_good(&self) -> Option<Result<PublicGood>> {
        match self {
            GameSpec::PublicGood { benefit, cost, delta } => Some((|| {
                let n = validate_delta(delta)?;
                PublicGood::new(
                    self.label(),
                    benefit.expand(n, "benefit")?,
                    cost.expand(n, "cost")?,
                    delta,
                )
            })()),
            GameSpec::AppendixExample1 { c } => Some(PublicGood::new(
                self.label(),
                vec![
                    Benefit::Quadratic {
                        slope: *c,
                        curvature: -3.0,
                    };
                    4
                ],
                vec![*c; 4],
                &cycle_graph(4),
            )),
            _ => None,
        }
    }

    /// The concrete search game behind this descriptor, if it is one.
    pub fn as_diamond_search(&self) -> Option<Result<DiamondSearch>> {
        match self {
            GameSpec::DiamondSearch { alpha, delta, cost } => {
                Some(DiamondSearch::new(self.label(), *alpha, delta, *cost))
            }
            _ => None,
        }
    }
}

/// Builds a game from its descriptor.
pub fn builtin_game(spec: &GameSpec) -> Result<Box<dyn Game>> {
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{eval_payoff, ActionProfile};

    fn point(v: &[f64]) -> ActionProfile {
        ActionProfile::new(v.to_vec()).unwrap()
    }

    #[test]
    fn antisymmetric_pair_payoffs_by_hand() {
        // u1(1,1) = -1/2 + 2 - 1, u2(1,1) = -1/2 - 1.
        let u = eval_payoff(&AntisymmetricPair, &point(&[1.0, 1.0])).unwrap();
        assert_eq!(u, vec![0.5, -1.5]);
        assert_eq!(AntisymmetricPair.own_gradient(0, &[1.0, 1.0]), 0.0);
        assert_eq!(AntisymmetricPair.own_gradient(1, &[1.0, 1.0]), 0.0);
        assert_eq!(
            AntisymmetricPair.cross_gradient(1, 0, &[0.7, 1.3]),
            -AntisymmetricPair.cross_gradient(0, 1, &[0.7, 1.3])
        );
    }

    #[test]
    fn diamond_vanishes_at_origin() {
        let g = GameSpec::named("diamond_search_k3").unwrap().build().unwrap();
        assert_eq!(eval_payoff(g.as_ref(), &point(&[0.0; 3])).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn log_public_good_at_unit_profile() {
        let g = GameSpec::PublicGood {
            benefit: PerPlayer::Uniform(Benefit::Log1p),
            cost: PerPlayer::Uniform(0.5),
            delta: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        }
        .build()
        .unwrap();
        let u = eval_payoff(g.as_ref(), &point(&[1.0, 1.0])).unwrap();
        let want = 2f64.ln() - 0.5;
        assert!((u[0] - want).abs() < 1e-15 && (u[1] - want).abs() < 1e-15);
        assert!((want - 0.19315).abs() < 1e-5);
        assert_eq!(g.cross_gradient(0, 1, &[0.3, 2.0]), 0.0);
        assert_eq!(g.cross_gradient(1, 0, &[0.3, 2.0]), 0.0);
    }

    #[test]
    fn square_game_has_interior_equilibrium() {
        let g = GameSpec::named("appendix_example_1").unwrap().build().unwrap();
        let x = [1.0 / 3.0; 4];
        for i in 0..4 {
            assert!(g.own_gradient(i, &x).abs() < 1e-15);
        }
        // b'(1) = c and b''(1) = -3 for the default benefit.
        let b = Benefit::Quadratic {
            slope: 1.0,
            curvature: -3.0,
        };
        assert_eq!(b.first(1.0), 1.0);
        assert_eq!(b.second(1.0), -3.0);
        assert_eq!(b.value(2.0), 2.0 - 1.5);
    }

    #[test]
    fn malformed_delta_is_rejected() {
        let neg = GameSpec::DiamondSearch {
            alpha: 0.2,
            delta: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
            cost: Cost::default(),
        };
        assert!(matches!(neg.build(), Err(Error::InvalidGame(_))));
        let diag = GameSpec::PublicGood {
            benefit: PerPlayer::Uniform(Benefit::Log1p),
            cost: PerPlayer::Uniform(0.5),
            delta: vec![vec![1.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(matches!(diag.build(), Err(Error::InvalidGame(_))));
        let ragged = GameSpec::DiamondSearch {
            alpha: 0.2,
            delta: vec![vec![0.0, 1.0], vec![1.0]],
            cost: Cost::default(),
        };
        assert!(ragged.build().is_err());
    }

    #[test]
    fn descriptors_parse_from_json() {
        let spec: GameSpec = serde_json::from_str(
            r#"{"type": "diamond_search", "params": {"alpha": 0.2, "delta": [[0,1,1],[1,0,1],[1,1,0]]}}"#,
        )
        .unwrap();
        assert_eq!(spec, GameSpec::named("diamond_search_k3").unwrap());

        let spec: GameSpec = serde_json::from_str(r#"{"type": "appendix_example_2"}"#).unwrap();
        assert_eq!(spec, GameSpec::AppendixExample2);

        let spec: GameSpec = serde_json::from_str(
            r#"{"type": "public_good", "params": {"benefit": {"kind": "log1p"}, "cost": [0.5, 0.7], "delta": [[0,1],[1,0]]}}"#,
        )
        .unwrap();
        let g = spec.build().unwrap();
        assert!((g.own_gradient(1, &[0.0, 0.0]) - 0.3).abs() < 1e-15);

        assert!(serde_json::from_str::<GameSpec>(r#"{"type": "nope"}"#).is_err());
        assert!(serde_json::from_str::<GameSpec>(r#"{"type": "appendix_example_1", "params": {"b": 1}}"#).is_err());
    }

    #[test]
    fn descriptors_survive_json() {
        for name in builtin_names() {
            let spec = GameSpec::named(name).unwrap();
            let text = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<GameSpec>(&text).unwrap(), spec, "{text}");
        }
    }
}
