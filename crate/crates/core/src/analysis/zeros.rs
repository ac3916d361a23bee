use super::stationary::{stability_of, StationaryPoint, SPEC_TOL, SUPPORT_TOL, ZERO_TOL};
use crate::dynamics::mean_field;
use crate::eigen::Eigenvalue;
use crate::error::{Error, Result};
use crate::game::{BoundingBox, Game};
use crate::linalg::{dist_inf, norm_inf, Lu, SquareMatrix};
use crate::rng::{derive_seed, stream, uniform};
use crate::SCHEMA_VERSION;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Largest player count for support enumeration.
pub const MAX_PLAYERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSearchConfig {
    pub grid_per_dim: usize,
    /// Above this many grid starts on one face, the face is sampled instead.
    pub max_starts: usize,
    pub spec_tol: f64,
    pub dedup_tol: f64,
    pub cluster_probe: f64,
    /// Interior points checked on a segment between two candidate cluster members.
    pub segment_probes: usize,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub step_tol: f64,
    pub seed: u64,
}

impl ZeroSearchConfig {
    pub fn new(grid_per_dim: usize) -> Self {
        Self {
            grid_per_dim,
            max_starts: 4096,
            spec_tol: SPEC_TOL,
            dedup_tol: 1e-6,
            cluster_probe: 1e-4,
            segment_probes: 32,
            max_iter: 200,
            max_backtracks: 40,
            step_tol: 1e-12,
            seed: 0,
        }
    }
}

/// A connected set of zeros: members are indices into [`ZeroCatalog::points`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCluster {
    pub id: usize,
    pub members: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCatalog {
    pub schema_version: u32,
    pub game: String,
    pub bounds: BoundingBox,
    pub grid_per_dim: usize,
    /// Sorted by support size, then support, then location.
    pub points: Vec<StationaryPoint>,
    pub clusters: Vec<ZeroCluster>,
    /// Supports on which Newton converged from no start.
    pub unresolved_supports: Vec<Vec<usize>>,
}

impl ZeroCatalog {
    pub fn isolated(&self) -> impl Iterator<Item = (usize, &StationaryPoint)> {
        self.points.iter().enumerate().filter(|(_, p)| p.isolated)
    }

    /// Nearest isolated zero within `tol` (sup norm) of `x`.
    pub fn nearest_isolated(&self, x: &[f64], tol: f64) -> Option<(usize, f64)> {
        self.isolated()
            .map(|(i, p)| (i, dist_inf(&p.location, x)))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    }

    /// Cluster whose bounding box, widened by `tol`, contains `x`.
    pub fn cluster_near(&self, x: &[f64], tol: f64) -> Option<usize> {
        self.clusters
            .iter()
            .find(|c| (0..x.len()).all(|k| x[k] >= c.lower[k] - tol && x[k] <= c.upper[k] + tol))
            .map(|c| c.id)
    }
}

/// Zero catalog with the default search settings.
pub fn find_zeros(game: &dyn Game, bounds: &BoundingBox, grid_per_dim: usize) -> Result<ZeroCatalog> {
    find_zeros_with(game, bounds, &ZeroSearchConfig::new(grid_per_dim))
}

/// Zeros of F by support enumeration: for each support A, multi-start damped
/// Newton on ∂u_i/∂x_i = 0 (i ∈ A) with x_j = 0 off A.
pub fn find_zeros_with(game: &dyn Game, bounds: &BoundingBox, cfg: &ZeroSearchConfig) -> Result<ZeroCatalog> {
    let n = game.n_players();
    if n > MAX_PLAYERS {
        return Err(Error::InvalidConfig(format!(
            "support enumeration limited to {MAX_PLAYERS} players"
        )));
    }
    if bounds.dim() != n {
        return Err(Error::InvalidConfig("box dimension differs from player count".into()));
    }
    if cfg.grid_per_dim < 2 {
        return Err(Error::InvalidConfig("grid_per_dim must be at least 2".into()));
    }
    let per_support: Vec<(u32, Option<Vec<Vec<f64>>>)> = (0..1u32 << n)
        .into_par_iter()
        .map(|mask| (mask, solve_support(game, bounds, cfg, mask)))
        .collect();

    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut unresolved = Vec::new();
    for (mask, sols) in per_support {
        match sols {
            None => unresolved.push(support_of(mask, n)),
            Some(sols) => {
                for x in sols {
                    if !found.iter().any(|y| dist_inf(y, &x) <= cfg.dedup_tol) {
                        found.push(x);
                    }
                }
            }
        }
    }

    let mut points = found
        .iter()
        .map(|x| stability_of(game, x, cfg.spec_tol))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(canonical_order);

    let clusters = detect_clusters(game, bounds, cfg, &mut points);
    Ok(ZeroCatalog {
        schema_version: SCHEMA_VERSION,
        game: game.name().to_string(),
        bounds: bounds.clone(),
        grid_per_dim: cfg.grid_per_dim,
        points,
        clusters,
        unresolved_supports: unresolved,
    })
}

fn support_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

fn canonical_order(a: &StationaryPoint, b: &StationaryPoint) -> Ordering {
    a.support
        .len()
        .cmp(&b.support.len())
        .then_with(|| a.support.cmp(&b.support))
        .then_with(|| {
            a.location
                .iter()
                .zip(&b.location)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Verified zeros on one support, or None if Newton converged from no start.
fn solve_support(game: &dyn Game, bounds: &BoundingBox, cfg: &ZeroSearchConfig, mask: u32) -> Option<Vec<Vec<f64>>> {
    let n = game.n_players();
    let sup = support_of(mask, n);
    if sup.is_empty() {
        return Some(vec![vec![0.0; n]]);
    }
    let mut converged = false;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for z0 in face_starts(bounds, cfg, &sup, mask) {
        let Some(z) = newton(game, &sup, z0, cfg) else { continue };
        converged = true;
        if let Some(x) = accept(game, bounds, &sup, &z) {
            if !out.iter().any(|y| dist_inf(y, &x) <= cfg.dedup_tol) {
                out.push(x);
            }
        }
    }
    converged.then_some(out)
}

fn face_starts(bounds: &BoundingBox, cfg: &ZeroSearchConfig, sup: &[usize], mask: u32) -> Vec<Vec<f64>> {
    let g = cfg.grid_per_dim;
    let m = sup.len();
    let total = (g as f64).powi(m as i32);
    if total > cfg.max_starts as f64 {
        let mut rng = stream(derive_seed(cfg.seed, mask as u64));
        return (0..cfg.max_starts)
            .map(|_| {
                sup.iter()
                    .map(|&i| uniform(&mut rng, bounds.lower[i], bounds.upper[i]))
                    .collect()
            })
            .collect();
    }
    let mut starts = Vec::with_capacity(total as usize);
    let mut idx = vec![0usize; m];
    loop {
        starts.push(
            sup.iter()
                .zip(&idx)
                .map(|(&i, &k)| {
                    let (lo, hi) = (bounds.lower[i], bounds.upper[i]);
                    lo + (k as f64 + 0.5) * (hi - lo) / g as f64
                })
                .collect(),
        );
        let mut d = 0;
        while d < m {
            idx[d] += 1;
            if idx[d] < g {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == m {
            return starts;
        }
    }
}

fn embed(n: usize, sup: &[usize], z: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (k, &i) in sup.iter().enumerate() {
        x[i] = z[k];
    }
    x
}

fn reduced_residual(game: &dyn Game, sup: &[usize], x: &[f64]) -> Vec<f64> {
    sup.iter().map(|&i| game.own_gradient(i, x)).collect()
}

/// Damped Newton on the reduced gradient system. Returns the final iterate
/// if its residual is within tolerance.
fn newton(game: &dyn Game, sup: &[usize], mut z: Vec<f64>, cfg: &ZeroSearchConfig) -> Option<Vec<f64>> {
    let n = game.n_players();
    let m = sup.len();
    let mut x = embed(n, sup, &z);
    let mut r = reduced_residual(game, sup, &x);
    let mut rn = norm_inf(&r);
    for _ in 0..cfg.max_iter {
        if !rn.is_finite() {
            return None;
        }
        if rn == 0.0 {
            break;
        }
        let jac = SquareMatrix::from_fn(m, |k, l| game.second_derivative(sup[k], sup[l], &x));
        if !jac.is_finite() {
            return None;
        }
        let d = newton_direction(&jac, &r);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = z.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            let xt = embed(n, sup, &trial);
            let rt = reduced_residual(game, sup, &xt);
            let rtn = norm_inf(&rt);
            if rtn.is_finite() && rtn < rn {
                accepted = Some((trial, xt, rt, rtn));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, xt, rt, rtn)) = accepted else { break };
        let step = t * norm_inf(&d);
        z = trial;
        x = xt;
        r = rt;
        rn = rtn;
        if step <= cfg.step_tol * norm_inf(&z).max(1.0) {
            break;
        }
    }
    (rn.is_finite() && rn <= ZERO_TOL).then_some(z)
}

/// Solves J d = −r, with a Levenberg–Marquardt step when J is singular.
fn newton_direction(jac: &SquareMatrix, r: &[f64]) -> Vec<f64> {
    let m = r.len();
    let neg: Vec<f64> = r.iter().map(|v| -v).collect();
    let scale = jac.max_abs();
    let lu = Lu::factor(jac);
    if lu.min_pivot() > 1e-10 * scale {
        if let Some(d) = lu.solve(&neg) {
            return d;
        }
    }
    let jt = jac.transpose();
    let normal = SquareMatrix::from_fn(m, |i, j| (0..m).map(|k| jt[(i, k)] * jac[(k, j)]).sum());
    let mu = 1e-10 * (0..m).map(|i| normal[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let damped = normal.add(&SquareMatrix::identity(m).scale(mu));
    let rhs = jt.mul_vec(&neg);
    Lu::factor(&damped).solve(&rhs).unwrap_or_else(|| vec![0.0; m])
}

/// Clamps near-zero support coordinates and verifies the full zero.
fn accept(game: &dyn Game, bounds: &BoundingBox, sup: &[usize], z: &[f64]) -> Option<Vec<f64>> {
    let mut x = embed(game.n_players(), sup, z);
    for &i in sup {
        if x[i] < -SUPPORT_TOL {
            return None;
        }
        if x[i] <= SUPPORT_TOL {
            x[i] = 0.0;
        } else if x[i] < bounds.lower[i] - SUPPORT_TOL {
            return None;
        }
        if x[i] > bounds.upper[i] + SUPPORT_TOL {
            return None;
        }
    }
    let f = mean_field(game, &x).ok()?;
    (norm_inf(&f) <= ZERO_TOL).then_some(x)
}

fn segment_is_zero(game: &dyn Game, a: &[f64], b: &[f64], probes: usize) -> bool {
    (1..=probes).all(|k| {
        let t = k as f64 / (probes + 1) as f64;
        let y: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect();
        mean_field(game, &y).is_ok_and(|f| norm_inf(&f) <= ZERO_TOL)
    })
}

fn near_singular(eigs: &[Eigenvalue]) -> bool {
    let scale = eigs.iter().map(|e| e.abs()).fold(1.0, f64::max);
    eigs.iter().any(|e| e.re.abs() <= 1e-5 * scale)
}

/// Whether a zero has other zeros arbitrarily close along a zero segment,
/// probed by Newton restarts at distance `cluster_probe` on its face and on
/// each face one dimension up.
fn has_nearby_zero(game: &dyn Game, bounds: &BoundingBox, cfg: &ZeroSearchConfig, p: &StationaryPoint) -> bool {
    let n = game.n_players();
    let h = cfg.cluster_probe;
    let x = &p.location;
    let mut faces: Vec<(Vec<usize>, Vec<Vec<f64>>)> = Vec::new();
    let own: Vec<Vec<f64>> = p
        .support
        .iter()
        .flat_map(|&k| {
            [1.0, -1.0].into_iter().map(move |s| {
                let mut d = vec![0.0; n];
                d[k] = s;
                d
            })
        })
        .collect();
    if !p.support.is_empty() {
        faces.push((p.support.clone(), own));
    }
    for j in (0..n).filter(|j| !p.support.contains(j)) {
        let mut sup = p.support.clone();
        sup.push(j);
        sup.sort_unstable();
        let mut dirs = Vec::new();
        let mut up = vec![0.0; n];
        up[j] = 1.0;
        dirs.push(up.clone());
        for &k in &p.support {
            let mut d = up.clone();
            d[k] = -1.0;
            dirs.push(d);
        }
        faces.push((sup, dirs));
    }
    for (sup, dirs) in faces {
        for d in dirs {
            let start: Vec<f64> = sup.iter().map(|&i| (x[i] + h * d[i]).max(0.0)).collect();
            let Some(z) = newton(game, &sup, start, cfg) else {
                continue;
            };
            let Some(y) = accept(game, bounds, &sup, &z) else {
                continue;
            };
            let dist = dist_inf(&y, x);
            if dist > cfg.dedup_tol && dist <= 10.0 * h && segment_is_zero(game, x, &y, cfg.segment_probes) {
                return true;
            }
        }
    }
    false
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = i;
    while parent[c] != r {
        let next = parent[c];
        parent[c] = r;
        c = next;
    }
    r
}

fn detect_clusters(
    game: &dyn Game,
    bounds: &BoundingBox,
    cfg: &ZeroSearchConfig,
    points: &mut [StationaryPoint],
) -> Vec<ZeroCluster> {
    let suspects: Vec<usize> = (0..points.len())
        .filter(|&i| near_singular(&points[i].eigenvalues))
        .collect();
    let probed: Vec<bool> = suspects
        .par_iter()
        .map(|&i| has_nearby_zero(game, bounds, cfg, &points[i]))
        .collect();
    let links: Vec<(usize, usize)> = suspects
        .iter()
        .enumerate()
        .flat_map(|(a, &i)| suspects[a + 1..].iter().map(move |&j| (i, j)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter(|&(i, j)| segment_is_zero(game, &points[i].location, &points[j].location, cfg.segment_probes))
        .collect();

    let mut parent: Vec<usize> = (0..points.len()).collect();
    let mut member = vec![false; points.len()];
    for (&i, &hit) in suspects.iter().zip(&probed) {
        member[i] |= hit;
    }
    for (i, j) in links {
        member[i] = true;
        member[j] = true;
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }

    let mut clusters: Vec<ZeroCluster> = Vec::new();
    let mut root_id: Vec<Option<usize>> = vec![None; points.len()];
    for i in 0..points.len() {
        if !member[i] {
            continue;
        }
        let root = find(&mut parent, i);
        let id = *root_id[root].get_or_insert_with(|| {
            clusters.push(ZeroCluster {
                id: clusters.len(),
                members: Vec::new(),
                lower: points[i].location.clone(),
                upper: points[i].location.clone(),
            });
            clusters.len() - 1
        });
        let c = &mut clusters[id];
        c.members.push(i);
        for (k, v) in points[i].location.iter().enumerate() {
            c.lower[k] = c.lower[k].min(*v);
            c.upper[k] = c.upper[k].max(*v);
        }
        points[i].isolated = false;
        points[i].cluster = Some(id);
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{Stability, ZeroClass};
    use crate::game::GameSpec;

    fn game(name: &str) -> Box<dyn Game> {
        GameSpec::named(name).unwrap().build().unwrap()
    }

    #[test]
    fn diamond_catalog() {
        let g = game("diamond_search_k3");
        let cat = find_zeros(g.as_ref(), &BoundingBox::default_for(3), 4).unwrap();
        assert_eq!(cat.points.len(), 8);
        assert!(cat.clusters.is_empty() && cat.unresolved_supports.is_empty());
        let ne: Vec<_> = cat
            .points
            .iter()
            .filter(|p| p.klass == ZeroClass::NashEquilibrium)
            .collect();
        assert_eq!(ne.len(), 1);
        for v in &ne[0].location {
            assert!((v - 5.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(ne[0].stability, Stability::LinearlyStable);
        assert_eq!(cat.points[0].location, vec![0.0; 3]);
        assert_eq!(cat.points[1].location, vec![1.0, 0.0, 0.0]);
        assert_eq!(cat.points[3].location, vec![0.0, 0.0, 1.0]);
        assert_eq!(cat.points[4].support, vec![0, 1]);
        assert!((cat.points[4].location[1] - 1.25).abs() < 1e-12);
        assert_eq!(cat.points[4].location[2], 0.0);
    }

    #[test]
    fn antisymmetric_pair_catalog() {
        let g = game("appendix_example_2");
        let cat = find_zeros(g.as_ref(), &BoundingBox::cube(2, 0.0, 3.0).unwrap(), 6).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let want = [vec![0.0, 0.0], vec![1.0, 1.0], vec![phi, phi * phi]];
        assert_eq!(cat.points.len(), 3, "{:?}", cat.points);
        for (p, w) in cat.points.iter().zip(&want) {
            assert!(dist_inf(&p.location, w) < 1e-10, "{:?}", p.location);
            assert!(p.isolated);
        }
        assert_eq!(cat.points[1].klass, ZeroClass::NashEquilibrium);
        assert_eq!(cat.points[0].klass, ZeroClass::NashEquilibrium);
    }

    #[test]
    fn public_good_pair_reports_a_cluster() {
        let g = game("public_good_pair");
        let cat = find_zeros(g.as_ref(), &BoundingBox::default_for(2), 4).unwrap();
        assert_eq!(cat.clusters.len(), 1, "{:?}", cat.points);
        let c = &cat.clusters[0];
        for &m in &c.members {
            let x = &cat.points[m].location;
            assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
        }
        let origin = &cat.points[0];
        assert!(origin.isolated && origin.klass == ZeroClass::OtherZero);
        let ends: Vec<_> = cat.points.iter().filter(|p| p.support.len() == 1).collect();
        assert_eq!(ends.len(), 2);
        assert!(ends.iter().all(|p| !p.isolated));
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            assert!(norm_inf(&mean_field(g.as_ref(), &[t, 1.0 - t]).unwrap()) <= ZERO_TOL);
        }
    }

    #[test]
    fn square_game_catalog() {
        let g = game("appendix_example_1");
        let cat = find_zeros(g.as_ref(), &BoundingBox::default_for(4), 3).unwrap();
        let centre = cat.points.iter().find(|p| p.support.len() == 4).expect("interior zero");
        assert!(centre.isolated);
        assert!(centre.location.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-12));
        assert_eq!(centre.stability, Stability::LinearlyUnstable);
        let opposite = cat
            .points
            .iter()
            .filter(|p| p.support == vec![0, 2] || p.support == vec![1, 3])
            .count();
        assert_eq!(opposite, 2);
        assert!(cat.points.iter().filter(|p| p.support.len() == 1).all(|p| !p.isolated));
        let origin = &cat.points[0];
        assert!(origin.isolated && origin.eigenvalues.iter().all(|e| (e.re - 3.0).abs() < 1e-12));
    }

    #[test]
    fn order_is_canonical_and_reproducible() {
        let g = game("diamond_search_k3");
        let a = find_zeros(g.as_ref(), &BoundingBox::default_for(3), 3).unwrap();
        let b = find_zeros(g.as_ref(), &BoundingBox::default_for(3), 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for w in a.points.windows(2) {
            assert_eq!(canonical_order(&w[0], &w[1]), Ordering::Less);
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let g = game("diamond_search_k3");
        assert!(find_zeros(g.as_ref(), &BoundingBox::default_for(3), 1).is_err());
        assert!(find_zeros(g.as_ref(), &BoundingBox::default_for(2), 3).is_err());
    }

    #[test]
    fn face_grid_covers_cells() {
        let cfg = ZeroSearchConfig::new(2);
        let b = BoundingBox::default_for(2);
        let s = face_starts(&b, &cfg, &[0, 1], 3);
        assert_eq!(s, vec![vec![2.5, 2.5], vec![7.5, 2.5], vec![2.5, 7.5], vec![7.5, 7.5]]);
    }
}
