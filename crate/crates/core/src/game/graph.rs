use super::{check_dim, ActionProfile, Game};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// g_ij(x) = 1 iff |∂u_i/∂x_j(x)| > tolerance, with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionGraph {
    pub adjacency: Vec<Vec<u8>>,
    pub base_point: Option<ActionProfile>,
    pub tolerance: f64,
}

impl InteractionGraph {
    /// Undirected graph on `n` vertices from an edge list. Panics on
    /// out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![0u8; n]; n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a][b] = 1;
                adjacency[b][a] = 1;
            }
        }
        Self {
            adjacency,
            base_point: None,
            tolerance: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j] == 1
    }

    /// i ~ j when either direction carries an externality.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&j| j != i && (self.has_edge(i, j) || self.has_edge(j, i)))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n()).all(|i| (0..self.n()).all(|j| self.adjacency[i][j] == self.adjacency[j][i]))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n())
            .map(|i| {
                ((i + 1)..self.n())
                    .filter(|&j| self.has_edge(i, j) || self.has_edge(j, i))
                    .count()
            })
            .sum()
    }
}

pub fn build_interaction_graph(game: &dyn Game, x: &ActionProfile, tol: f64) -> Result<InteractionGraph> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("graph tolerance {tol} must be positive")));
    }
    check_dim(game, x)?;
    let n = game.n_players();
    let mut adjacency = vec![vec![0u8; n]; n];
    for (i, row) in adjacency.iter_mut().enumerate() {
        for (j, g) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let d = game.cross_gradient(i, j, x);
            if !d.is_finite() {
                return Err(Error::Domain {
                    player: i,
                    point: x.to_vec(),
                });
            }
            *g = u8::from(d.abs() > tol);
        }
    }
    Ok(InteractionGraph {
        adjacency,
        base_point: Some(x.clone()),
        tolerance: tol,
    })
}
