use crate::game::InteractionGraph;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub bipartite: bool,
    /// Zero-based vertex sets; the first contains vertex 0.
    pub partition: Option<(Vec<usize>, Vec<usize>)>,
}

/// BFS two-colouring of every connected component, edges taken undirected.
pub fn is_bipartite(g: &InteractionGraph) -> Bipartition {
    let n = g.n();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            let c = colour[v].unwrap_or(false);
            for w in g.neighbours(v) {
                match colour[w] {
                    None => {
                        colour[w] = Some(!c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => {
                        return Bipartition {
                            bipartite: false,
                            partition: None,
                        }
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let (left, right): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| colour[v] == Some(false));
    Bipartition {
        bipartite: true,
        partition: Some((left, right)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_splits_into_opposite_corners() {
        let g = InteractionGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(
            is_bipartite(&g),
            Bipartition {
                bipartite: true,
                partition: Some((vec![0, 2], vec![1, 3]))
            }
        );
    }

    #[test]
    fn triangle_is_not_bipartite() {
        let g = InteractionGraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(!is_bipartite(&g).bipartite);
    }

    #[test]
    fn empty_graph_is_bipartite() {
        let b = is_bipartite(&InteractionGraph::from_edges(3, &[]));
        assert!(b.bipartite);
        assert_eq!(b.partition, Some((vec![0, 1, 2], vec![])));
    }

    #[test]
    fn one_way_edges_count() {
        let mut g = InteractionGraph::from_edges(3, &[]);
        g.adjacency[0][1] = 1;
        g.adjacency[1][2] = 1;
        g.adjacency[2][0] = 1;
        assert!(!is_bipartite(&g).bipartite);
    }
}
