use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{DirectedGraph, Edge};
use crate::rng::{self, Rng};
use crate::{Error, Result};

/// Train/validation/test partition of a graph's edges.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train: Vec<Edge>,
    pub val: Vec<Edge>,
    pub test: Vec<Edge>,
    /// Indices (into the source edge list) of the spanning tree forced into
    /// `train`.
    pub tree: Vec<usize>,
}

fn undirected_neighbours(g: &DirectedGraph) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for (idx, e) in g.edges().iter().enumerate() {
        adj[e.src].push((e.dst, idx));
        adj[e.dst].push((e.src, idx));
    }
    adj
}

/// Number of connected components of the undirected support.
pub fn undirected_components(g: &DirectedGraph) -> usize {
    let adj = undirected_neighbours(g);
    let mut seen = vec![false; g.n()];
    let mut components = 0;
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    components
}

/// Randomized breadth-first spanning tree of the undirected support.
/// Returns edge indices; errors if the support is disconnected.
pub(crate) fn random_spanning_tree(g: &DirectedGraph, rng: &mut Rng) -> Result<Vec<usize>> {
    let mut adj = undirected_neighbours(g);
    let mut seen = vec![false; g.n()];
    let root = rng.gen_range(0..g.n());
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut tree = Vec::with_capacity(g.n().saturating_sub(1));
    while let Some(u) = queue.pop_front() {
        let mut nbrs = std::mem::take(&mut adj[u]);
        nbrs.shuffle(rng);
        for (v, idx) in nbrs {
            if !seen[v] {
                seen[v] = true;
                tree.push(idx);
                queue.push_back(v);
            }
        }
    }
    if tree.len() + 1 != g.n() {
        return Err(Error::Disconnected);
    }
    tree.sort_unstable();
    Ok(tree)
}

pub(crate) fn check_fractions(test_frac: f64, val_frac: f64) -> Result<()> {
    let ok = test_frac >= 0.0
        && val_frac >= 0.0
        && test_frac + val_frac > 0.0
        && test_frac + val_frac < 1.0;
    if !ok {
        return Err(Error::InvalidConfig(format!(
            "split fractions test={test_frac} val={val_frac} must be non-negative with 0 < sum < 1"
        )));
    }
    Ok(())
}

/// Splits edges so that the training part contains a spanning tree of the
/// undirected support. Non-tree edges are shuffled and dealt to test, then
/// validation; everything else trains.
pub fn spanning_tree_split(
    g: &DirectedGraph,
    test_frac: f64,
    val_frac: f64,
    seed: u64,
) -> Result<EdgeSplit> {
    check_fractions(test_frac, val_frac)?;
    let mut rng = rng::rng(seed);
    let tree = random_spanning_tree(g, &mut rng)?;
    let m = g.num_edges();
    let n_test = (test_frac * m as f64).round() as usize;
    let n_val = (val_frac * m as f64).round() as usize;

    let mut is_tree = vec![false; m];
    for &i in &tree {
        is_tree[i] = true;
    }
    let mut free: Vec<usize> = (0..m).filter(|&i| !is_tree[i]).collect();
    if n_test + n_val > free.len() {
        return Err(Error::InfeasibleSplit(format!(
            "{} held-out edges requested but only {} edges lie outside the spanning tree",
            n_test + n_val,
            free.len()
        )));
    }
    free.shuffle(&mut rng);
    let test: Vec<usize> = free[..n_test].to_vec();
    let val: Vec<usize> = free[n_test..n_test + n_val].to_vec();
    let mut train: Vec<usize> = tree
        .iter()
        .copied()
        .chain(free[n_test + n_val..].iter().copied())
        .collect();
    train.sort_unstable();

    let pick = |idx: &[usize]| idx.iter().map(|&i| g.edges()[i]).collect::<Vec<_>>();
    Ok(EdgeSplit {
        train: pick(&train),
        val: pick(&val),
        test: pick(&test),
        tree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn g(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::new(
            n,
            edges.iter().map(|&(s, d)| Edge::new(s, d, 1.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn path_graph_has_no_free_edges() {
        let path = g(3, &[(0, 1), (1, 2)]);
        assert!(matches!(
            spanning_tree_split(&path, 0.33, 0.0, 1),
            Err(Error::InfeasibleSplit(_))
        ));
    }

    #[test]
    fn triangle_every_seed() {
        let tri = g(3, &[(0, 1), (1, 2), (2, 0)]);
        for seed in 0..64 {
            let s = spanning_tree_split(&tri, 1.0 / 3.0, 0.0, seed).unwrap();
            assert_eq!(s.test.len(), 1);
            assert_eq!(s.train.len(), 2);
            assert!(s.val.is_empty());
            let train = tri.with_edges(s.train.clone()).unwrap();
            assert_eq!(undirected_components(&train), 1);
        }
    }

    #[test]
    fn deterministic_and_rejects_bad_input() {
        let tri = g(4, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 0)]);
        assert_eq!(
            spanning_tree_split(&tri, 0.2, 0.2, 9).unwrap(),
            spanning_tree_split(&tri, 0.2, 0.2, 9).unwrap()
        );
        assert!(matches!(
            spanning_tree_split(&tri, 0.7, 0.4, 9),
            Err(Error::InvalidConfig(_))
        ));
        let split = g(4, &[(0, 1), (2, 3)]);
        assert!(matches!(
            spanning_tree_split(&split, 0.2, 0.0, 0),
            Err(Error::Disconnected)
        ));
    }

    proptest! {
        #[test]
        fn split_is_a_connected_partition(seed in any::<u64>(), extra in proptest::collection::vec((0usize..12, 0usize..12), 10..40)) {
            // A ring guarantees connectivity; random chords add free edges.
            let n = 12;
            let mut pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            let mut seen: HashSet<(usize, usize)> = pairs.iter().copied().collect();
            for (s, d) in extra {
                if s != d && seen.insert((s, d)) {
                    pairs.push((s, d));
                }
            }
            let graph = g(n, &pairs);
            let s = spanning_tree_split(&graph, 0.15, 0.05, seed).unwrap();
            let train = graph.with_edges(s.train.clone()).unwrap();
            prop_assert_eq!(undirected_components(&train), 1);
            let mut all: Vec<(usize, usize)> = s.train.iter().chain(&s.val).chain(&s.test).map(Edge::pair).collect();
            all.sort_unstable();
            let mut expected: Vec<(usize, usize)> = pairs.clone();
            expected.sort_unstable();
            prop_assert_eq!(all, expected);
        }
    }
}
