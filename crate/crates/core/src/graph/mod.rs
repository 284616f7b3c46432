//! Directed weighted graphs and the dense matrices derived from them.

mod io;
mod split;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::linalg::{ensure_square, RealMatrix};
use crate::{Error, Result};

pub use io::{
    load_edge_list, load_labels, write_edge_list, write_id_map, write_labels, EdgeListOptions,
    IdMap, LoadedGraph,
};
pub(crate) use split::random_spanning_tree;
pub use split::{spanning_tree_split, undirected_components, EdgeSplit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(src: usize, dst: usize, weight: f64) -> Self {
        Self { src, dst, weight }
    }

    pub fn pair(&self) -> (usize, usize) {
        (self.src, self.dst)
    }

    /// Endpoints as an unordered pair, smaller id first.
    pub fn undirected(&self) -> (usize, usize) {
        (self.src.min(self.dst), self.src.max(self.dst))
    }
}

/// A simple directed graph: no self-loops, at most one edge per ordered
/// pair, no zero weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl DirectedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("graph needs at least one node".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            for id in [e.src, e.dst] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if e.src == e.dst {
                return Err(Error::SelfLoop(e.src.to_string()));
            }
            if e.weight == 0.0 {
                return Err(Error::ZeroWeight {
                    src: e.src.to_string(),
                    dst: e.dst.to_string(),
                });
            }
            if !e.weight.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite weight on ({}, {})",
                    e.src, e.dst
                )));
            }
            if !seen.insert(e.pair()) {
                return Err(Error::DuplicateEdge {
                    src: e.src.to_string(),
                    dst: e.dst.to_string(),
                });
            }
        }
        Ok(Self { n, edges })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_set(&self) -> HashSet<(usize, usize)> {
        self.edges.iter().map(Edge::pair).collect()
    }

    pub fn has_digon(&self) -> bool {
        let set = self.edge_set();
        self.edges.iter().any(|e| set.contains(&(e.dst, e.src)))
    }

    /// Same node set, subset of edges.
    pub fn with_edges(&self, edges: Vec<Edge>) -> Result<Self> {
        Self::new(self.n, edges)
    }

    /// Every weight multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        self.with_edges(
            self.edges
                .iter()
                .map(|e| Edge::new(e.src, e.dst, e.weight * alpha))
                .collect(),
        )
    }

    pub fn has_positive_and_negative(&self) -> bool {
        self.edges.iter().any(|e| e.weight > 0.0) && self.edges.iter().any(|e| e.weight < 0.0)
    }
}

/// Per-node class indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeLabels {
    labels: Vec<usize>,
    classes: usize,
}

impl NodeLabels {
    pub fn new(labels: Vec<usize>) -> Self {
        let classes = labels.iter().max().map_or(0, |m| m + 1);
        Self { labels, classes }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }
}

pub fn adjacency(g: &DirectedGraph) -> RealMatrix {
    let mut a = RealMatrix::zeros(g.n(), g.n());
    for e in g.edges() {
        a[(e.src, e.dst)] = e.weight;
    }
    a
}

/// (A + Aᵀ) / 2, computed so that the result is exactly symmetric.
pub fn symmetrize(a: &RealMatrix) -> Result<RealMatrix> {
    let n = ensure_square(a)?;
    let mut s = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok(s)
}

/// Diagonal matrix of absolute row sums of a symmetric matrix.
pub fn abs_degree(a_s: &RealMatrix) -> Result<RealMatrix> {
    let degrees = abs_degree_vector(a_s)?;
    Ok(RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(
        degrees,
    )))
}

pub fn abs_degree_vector(a_s: &RealMatrix) -> Result<Vec<f64>> {
    let n = ensure_square(a_s)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((a_s[(i, j)] - a_s[(j, i)]).abs());
        }
    }
    if worst > 0.0 {
        return Err(Error::NotSymmetric(worst));
    }
    Ok((0..n)
        .map(|i| a_s.row(i).iter().map(|x| x.abs()).sum())
        .collect())
}

/// Collapses every digon into one edge carrying the net flow. The surviving
/// edge points along the positive net weight; digons with zero net flow
/// vanish. Edges without an antiparallel partner are kept as they are.
pub fn flow_preprocess(g: &DirectedGraph) -> DirectedGraph {
    let weights: BTreeMap<(usize, usize), f64> =
        g.edges().iter().map(|e| (e.pair(), e.weight)).collect();
    let mut out = Vec::with_capacity(g.num_edges());
    for e in g.edges() {
        match weights.get(&(e.dst, e.src)) {
            None => out.push(*e),
            Some(&back) => {
                // Handle each digon once, from its smaller-source edge.
                if e.src > e.dst {
                    continue;
                }
                let net = e.weight - back;
                if net > 0.0 {
                    out.push(Edge::new(e.src, e.dst, net));
                } else if net < 0.0 {
                    out.push(Edge::new(e.dst, e.src, -net));
                }
            }
        }
    }
    DirectedGraph {
        n: g.n(),
        edges: out,
    }
}

/// Weighted (in-degree, out-degree) per node, optionally on |w|.
pub fn degree_features(g: &DirectedGraph, use_abs: bool) -> RealMatrix {
    let mut x = RealMatrix::zeros(g.n(), 2);
    for e in g.edges() {
        let w = if use_abs { e.weight.abs() } else { e.weight };
        x[(e.dst, 0)] += w;
        x[(e.src, 1)] += w;
    }
    x
}
