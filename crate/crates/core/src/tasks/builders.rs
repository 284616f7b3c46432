use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{Labeled, TaskKind, TaskSplit};
use crate::graph::{random_spanning_tree, spanning_tree_split, DirectedGraph, Edge, NodeLabels};
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

const SIGN_TEST_FRAC: f64 = 0.2;
const SIGN_VAL_FRAC: f64 = 0.05;
const LINK_TEST_FRAC: f64 = 0.15;
const LINK_VAL_FRAC: f64 = 0.05;
const NODE_TRAIN_FRAC: f64 = 0.6;
const NODE_VAL_FRAC: f64 = 0.2;
const MIN_CLASS_SIZE: usize = 5;

fn sign_label(e: &Edge) -> usize {
    usize::from(e.weight > 0.0)
}

fn sign_examples(g: &DirectedGraph, idx: &[usize]) -> Labeled {
    Labeled::pairs(
        idx.iter()
            .map(|&i| (g.edges()[i].pair(), sign_label(&g.edges()[i])))
            .collect(),
    )
}

/// Link sign prediction folds. A random spanning tree of the undirected
/// support always trains; the remaining edges are shuffled once and fold `f`
/// tests on the `f`-th consecutive block of `round(0.2·|E|)` of them
/// (wrapping around when `k` blocks do not fit). Validation takes the next
/// `round(0.05·|E|)` free edges, or fewer if not enough are left. Labels are
/// 1 for positive and 0 for negative edges.
pub fn make_sign_task(g: &DirectedGraph, folds: usize, seed: u64) -> Result<Vec<TaskSplit>> {
    if folds == 0 {
        return Err(Error::InvalidConfig("at least one fold is required".into()));
    }
    if !g.has_positive_and_negative() {
        return Err(Error::SingleSign);
    }
    let mut r = rng::rng(seed);
    let tree = random_spanning_tree(g, &mut r)?;
    let m = g.num_edges();
    let mut is_tree = vec![false; m];
    for &i in &tree {
        is_tree[i] = true;
    }
    let mut free: Vec<usize> = (0..m).filter(|&i| !is_tree[i]).collect();
    free.shuffle(&mut r);

    let n_test = (SIGN_TEST_FRAC * m as f64).round() as usize;
    if n_test == 0 || n_test > free.len() {
        return Err(Error::InfeasibleSplit(format!(
            "{n_test} test edges requested but {} edges lie outside the spanning tree",
            free.len()
        )));
    }
    let n_val = ((SIGN_VAL_FRAC * m as f64).round() as usize).min(free.len() - n_test);

    (0..folds)
        .map(|f| {
            let start = f * n_test;
            let at = |j: usize| free[(start + j) % free.len()];
            let test: Vec<usize> = (0..n_test).map(at).collect();
            let val: Vec<usize> = (n_test..n_test + n_val).map(at).collect();
            let mut held = vec![false; m];
            for &i in test.iter().chain(&val) {
                held[i] = true;
            }
            let train: Vec<usize> = (0..m).filter(|&i| !held[i]).collect();
            let graph = g.with_edges(train.iter().map(|&i| g.edges()[i]).collect())?;
            Ok(TaskSplit {
                kind: TaskKind::LinkSign,
                train: sign_examples(g, &train),
                val: sign_examples(g, &val),
                test: sign_examples(g, &test),
                graph,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Exist,
    Direction,
}

/// Ordered pairs `(u, v)`, `u != v`, with no edge in either orientation.
fn sample_non_edges(g: &DirectedGraph, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let n = g.n();
    let support: HashSet<(usize, usize)> = g.edges().iter().map(Edge::undirected).collect();
    let available = (n * n.saturating_sub(1)).saturating_sub(2 * support.len());
    if count > available {
        return Err(Error::NotEnoughNonEdges {
            requested: count,
            available,
        });
    }
    let mut r = rng::rng(seed);
    let is_edge = |u: usize, v: usize| support.contains(&(u.min(v), u.max(v)));
    if available < 2 * count {
        let mut all: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).map(move |v| (u, v)))
            .filter(|&(u, v)| u != v && !is_edge(u, v))
            .collect();
        let (chosen, _) = all.partial_shuffle(&mut r, count);
        return Ok(chosen.to_vec());
    }
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u = r.gen_range(0..n);
        let v = r.gen_range(0..n);
        if u != v && !is_edge(u, v) && seen.insert((u, v)) {
            out.push((u, v));
        }
    }
    Ok(out)
}

fn direction_examples(edges: &[Edge]) -> Labeled {
    Labeled::pairs(
        edges
            .iter()
            .flat_map(|e| [((e.src, e.dst), 1), ((e.dst, e.src), 0)])
            .collect(),
    )
}

fn exist_examples(edges: &[Edge], negatives: &[(usize, usize)]) -> Labeled {
    Labeled::pairs(
        edges
            .iter()
            .map(|e| (e.pair(), 1))
            .chain(negatives.iter().map(|&p| (p, 0)))
            .collect(),
    )
}

/// Link existence or direction folds. Each fold draws its own spanning-tree
/// split with 15% test and 5% validation edges; the training graph holds the
/// training edges only.
///
/// Existence pairs every edge with one sampled non-edge (no edge in either
/// orientation), redrawn per fold. Direction emits `(u, v)` labelled 1 and
/// `(v, u)` labelled 0 for every edge `u → v`.
pub fn make_link_task(
    g: &DirectedGraph,
    kind: LinkKind,
    folds: usize,
    seed: u64,
) -> Result<Vec<TaskSplit>> {
    if folds == 0 {
        return Err(Error::InvalidConfig("at least one fold is required".into()));
    }
    (0..folds)
        .map(|f| {
            let fold_seed = derive_seed(seed, f as u64);
            let split = spanning_tree_split(g, LINK_TEST_FRAC, LINK_VAL_FRAC, fold_seed)?;
            let graph = g.with_edges(split.train.clone())?;
            let (task, train, val, test) = match kind {
                LinkKind::Direction => (
                    TaskKind::LinkDirection,
                    direction_examples(&split.train),
                    direction_examples(&split.val),
                    direction_examples(&split.test),
                ),
                LinkKind::Exist => {
                    let (a, b) = (split.train.len(), split.val.len());
                    let neg = sample_non_edges(g, g.num_edges(), derive_seed(fold_seed, 1))?;
                    (
                        TaskKind::LinkExist,
                        exist_examples(&split.train, &neg[..a]),
                        exist_examples(&split.val, &neg[a..a + b]),
                        exist_examples(&split.test, &neg[a + b..]),
                    )
                }
            };
            Ok(TaskSplit {
                kind: task,
                train,
                val,
                test,
                graph,
            })
        })
        .collect()
}

/// Stratified node split: within each class, `round(0.6·n_c)` nodes train,
/// `round(0.2·n_c)` validate and the rest test. Every class needs at least
/// five nodes.
pub fn make_node_task(labels: &NodeLabels, g: &DirectedGraph, seed: u64) -> Result<TaskSplit> {
    let classes = labels.num_classes();
    let mut members = vec![Vec::new(); classes];
    for (node, &c) in labels.labels().iter().enumerate() {
        members[c].push(node);
    }
    for (class, m) in members.iter().enumerate() {
        if m.len() < MIN_CLASS_SIZE {
            return Err(Error::ClassTooSmall {
                class,
                count: m.len(),
            });
        }
    }
    let mut r = rng::rng(seed);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (class, mut m) in members.into_iter().enumerate() {
        m.shuffle(&mut r);
        let n_train = (NODE_TRAIN_FRAC * m.len() as f64).round() as usize;
        let n_val = (NODE_VAL_FRAC * m.len() as f64).round() as usize;
        train.extend(m[..n_train].iter().map(|&v| (v, class)));
        val.extend(m[n_train..n_train + n_val].iter().map(|&v| (v, class)));
        test.extend(m[n_train + n_val..].iter().map(|&v| (v, class)));
    }
    for part in [&mut train, &mut val, &mut test] {
        part.sort_unstable();
    }
    Ok(TaskSplit {
        kind: TaskKind::NodeClass,
        train: Labeled::nodes(train),
        val: Labeled::nodes(val),
        test: Labeled::nodes(test),
        graph: g.clone(),
    })
}
