//! Weighted directed stochastic block model.
//!
//! Nodes are split into `C` equal, contiguous communities. Every unordered
//! pair `{u, v}` with `u < v` receives an edge with probability
//! `α[c(u)][c(v)]`; the edge points `u → v` with probability
//! `β[c(u)][c(v)]` and `v → u` otherwise. Since communities are contiguous
//! `c(u) <= c(v)`, so `β[i][j]` with `i < j` is the probability of pointing
//! from the lower-index community to the higher one. Weights are uniform
//! integers in `[weight_lo, weight_hi]`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, Edge, NodeLabels};
use crate::rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsbmConfig {
    pub n: usize,
    pub clusters: usize,
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    pub weight_lo: u32,
    pub weight_hi: u32,
    pub seed: u64,
}

impl DsbmConfig {
    /// Constant intra/inter edge probabilities; `beta` is the probability of
    /// pointing from a lower-index community to a higher-index one.
    pub fn uniform(
        n: usize,
        clusters: usize,
        alpha_intra: f64,
        alpha_inter: f64,
        beta: f64,
        weight_lo: u32,
        weight_hi: u32,
        seed: u64,
    ) -> Self {
        let alpha = (0..clusters)
            .map(|i| {
                (0..clusters)
                    .map(|j| if i == j { alpha_intra } else { alpha_inter })
                    .collect()
            })
            .collect();
        let beta = (0..clusters)
            .map(|i| {
                (0..clusters)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Less => beta,
                        std::cmp::Ordering::Greater => 1.0 - beta,
                        std::cmp::Ordering::Equal => 0.5,
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            clusters,
            alpha,
            beta,
            weight_lo,
            weight_hi,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let c = self.clusters;
        if c == 0 || self.n == 0 || !self.n.is_multiple_of(c) {
            return bad(format!(
                "n = {} must be a positive multiple of C = {c}",
                self.n
            ));
        }
        if self.alpha.len() != c || self.alpha.iter().any(|r| r.len() != c) {
            return bad("alpha must be C x C".into());
        }
        if self.beta.len() != c || self.beta.iter().any(|r| r.len() != c) {
            return bad("beta must be C x C".into());
        }
        for i in 0..c {
            for j in 0..c {
                let (a, b) = (self.alpha[i][j], self.beta[i][j]);
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                    return bad(format!("probabilities at ({i}, {j}) must lie in [0, 1]"));
                }
                if a != self.alpha[j][i] {
                    return bad(format!("alpha is not symmetric at ({i}, {j})"));
                }
                if (b + self.beta[j][i] - 1.0).abs() > 1e-12 {
                    return bad(format!("beta[{i}][{j}] + beta[{j}][{i}] must equal 1"));
                }
            }
        }
        if !(2 <= self.weight_lo && self.weight_lo <= self.weight_hi) {
            return bad(format!(
                "weight range [{}, {}] must satisfy 2 <= lo <= hi",
                self.weight_lo, self.weight_hi
            ));
        }
        Ok(())
    }

    pub fn community_of(&self, node: usize) -> usize {
        node / (self.n / self.clusters)
    }
}

pub fn generate_dsbm(cfg: &DsbmConfig) -> Result<(DirectedGraph, NodeLabels)> {
    cfg.validate()?;
    let mut rng = rng::rng(cfg.seed);
    let community: Vec<usize> = (0..cfg.n).map(|u| cfg.community_of(u)).collect();
    let mut edges = Vec::new();
    for u in 0..cfg.n {
        let cu = community[u];
        for v in u + 1..cfg.n {
            let cv = community[v];
            if !rng.gen_bool(cfg.alpha[cu][cv]) {
                continue;
            }
            let forward = rng.gen_bool(cfg.beta[cu][cv]);
            let w = rng.gen_range(cfg.weight_lo..=cfg.weight_hi) as f64;
            edges.push(if forward {
                Edge::new(u, v, w)
            } else {
                Edge::new(v, u, w)
            });
        }
    }
    Ok((
        DirectedGraph::new(cfg.n, edges)?,
        NodeLabels::new(community),
    ))
}

/// How [`flip_signs`] picks the edges to negate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignFlipMode {
    /// A uniformly random subset of edges. The flipped signs carry no
    /// structure, so no model can predict them better than chance.
    Edge,
    /// Uniformly random target nodes whose incoming edges are all negated,
    /// until the requested fraction of edges is reached.
    TargetNode,
}

impl std::str::FromStr for SignFlipMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge" => Ok(Self::Edge),
            "target-node" => Ok(Self::TargetNode),
            other => Err(Error::InvalidConfig(format!(
                "unknown sign flip mode `{other}` (expected edge or target-node)"
            ))),
        }
    }
}

/// Negates the weights of roughly `frac · |E|` edges.
pub fn flip_signs(
    g: &DirectedGraph,
    frac: f64,
    mode: SignFlipMode,
    seed: u64,
) -> Result<DirectedGraph> {
    if !(0.0..=1.0).contains(&frac) {
        return Err(Error::InvalidConfig(format!(
            "sign flip fraction {frac} outside [0, 1]"
        )));
    }
    let m = g.num_edges();
    let target = (frac * m as f64).round() as usize;
    let mut rng = rng::rng(seed);
    let mut flip = vec![false; m];
    match mode {
        SignFlipMode::Edge => {
            let mut idx: Vec<usize> = (0..m).collect();
            idx.shuffle(&mut rng);
            for &i in &idx[..target] {
                flip[i] = true;
            }
        }
        SignFlipMode::TargetNode => {
            let mut in_degree = vec![0usize; g.n()];
            for e in g.edges() {
                in_degree[e.dst] += 1;
            }
            let mut nodes: Vec<usize> = (0..g.n()).collect();
            nodes.shuffle(&mut rng);
            let mut chosen = vec![false; g.n()];
            let mut count = 0;
            for v in nodes {
                if count + in_degree[v] <= target && in_degree[v] > 0 {
                    chosen[v] = true;
                    count += in_degree[v];
                }
                if count == target {
                    break;
                }
            }
            for (i, e) in g.edges().iter().enumerate() {
                flip[i] = chosen[e.dst];
            }
        }
    }
    g.with_edges(
        g.edges()
            .iter()
            .zip(&flip)
            .map(|(e, &f)| Edge::new(e.src, e.dst, if f { -e.weight } else { e.weight }))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_gives_no_edges() {
        let (g, labels) =
            generate_dsbm(&DsbmConfig::uniform(10, 2, 0.0, 0.0, 0.5, 2, 10, 1)).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert_eq!(labels.labels(), &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn full_alpha_samples_every_pair_once() {
        let (g, _) = generate_dsbm(&DsbmConfig::uniform(4, 2, 1.0, 1.0, 0.3, 2, 1000, 4)).unwrap();
        assert_eq!(g.num_edges(), 6);
        assert!(!g.has_digon());
    }

    #[test]
    fn weights_and_labels() {
        let cfg = DsbmConfig::uniform(60, 3, 0.4, 0.2, 0.2, 2, 9, 7);
        let (g, labels) = generate_dsbm(&cfg).unwrap();
        assert!(g
            .edges()
            .iter()
            .all(|e| e.weight.fract() == 0.0 && (2.0..=9.0).contains(&e.weight)));
        for c in 0..3 {
            assert_eq!(labels.labels().iter().filter(|&&l| l == c).count(), 20);
        }
        assert_eq!(generate_dsbm(&cfg).unwrap().0, g);
        let other = DsbmConfig { seed: 8, ..cfg };
        assert_ne!(generate_dsbm(&other).unwrap().0, g);
    }

    #[test]
    fn invalid_configs() {
        let ok = DsbmConfig::uniform(10, 2, 0.1, 0.1, 0.2, 2, 10, 0);
        assert!(ok.validate().is_ok());
        let cases = [
            DsbmConfig { n: 9, ..ok.clone() },
            DsbmConfig {
                weight_lo: 1,
                ..ok.clone()
            },
            DsbmConfig {
                weight_lo: 11,
                ..ok.clone()
            },
            DsbmConfig {
                beta: vec![vec![0.5, 0.2], vec![0.2, 0.5]],
                ..ok.clone()
            },
            DsbmConfig {
                alpha: vec![vec![0.1, 0.2], vec![0.3, 0.1]],
                ..ok.clone()
            },
        ];
        for cfg in cases {
            assert!(matches!(generate_dsbm(&cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn sign_flips() {
        let (g, _) = generate_dsbm(&DsbmConfig::uniform(100, 4, 0.2, 0.1, 0.2, 2, 50, 3)).unwrap();
        let m = g.num_edges();
        let flipped = flip_signs(&g, 0.15, SignFlipMode::Edge, 1).unwrap();
        let neg = flipped.edges().iter().filter(|e| e.weight < 0.0).count();
        assert_eq!(neg, (0.15 * m as f64).round() as usize);

        let flipped = flip_signs(&g, 0.15, SignFlipMode::TargetNode, 1).unwrap();
        let neg = flipped.edges().iter().filter(|e| e.weight < 0.0).count() as f64;
        assert!((neg / m as f64 - 0.15).abs() < 0.02);
        // Negativity is a property of the target node.
        for e in flipped.edges() {
            let all_same = flipped
                .edges()
                .iter()
                .filter(|f| f.dst == e.dst)
                .all(|f| f.weight.signum() == e.weight.signum());
            assert!(all_same);
        }
    }
}
