use rand::{Rng as _, RngCore as _};
use serde::{Deserialize, Serialize};

use super::layers::{complex_relu, unwind, ConvLayerParams, Propagation};
use crate::linalg::{to_complex, Complex64, ComplexMatrix, RealMatrix};
use crate::rng;
use crate::{Error, Result};

/// How per-query representations are read out of the node embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    /// One row per node.
    Node,
    /// Source row followed by destination row.
    Edge,
}

impl Readout {
    pub fn concat_width(self) -> usize {
        match self {
            Readout::Node => 1,
            Readout::Edge => 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Queries<'a> {
    Nodes(&'a [usize]),
    Pairs(&'a [(usize, usize)]),
}

impl Queries<'_> {
    pub fn len(&self) -> usize {
        match self {
            Queries::Nodes(q) => q.len(),
            Queries::Pairs(q) => q.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn readout(&self) -> Readout {
        match self {
            Queries::Nodes(_) => Readout::Node,
            Queries::Pairs(_) => Readout::Edge,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |id: usize| Error::InvalidQuery(format!("node {id} outside 0..{n}"));
        match self {
            Queries::Nodes(q) => q
                .iter()
                .try_for_each(|&i| if i < n { Ok(()) } else { Err(bad(i)) }),
            Queries::Pairs(q) => q.iter().try_for_each(|&(a, b)| {
                for i in [a, b] {
                    if i >= n {
                        return Err(bad(i));
                    }
                }
                Ok(())
            }),
        }
    }

    /// Node rows feeding query `k`, in concatenation order.
    fn rows(&self, k: usize) -> impl Iterator<Item = usize> {
        let (a, b) = match self {
            Queries::Nodes(q) => (q[k], None),
            Queries::Pairs(q) => (q[k].0, Some(q[k].1)),
        };
        std::iter::once(a).chain(b)
    }
}

/// Forward-pass mode. Training mode draws an inverted-dropout mask from
/// `seed`, so a fixed seed reproduces the same mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eval,
    Train { seed: u64 },
}

/// Learnable parameters. Also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layer1: ConvLayerParams,
    pub layer2: ConvLayerParams,
    /// (2·f2·concat_width) × classes.
    pub head: RealMatrix,
    pub readout: Readout,
}

impl ModelParams {
    /// Glorot-uniform initialization; real and imaginary parts drawn
    /// independently with fan counts from the matrix shape.
    pub fn init(
        in_channels: usize,
        f1: usize,
        f2: usize,
        classes: usize,
        readout: Readout,
        seed: u64,
    ) -> Self {
        let mut r = rng::stream(seed, 0);
        let mut glorot_complex = |rows: usize, cols: usize| {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            ComplexMatrix::from_fn(rows, cols, |_, _| {
                Complex64::new(r.gen_range(-limit..=limit), r.gen_range(-limit..=limit))
            })
        };
        let layer1 = ConvLayerParams {
            theta: glorot_complex(in_channels, f1),
        };
        let layer2 = ConvLayerParams {
            theta: glorot_complex(f1, f2),
        };
        let width = 2 * f2 * readout.concat_width();
        let limit = (6.0 / (width + classes) as f64).sqrt();
        let mut r = rng::stream(seed, 1);
        let head = RealMatrix::from_fn(width, classes, |_, _| r.gen_range(-limit..=limit));
        Self {
            layer1,
            layer2,
            head,
            readout,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layer1: ConvLayerParams {
                theta: ComplexMatrix::zeros(self.layer1.theta.nrows(), self.layer1.theta.ncols()),
            },
            layer2: ConvLayerParams {
                theta: ComplexMatrix::zeros(self.layer2.theta.nrows(), self.layer2.theta.ncols()),
            },
            head: RealMatrix::zeros(self.head.nrows(), self.head.ncols()),
            readout: self.readout,
        }
    }

    pub fn in_channels(&self) -> usize {
        self.layer1.theta.nrows()
    }

    pub fn classes(&self) -> usize {
        self.head.ncols()
    }

    pub fn num_scalars(&self) -> usize {
        2 * self.layer1.theta.len() + 2 * self.layer2.theta.len() + self.head.len()
    }

    /// Real scalars in a fixed order: Re/Im of Θ1, Re/Im of Θ2, then W.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_scalars());
        for theta in [&self.layer1.theta, &self.layer2.theta] {
            out.extend(theta.iter().map(|z| z.re));
            out.extend(theta.iter().map(|z| z.im));
        }
        out.extend(self.head.iter());
        out
    }

    pub fn assign(&mut self, flat: &[f64]) {
        assert_eq!(
            flat.len(),
            self.num_scalars(),
            "flat parameter length mismatch"
        );
        let mut offset = 0;
        for theta in [&mut self.layer1.theta, &mut self.layer2.theta] {
            let len = theta.len();
            for (k, z) in theta.iter_mut().enumerate() {
                *z = Complex64::new(flat[offset + k], flat[offset + len + k]);
            }
            offset += 2 * len;
        }
        for (k, w) in self.head.iter_mut().enumerate() {
            *w = flat[offset + k];
        }
    }

    pub fn is_finite(&self) -> bool {
        self.flatten().iter().all(|x| x.is_finite())
    }
}

/// Parameters plus the fixed propagation matrix they act through.
#[derive(Debug, Clone)]
pub struct SigMaNetModel {
    pub params: ModelParams,
    pub propagation: Propagation,
    pub dropout: f64,
}

impl SigMaNetModel {
    pub fn new(params: ModelParams, propagation: Propagation, dropout: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&dropout) {
            return Err(Error::InvalidConfig(format!(
                "dropout {dropout} outside [0, 1)"
            )));
        }
        let (c1, f1) = params.layer1.theta.shape();
        let (f1b, f2) = params.layer2.theta.shape();
        let width = 2 * f2 * params.readout.concat_width();
        if f1 != f1b || params.head.nrows() != width || c1 == 0 || params.head.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "layers {c1}x{f1}, {f1b}x{f2} and head {}x{} do not chain",
                params.head.nrows(),
                params.head.ncols()
            )));
        }
        Ok(Self {
            params,
            propagation,
            dropout,
        })
    }
}

struct ForwardCache {
    px: ComplexMatrix,
    s1: ComplexMatrix,
    pz1: ComplexMatrix,
    s2: ComplexMatrix,
    /// Unwound second-layer output, n × 2·f2.
    u: RealMatrix,
    dropout: Option<Dropout>,
    probs: RealMatrix,
    log_probs: RealMatrix,
}

/// Inverted-dropout mask over the per-query representation, row-major.
struct Dropout {
    keep: Vec<bool>,
    width: usize,
    scale: f64,
}

impl Dropout {
    /// Each entry is kept when a 32-bit uniform draw falls below
    /// `(1 - p)·2^32`; one 64-bit draw serves two entries.
    fn draw(rows: usize, width: usize, p: f64, seed: u64) -> Self {
        let threshold = ((1.0 - p) * 4_294_967_296.0) as u64;
        let total = rows * width;
        let mut r = rng::rng(seed);
        let mut keep = Vec::with_capacity(total + 1);
        while keep.len() < total {
            let x = r.next_u64();
            keep.push((x & 0xffff_ffff) < threshold);
            keep.push((x >> 32) < threshold);
        }
        keep.truncate(total);
        Self {
            keep,
            width,
            scale: 1.0 / (1.0 - p),
        }
    }
}

/// Writes the multipliers of query `k`'s representation into `out`.
fn mask_row(dropout: &Option<Dropout>, k: usize, out: &mut [f64]) {
    match dropout {
        Some(d) => {
            let keep = &d.keep[k * d.width..(k + 1) * d.width];
            for (o, &kept) in out.iter_mut().zip(keep) {
                *o = if kept { d.scale } else { 0.0 };
            }
        }
        None => out.fill(1.0),
    }
}

/// Masked representation of query `k`: endpoint rows of `u` side by side.
fn fill_rep(
    queries: &Queries<'_>,
    k: usize,
    u_rows: &[f64],
    block: usize,
    factors: &[f64],
    rep: &mut [f64],
) {
    for (slot, node) in queries.rows(k).enumerate() {
        let range = slot * block..(slot + 1) * block;
        let urow = &u_rows[node * block..(node + 1) * block];
        for ((r, &x), &f) in rep[range.clone()].iter_mut().zip(urow).zip(&factors[range]) {
            *r = x * f;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Row-wise log-softmax.
fn log_softmax_rows(logits: &RealMatrix) -> RealMatrix {
    let mut out = logits.clone();
    for mut row in out.row_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        row.iter_mut().for_each(|x| *x = *x - max - log_sum);
    }
    out
}

fn forward(
    m: &SigMaNetModel,
    x0: &RealMatrix,
    queries: Queries<'_>,
    mode: Mode,
) -> Result<ForwardCache> {
    let p = &m.propagation;
    let params = &m.params;
    if x0.nrows() != p.n() || x0.ncols() != params.in_channels() {
        return Err(Error::DimensionMismatch(format!(
            "features are {}x{}, model expects {}x{}",
            x0.nrows(),
            x0.ncols(),
            p.n(),
            params.in_channels()
        )));
    }
    if queries.readout() != params.readout {
        return Err(Error::InvalidQuery(format!(
            "{:?} queries given to a model with {:?} readout",
            queries.readout(),
            params.readout
        )));
    }
    queries.validate(p.n())?;

    let px = p.apply(&to_complex(x0));
    let s1 = &px * &params.layer1.theta;
    let z1 = complex_relu(&s1);
    let pz1 = p.apply(&z1);
    let s2 = &pz1 * &params.layer2.theta;
    let u = unwind(&complex_relu(&s2));

    // The per-query representation (endpoint rows side by side, then
    // dropout) is never materialized; logits are accumulated directly.
    let block = u.ncols();
    let width = block * params.readout.concat_width();
    let classes = params.head.ncols();
    let dropout = match mode {
        Mode::Train { seed } if m.dropout > 0.0 => {
            Some(Dropout::draw(queries.len(), width, m.dropout, seed))
        }
        _ => None,
    };
    let u_rows = u.transpose();
    let u_rows = u_rows.as_slice();
    let head = params.head.as_slice();
    let mut logits = RealMatrix::zeros(queries.len(), classes);
    let mut factors = vec![0.0; width];
    let mut rep = vec![0.0; width];
    for k in 0..queries.len() {
        mask_row(&dropout, k, &mut factors);
        fill_rep(&queries, k, u_rows, block, &factors, &mut rep);
        for c in 0..classes {
            logits[(k, c)] = dot(&rep, &head[c * width..(c + 1) * width]);
        }
    }
    let log_probs = log_softmax_rows(&logits);
    let probs = log_probs.map(f64::exp);
    Ok(ForwardCache {
        px,
        s1,
        pz1,
        s2,
        u,
        dropout,
        probs,
        log_probs,
    })
}

/// Class probabilities, one row per query.
pub fn model_forward(
    m: &SigMaNetModel,
    x0: &RealMatrix,
    queries: Queries<'_>,
    mode: Mode,
) -> Result<RealMatrix> {
    Ok(forward(m, x0, queries, mode)?.probs)
}

fn mean_nll(log_probs: &RealMatrix, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let total: f64 = labels
        .iter()
        .enumerate()
        .map(|(k, &y)| -log_probs[(k, y)])
        .sum();
    total / labels.len() as f64
}

fn check_labels(labels: &[usize], queries: usize, classes: usize) -> Result<()> {
    if labels.len() != queries {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {queries} queries",
            labels.len()
        )));
    }
    if let Some(&label) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    Ok(())
}

/// Mean cross-entropy only, without gradients.
pub fn loss(
    m: &SigMaNetModel,
    x0: &RealMatrix,
    queries: Queries<'_>,
    labels: &[usize],
    mode: Mode,
) -> Result<f64> {
    check_labels(labels, queries.len(), m.params.classes())?;
    Ok(mean_nll(&forward(m, x0, queries, mode)?.log_probs, labels))
}

fn gate(grad: &mut ComplexMatrix, pre_activation: &ComplexMatrix) {
    for (g, s) in grad.iter_mut().zip(pre_activation.iter()) {
        if s.re < 0.0 {
            *g = Complex64::new(0.0, 0.0);
        }
    }
}

/// Mean cross-entropy and its exact gradient.
///
/// Complex gradients are reported as `∂L/∂Re + i·∂L/∂Im`; for a complex
/// product `Y = A B` this gives `∇A = ∇Y B*` and `∇B = A* ∇Y`.
pub fn loss_and_gradients(
    m: &SigMaNetModel,
    x0: &RealMatrix,
    queries: Queries<'_>,
    labels: &[usize],
    mode: Mode,
) -> Result<(f64, ModelParams)> {
    check_labels(labels, queries.len(), m.params.classes())?;
    let cache = forward(m, x0, queries, mode)?;
    let params = &m.params;
    let count = labels.len().max(1) as f64;
    let loss = mean_nll(&cache.log_probs, labels);

    let mut d_logits = cache.probs.clone();
    for (k, &y) in labels.iter().enumerate() {
        d_logits[(k, y)] -= 1.0;
    }
    d_logits /= count;

    let f2 = params.layer2.theta.ncols();
    let block = 2 * f2;
    let width = block * params.readout.concat_width();
    let classes = params.head.ncols();
    let n = m.propagation.n();
    let u_rows = cache.u.transpose();
    let u_rows = u_rows.as_slice();
    let head = params.head.as_slice();
    let mut g_head = RealMatrix::zeros(width, classes);
    let mut d_u_rows = vec![0.0; n * block];
    let mut factors = vec![0.0; width];
    let mut rep = vec![0.0; width];
    let mut d_rep = vec![0.0; width];
    for k in 0..queries.len() {
        mask_row(&cache.dropout, k, &mut factors);
        fill_rep(&queries, k, u_rows, block, &factors, &mut rep);
        d_rep.fill(0.0);
        for c in 0..classes {
            let d = d_logits[(k, c)];
            axpy(
                d,
                &rep,
                &mut g_head.as_mut_slice()[c * width..(c + 1) * width],
            );
            axpy(d, &head[c * width..(c + 1) * width], &mut d_rep);
        }
        for (slot, node) in queries.rows(k).enumerate() {
            let range = slot * block..(slot + 1) * block;
            let target = &mut d_u_rows[node * block..(node + 1) * block];
            for ((t, &f), &g) in target
                .iter_mut()
                .zip(&factors[range.clone()])
                .zip(&d_rep[range])
            {
                *t += f * g;
            }
        }
    }
    let d_u = RealMatrix::from_row_slice(n, block, &d_u_rows);

    let mut g_s2 =
        ComplexMatrix::from_fn(n, f2, |i, j| Complex64::new(d_u[(i, j)], d_u[(i, j + f2)]));
    gate(&mut g_s2, &cache.s2);
    let g_theta2 = cache.pz1.adjoint() * &g_s2;
    let g_pz1 = &g_s2 * params.layer2.theta.adjoint();
    let mut g_s1 = m.propagation.apply_adjoint(&g_pz1);
    gate(&mut g_s1, &cache.s1);
    let g_theta1 = cache.px.adjoint() * &g_s1;

    Ok((
        loss,
        ModelParams {
            layer1: ConvLayerParams { theta: g_theta1 },
            layer2: ConvLayerParams { theta: g_theta2 },
            head: g_head,
            readout: params.readout,
        },
    ))
}
