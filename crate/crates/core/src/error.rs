use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("duplicate edge ({src}, {dst})")]
    DuplicateEdge { src: String, dst: String },
    #[error("self-loop on node {0}")]
    SelfLoop(String),
    #[error("zero weight on edge ({src}, {dst})")]
    ZeroWeight { src: String, dst: String },
    #[error("node id {id} out of range for a graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver did not converge after {0} sweeps")]
    NonConvergence(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("non-positive degree {degree} at node {node}")]
    NonPositiveDegree { node: usize, degree: f64 },
    #[error("graph is not connected")]
    Disconnected,
    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sign task needs both positive and negative edges")]
    SingleSign,
    #[error("not enough non-edges to sample {requested} negatives (only {available})")]
    NotEnoughNonEdges { requested: usize, available: usize },
    #[error("class {class} has only {count} nodes, at least 5 are needed to stratify")]
    ClassTooSmall { class: usize, count: usize },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("AUC is undefined when a class is absent")]
    AucUndefined,
    #[error("non-finite loss in fold {fold} at epoch {epoch}")]
    NonFiniteLoss { fold: usize, epoch: usize },
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
    #[error("fold {fold} failed")]
    Fold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of numerical checks as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonConvergence(_)
            | Error::NotHermitian(_)
            | Error::NonFiniteLoss { .. }
            | Error::NonPositiveDegree { .. } => true,
            Error::Fold { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
