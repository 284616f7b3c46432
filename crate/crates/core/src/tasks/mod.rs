//! Task families of the experimental protocol: node classification, link
//! existence, link direction and link sign prediction. Each family is a
//! [`Task`] strategy registered by name in [`TaskRegistry`].

mod builders;
mod experiment;
mod metrics;

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeLabels};
use crate::nn::{Queries, Readout};
use crate::{Error, Result};

pub use builders::{make_link_task, make_node_task, make_sign_task, LinkKind};
pub use experiment::{
    load_dataset, prepare_splits, run_experiment, scale_features, train_fold, EpochLoss,
    ExperimentResult, FoldResult, PreparedTask, TrainSettings,
};
pub use metrics::{auc, evaluate, FoldMetrics, Metric, MetricsReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    NodeClass,
    LinkExist,
    LinkDirection,
    LinkSign,
}

impl TaskKind {
    pub fn name(self) -> &'static str {
        match self {
            TaskKind::NodeClass => "node",
            TaskKind::LinkExist => "link-exist",
            TaskKind::LinkDirection => "link-direction",
            TaskKind::LinkSign => "link-sign",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuerySet {
    Nodes(Vec<usize>),
    Pairs(Vec<(usize, usize)>),
}

impl QuerySet {
    pub fn as_queries(&self) -> Queries<'_> {
        match self {
            QuerySet::Nodes(v) => Queries::Nodes(v),
            QuerySet::Pairs(v) => Queries::Pairs(v),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            QuerySet::Nodes(v) => v.len(),
            QuerySet::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Queries with their class labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeled {
    pub queries: QuerySet,
    pub labels: Vec<usize>,
}

impl Labeled {
    pub fn pairs(items: Vec<((usize, usize), usize)>) -> Self {
        let (queries, labels) = items.into_iter().unzip();
        Self {
            queries: QuerySet::Pairs(queries),
            labels,
        }
    }

    pub fn nodes(items: Vec<(usize, usize)>) -> Self {
        let (queries, labels) = items.into_iter().unzip();
        Self {
            queries: QuerySet::Nodes(queries),
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// One fold: labelled train/validation/test queries plus the graph whose
/// edges the propagation matrix may see.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSplit {
    pub kind: TaskKind,
    pub train: Labeled,
    pub val: Labeled,
    pub test: Labeled,
    pub graph: DirectedGraph,
}

pub trait Task: Send + Sync {
    fn kind(&self) -> TaskKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    fn readout(&self) -> Readout;

    fn num_classes(&self, labels: Option<&NodeLabels>) -> usize;

    fn default_folds(&self) -> usize;

    /// Whether digons are collapsed into net flows before splitting.
    fn uses_flow_preprocess(&self) -> bool;

    /// Whether degree features use absolute weights.
    fn uses_abs_features(&self) -> bool;

    fn splits(
        &self,
        g: &DirectedGraph,
        labels: Option<&NodeLabels>,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<TaskSplit>>;
}

pub struct NodeClassification;
pub struct LinkExistence;
pub struct LinkDirection;
pub struct LinkSign;

impl Task for NodeClassification {
    fn kind(&self) -> TaskKind {
        TaskKind::NodeClass
    }
    fn readout(&self) -> Readout {
        Readout::Node
    }
    fn num_classes(&self, labels: Option<&NodeLabels>) -> usize {
        labels.map_or(0, NodeLabels::num_classes)
    }
    fn default_folds(&self) -> usize {
        10
    }
    fn uses_flow_preprocess(&self) -> bool {
        true
    }
    fn uses_abs_features(&self) -> bool {
        false
    }
    fn splits(
        &self,
        g: &DirectedGraph,
        labels: Option<&NodeLabels>,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<TaskSplit>> {
        let labels = labels
            .ok_or_else(|| Error::InvalidConfig("node classification needs node labels".into()))?;
        if labels.len() != g.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} nodes",
                labels.len(),
                g.n()
            )));
        }
        (0..folds)
            .map(|f| make_node_task(labels, g, crate::rng::derive_seed(seed, f as u64)))
            .collect()
    }
}

impl Task for LinkExistence {
    fn kind(&self) -> TaskKind {
        TaskKind::LinkExist
    }
    fn readout(&self) -> Readout {
        Readout::Edge
    }
    fn num_classes(&self, _: Option<&NodeLabels>) -> usize {
        2
    }
    fn default_folds(&self) -> usize {
        10
    }
    fn uses_flow_preprocess(&self) -> bool {
        true
    }
    fn uses_abs_features(&self) -> bool {
        false
    }
    fn splits(
        &self,
        g: &DirectedGraph,
        _: Option<&NodeLabels>,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<TaskSplit>> {
        make_link_task(g, LinkKind::Exist, folds, seed)
    }
}

impl Task for LinkDirection {
    fn kind(&self) -> TaskKind {
        TaskKind::LinkDirection
    }
    fn readout(&self) -> Readout {
        Readout::Edge
    }
    fn num_classes(&self, _: Option<&NodeLabels>) -> usize {
        2
    }
    fn default_folds(&self) -> usize {
        10
    }
    fn uses_flow_preprocess(&self) -> bool {
        true
    }
    fn uses_abs_features(&self) -> bool {
        false
    }
    fn splits(
        &self,
        g: &DirectedGraph,
        _: Option<&NodeLabels>,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<TaskSplit>> {
        make_link_task(g, LinkKind::Direction, folds, seed)
    }
}

impl Task for LinkSign {
    fn kind(&self) -> TaskKind {
        TaskKind::LinkSign
    }
    fn readout(&self) -> Readout {
        Readout::Edge
    }
    fn num_classes(&self, _: Option<&NodeLabels>) -> usize {
        2
    }
    fn default_folds(&self) -> usize {
        5
    }
    fn uses_flow_preprocess(&self) -> bool {
        false
    }
    fn uses_abs_features(&self) -> bool {
        true
    }
    fn splits(
        &self,
        g: &DirectedGraph,
        _: Option<&NodeLabels>,
        folds: usize,
        seed: u64,
    ) -> Result<Vec<TaskSplit>> {
        make_sign_task(g, folds, seed)
    }
}

type TaskFactory = fn() -> Box<dyn Task>;

/// Name → task strategy.
pub struct TaskRegistry {
    entries: Vec<(&'static str, TaskFactory)>,
}

impl TaskRegistry {
    pub fn builtin() -> Self {
        let mut r = Self {
            entries: Vec::new(),
        };
        r.register("node", || Box::new(NodeClassification));
        r.register("link-exist", || Box::new(LinkExistence));
        r.register("link-direction", || Box::new(LinkDirection));
        r.register("link-sign", || Box::new(LinkSign));
        r
    }

    pub fn register(&mut self, name: &'static str, factory: TaskFactory) {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, factory));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, name: &str) -> Result<Box<dyn Task>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "task",
                name: name.to_owned(),
                available: self.names().join(", "),
            })
    }
}

impl Default for TaskRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_resolves_builtin_tasks() {
        let r = TaskRegistry::builtin();
        for name in r.names() {
            let task = r.create(name).unwrap();
            assert_eq!(task.name(), name);
        }
        assert!(!r.create("link-sign").unwrap().uses_flow_preprocess());
        assert!(r.create("link-sign").unwrap().uses_abs_features());
        assert_eq!(r.create("link-sign").unwrap().default_folds(), 5);
        assert!(matches!(
            r.create("graph-class"),
            Err(Error::UnknownStrategy { .. })
        ));
    }
}
