use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate, FoldMetrics, MetricsReport, Task, TaskKind, TaskRegistry, TaskSplit};
use crate::config::{FeatureScaling, FlowPolicy, RunConfig};
use crate::dsbm::{flip_signs, generate_dsbm};
use crate::graph::{
    adjacency, degree_features, flow_preprocess, load_edge_list, load_labels, DirectedGraph,
    EdgeListOptions, NodeLabels,
};
use crate::laplacian::{OperatorParams, OperatorRegistry};
use crate::linalg::RealMatrix;
use crate::nn::{
    loss, loss_and_gradients, model_forward, AdamConfig, Mode, ModelParams, Propagation,
    SigMaNetModel, TrainState,
};
use crate::rng::{self, derive_seed};
use crate::{Error, Result};

// seed streams under the run seed
const SPLIT_STREAM: u64 = 1;
const INIT_STREAM: u64 = 2;
const DROPOUT_STREAM: u64 = 3;
const SHUFFLE_STREAM: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSettings {
    pub max_epochs: usize,
    pub patience: usize,
    pub filters1: usize,
    pub filters2: usize,
    pub dropout: f64,
    pub adam: AdamConfig,
}

impl TrainSettings {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            max_epochs: cfg.max_epochs,
            patience: cfg.patience,
            filters1: cfg.filters1,
            filters2: cfg.filters2,
            dropout: cfg.dropout,
            adam: cfg.adam(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub metrics: FoldMetrics,
    /// Epoch (0-based) whose parameters were kept.
    pub best_epoch: usize,
    pub curve: Vec<EpochLoss>,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub task: TaskKind,
    pub folds: Vec<FoldResult>,
    pub report: MetricsReport,
}

impl ExperimentResult {
    /// `fold,epoch,train_loss,val_loss` rows.
    pub fn loss_curve_csv(&self) -> String {
        let mut out = String::from("fold,epoch,train_loss,val_loss\n");
        for f in &self.folds {
            for e in &f.curve {
                out.push_str(&format!(
                    "{},{},{:?},{:?}\n",
                    f.fold, e.epoch, e.train_loss, e.val_loss
                ));
            }
        }
        out
    }
}

/// Trains one model with Adam and early stopping on the validation
/// cross-entropy (the training loss stands in when there is no validation
/// set), then scores the best checkpoint on the test queries.
pub fn train_fold(
    split: &TaskSplit,
    features: &RealMatrix,
    propagation: Propagation,
    classes: usize,
    settings: &TrainSettings,
    fold: usize,
    seed: u64,
) -> Result<FoldResult> {
    let readout = split.train.queries.as_queries().readout();
    let params = ModelParams::init(
        features.ncols(),
        settings.filters1,
        settings.filters2,
        classes,
        readout,
        derive_seed(seed, INIT_STREAM),
    );
    let mut model = SigMaNetModel::new(params, propagation, settings.dropout)?;
    let mut state = TrainState::for_params(settings.adam, &model.params);
    let train_q = split.train.queries.as_queries();
    let monitor = if split.val.is_empty() {
        &split.train
    } else {
        &split.val
    };
    let dropout_base = derive_seed(seed, DROPOUT_STREAM);

    let mut best = (f64::INFINITY, 0usize, model.params.clone());
    let mut curve = Vec::new();
    for epoch in 0..settings.max_epochs {
        let mode = Mode::Train {
            seed: derive_seed(dropout_base, epoch as u64),
        };
        let (train_loss, grads) =
            loss_and_gradients(&model, features, train_q, &split.train.labels, mode)?;
        if !train_loss.is_finite() || !grads.is_finite() {
            return Err(Error::NonFiniteLoss { fold, epoch });
        }
        state.step(&mut model.params, &grads);
        let val_loss = loss(
            &model,
            features,
            monitor.queries.as_queries(),
            &monitor.labels,
            Mode::Eval,
        )?;
        if !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss { fold, epoch });
        }
        curve.push(EpochLoss {
            epoch,
            train_loss,
            val_loss,
        });
        if val_loss < best.0 {
            best = (val_loss, epoch, model.params.clone());
        } else if epoch - best.1 >= settings.patience {
            break;
        }
    }
    let (_, best_epoch, best_params) = best;
    model.params = best_params;
    let probs = model_forward(
        &model,
        features,
        split.test.queries.as_queries(),
        Mode::Eval,
    )?;
    let metrics = evaluate(&probs, &split.test.labels)?;
    Ok(FoldResult {
        fold,
        metrics,
        best_epoch,
        curve,
        params: model.params,
    })
}

/// Rescales feature columns in place; all-zero columns are left alone.
pub fn scale_features(x: &mut RealMatrix, scaling: FeatureScaling) {
    let n = x.nrows().max(1) as f64;
    for mut col in x.column_iter_mut() {
        let mean = match scaling {
            FeatureScaling::None => return,
            FeatureScaling::Scale => 0.0,
            FeatureScaling::Standardize => col.sum() / n,
        };
        let spread = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        let spread = if spread > 0.0 { spread } else { 1.0 };
        col.apply(|v| *v = (*v - mean) / spread);
    }
}

/// Graph (and labels, when available) the run operates on.
pub fn load_dataset(cfg: &RunConfig) -> Result<(DirectedGraph, Option<NodeLabels>)> {
    let (g, labels) = match &cfg.edges {
        Some(path) => {
            let opts = EdgeListOptions {
                n_hint: None,
                merge_parallel: cfg.merge_parallel,
            };
            let loaded = load_edge_list(path, &opts)?;
            let labels = cfg
                .labels
                .as_deref()
                .map(|p| load_labels(p, &loaded.ids))
                .transpose()?;
            (loaded.graph, labels)
        }
        None => {
            let (g, labels) = generate_dsbm(&cfg.dsbm())?;
            (g, Some(labels))
        }
    };
    let g = if cfg.sign_flip_frac > 0.0 {
        flip_signs(
            &g,
            cfg.sign_flip_frac,
            cfg.sign_flip_mode,
            cfg.sign_flip_seed,
        )?
    } else {
        g
    };
    Ok((g, labels))
}

fn run_fold(
    cfg: &RunConfig,
    task: &dyn Task,
    operators: &OperatorRegistry,
    split: &TaskSplit,
    classes: usize,
    fold: usize,
) -> Result<FoldResult> {
    let mut x = degree_features(&split.graph, task.uses_abs_features());
    scale_features(&mut x, cfg.feature_scaling);
    let op = operators.create(&cfg.operator, &OperatorParams { q: cfg.q })?;
    let p = op.propagation(&adjacency(&split.graph))?;
    let settings = TrainSettings::from_config(cfg);
    train_fold(
        split,
        &x,
        Propagation::new(&p)?,
        classes,
        &settings,
        fold,
        derive_seed(cfg.seed, 100 + fold as u64),
    )
    .map_err(|e| Error::Fold {
        fold,
        source: Box::new(e),
    })
}

/// The task strategy and its folds for a validated config.
pub struct PreparedTask {
    pub task: Box<dyn Task>,
    pub splits: Vec<TaskSplit>,
    pub classes: usize,
}

/// Loads the dataset, applies the flow policy and label shuffling, and
/// builds the folds.
pub fn prepare_splits(cfg: &RunConfig) -> Result<PreparedTask> {
    cfg.validate()?;
    let task = TaskRegistry::builtin().create(&cfg.task)?;
    let (mut g, mut labels) = load_dataset(cfg)?;
    let flow = match cfg.flow_preprocess {
        FlowPolicy::Auto => task.uses_flow_preprocess(),
        FlowPolicy::On => true,
        FlowPolicy::Off => false,
    };
    if flow {
        g = flow_preprocess(&g);
    }
    if cfg.shuffle_labels {
        if let Some(l) = &labels {
            let mut v = l.labels().to_vec();
            v.shuffle(&mut rng::rng(derive_seed(cfg.seed, SHUFFLE_STREAM)));
            labels = Some(NodeLabels::new(v));
        }
    }
    let folds = cfg.folds.unwrap_or_else(|| task.default_folds());
    let splits = task.splits(
        &g,
        labels.as_ref(),
        folds,
        derive_seed(cfg.seed, SPLIT_STREAM),
    )?;
    let classes = task.num_classes(labels.as_ref());
    if classes < 2 {
        return Err(Error::InvalidConfig(format!(
            "task `{}` needs at least two classes",
            task.name()
        )));
    }
    Ok(PreparedTask {
        task,
        splits,
        classes,
    })
}

/// Builds the task splits from the configured dataset, trains one model per
/// fold and aggregates the test metrics.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentResult> {
    let PreparedTask {
        task,
        splits,
        classes,
    } = prepare_splits(cfg)?;
    let operators = OperatorRegistry::builtin();
    operators.resolve(&cfg.operator)?;

    let run = |(fold, split): (usize, &TaskSplit)| {
        run_fold(cfg, task.as_ref(), &operators, split, classes, fold)
    };
    let results: Vec<FoldResult> = if cfg.parallel_folds > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallel_folds)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| {
            splits
                .par_iter()
                .enumerate()
                .map(run)
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        splits
            .iter()
            .enumerate()
            .map(run)
            .collect::<Result<Vec<_>>>()?
    };
    let report = MetricsReport::new(results.iter().map(|r| r.metrics).collect());
    Ok(ExperimentResult {
        task: task.kind(),
        folds: results,
        report,
    })
}
