use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use sigmanet::config::{FeatureScaling, FlowPolicy, RunConfig};
use sigmanet::dsbm::{flip_signs, generate_dsbm, SignFlipMode};
use sigmanet::graph::{
    adjacency, load_edge_list, write_edge_list, write_labels, EdgeListOptions, IdMap,
};
use sigmanet::laplacian::{read_matrix_dump, write_matrix_dump, OperatorParams, OperatorRegistry};
use sigmanet::nn::Checkpoint;
use sigmanet::tasks::{run_experiment, ExperimentResult, Metric};
use sigmanet::verify::{
    check_matrix, run_theorem_suite, sign_flip_demo, RandomGraphSpec, DEMO_SCALES,
};
use sigmanet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "sigmanet",
    version,
    about = "Sign-Magnetic Laplacian tools and spectral GNN training"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the Hermitian adjacency and Laplacian of an edge list.
    Laplacian(LaplacianArgs),
    /// Check the Laplacian's spectral properties numerically.
    Verify(VerifyArgs),
    /// Sample a weighted directed stochastic block model graph.
    Generate(GenerateArgs),
    /// Train and evaluate the network over k folds.
    Train(TrainArgs),
}

#[derive(Args)]
struct LaplacianArgs {
    #[arg(long)]
    edges: PathBuf,
    /// sigma | magnetic (alias q)
    #[arg(long, default_value = "sigma")]
    operator: String,
    #[arg(long, default_value_t = 0.25)]
    q: f64,
    #[arg(long)]
    normalized: bool,
    #[arg(long)]
    merge_parallel: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of random graphs in the theorem suite.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    max_nodes: usize,
    #[arg(long, default_value_t = 0.3)]
    edge_prob: f64,
    /// Print the Magnetic vs Sign-Magnetic entries of a single rescaled edge.
    #[arg(long)]
    demo_signflip: bool,
    /// Check a matrix dump for Hermiticity and positive semidefiniteness.
    #[arg(long)]
    dump: Option<PathBuf>,
    #[arg(long, default_value_t = sigmanet::verify::PSD_TOL)]
    psd_tol: f64,
}

#[derive(Args)]
struct DsbmArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long)]
    alpha_intra: Option<f64>,
    #[arg(long)]
    alpha_inter: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    weight_lo: Option<u32>,
    #[arg(long)]
    weight_hi: Option<u32>,
    #[arg(long)]
    dsbm_seed: Option<u64>,
    #[arg(long)]
    sign_flip_frac: Option<f64>,
    /// edge | target-node
    #[arg(long)]
    sign_flip_mode: Option<SignFlipMode>,
    #[arg(long)]
    sign_flip_seed: Option<u64>,
}

impl DsbmArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$target = v; })*
            };
        }
        set!(n => dsbm_n, clusters => dsbm_clusters, alpha_intra => dsbm_alpha_intra,
            alpha_inter => dsbm_alpha_inter, beta => dsbm_beta, weight_lo => dsbm_weight_lo,
            weight_hi => dsbm_weight_hi, dsbm_seed => dsbm_seed, sign_flip_frac => sign_flip_frac,
            sign_flip_mode => sign_flip_mode, sign_flip_seed => sign_flip_seed);
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    dsbm: DsbmArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Base config; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// node | link-exist | link-direction | link-sign
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    operator: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    #[arg(long)]
    dropout: Option<f64>,
    #[arg(long)]
    filters: Option<usize>,
    /// auto | on | off
    #[arg(long)]
    flow_preprocess: Option<FlowPolicy>,
    /// none | scale | standardize
    #[arg(long)]
    feature_scaling: Option<FeatureScaling>,
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    merge_parallel: bool,
    #[arg(long)]
    shuffle_labels: bool,
    #[arg(long)]
    parallel_folds: Option<usize>,
    #[command(flatten)]
    dsbm: DsbmArgs,
}

impl TrainArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$field = v; })*
            };
        }
        set!(
            task,
            operator,
            q,
            seed,
            max_epochs,
            patience,
            learning_rate,
            weight_decay,
            dropout,
            flow_preprocess,
            feature_scaling,
            parallel_folds
        );
        if self.folds.is_some() {
            cfg.folds = self.folds;
        }
        if let Some(f) = self.filters {
            cfg.filters1 = f;
            cfg.filters2 = f;
        }
        if self.edges.is_some() {
            cfg.edges = self.edges.clone();
            cfg.labels = self.labels.clone();
        } else if self.labels.is_some() {
            cfg.labels = self.labels.clone();
        }
        cfg.merge_parallel |= self.merge_parallel;
        cfg.shuffle_labels |= self.shuffle_labels;
        self.dsbm.apply(&mut cfg);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_laplacian(args: &LaplacianArgs) -> Result<()> {
    let opts = EdgeListOptions {
        n_hint: None,
        merge_parallel: args.merge_parallel,
    };
    let loaded = load_edge_list(&args.edges, &opts)?;
    let op = OperatorRegistry::builtin().create(&args.operator, &OperatorParams { q: args.q })?;
    let a = adjacency(&loaded.graph);
    let h = op.hermitian_adjacency(&a)?;
    let l = op.laplacian(&a, args.normalized)?;
    create_dir(&args.out)?;
    write_matrix_dump(&args.out.join("H.txt"), &h)?;
    write_matrix_dump(&args.out.join("L.txt"), &l)?;
    sigmanet::graph::write_id_map(&args.out.join("ids.csv"), &loaded.ids)?;
    println!(
        "{} operator, {} nodes, {} edges -> {}",
        op.name(),
        loaded.graph.n(),
        loaded.graph.num_edges(),
        args.out.display()
    );
    Ok(())
}

/// Returns whether every check passed.
fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let mut ok = true;
    let run_suite = args.random.is_some() || (!args.demo_signflip && args.dump.is_none());
    if run_suite {
        let spec = RandomGraphSpec {
            max_nodes: args.max_nodes.max(2),
            edge_prob: args.edge_prob,
            ..RandomGraphSpec::default()
        };
        let graphs = args.random.unwrap_or(200);
        let report = run_theorem_suite(&spec, graphs, args.seed)?;
        println!(
            "theorem suite over {graphs} random graphs (seed {})",
            args.seed
        );
        print!("{report}");
        ok &= report.passed();
    }
    if args.demo_signflip {
        println!(
            "{:>6}  {:>24}  {:>24}",
            "scale", "H_q(0.25)[0,1]", "H_sigma[0,1]"
        );
        for row in sign_flip_demo(&DEMO_SCALES)? {
            println!(
                "{:>6}  {:>11.4} {:>+11.4}i  {:>11.4} {:>+11.4}i",
                row.scale,
                row.magnetic.re,
                row.magnetic.im,
                row.sign_magnetic.re,
                row.sign_magnetic.im
            );
        }
    }
    if let Some(path) = &args.dump {
        let m = read_matrix_dump(path)?;
        println!("checks for {}", path.display());
        for c in check_matrix(&m, args.psd_tol)? {
            println!("{c}");
            ok &= c.passed;
        }
    }
    Ok(ok)
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let mut cfg = RunConfig::default();
    args.dsbm.apply(&mut cfg);
    cfg.validate()?;
    let (g, labels) = generate_dsbm(&cfg.dsbm())?;
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
    create_dir(&args.out)?;
    let ids = IdMap::identity(g.n());
    write_edge_list(&args.out.join("edges.csv"), &g, &ids)?;
    write_labels(&args.out.join("labels.csv"), &labels, &ids)?;
    cfg.save(&args.out.join("config.toml"))?;
    println!(
        "{} nodes, {} edges -> {}",
        g.n(),
        g.num_edges(),
        args.out.display()
    );
    Ok(())
}

fn summary_table(cfg: &RunConfig, result: &ExperimentResult) -> String {
    let r = &result.report;
    let mut out = format!(
        "task {}  operator {}  folds {}\n{:<10} {:>8} {:>8}\n",
        cfg.task,
        cfg.operator,
        r.folds.len(),
        "metric",
        "mean",
        "std"
    );
    for m in r.metrics() {
        out.push_str(&format!(
            "{:<10} {:>8.2} {:>8.2}\n",
            m.name(),
            100.0 * r.mean(m).unwrap_or(f64::NAN),
            100.0 * r.std(m).unwrap_or(f64::NAN)
        ));
    }
    out
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.config()?;
    create_dir(&args.out)?;
    cfg.save(&args.out.join("config.toml"))?;
    let result = run_experiment(&cfg)?;
    write(&args.out.join("metrics.csv"), &result.report.to_csv())?;
    write(&args.out.join("loss_curve.csv"), &result.loss_curve_csv())?;
    let summary = summary_table(&cfg, &result);
    write(&args.out.join("summary.txt"), &summary)?;
    let ckpt_dir = args.out.join("checkpoints");
    create_dir(&ckpt_dir)?;
    for f in &result.folds {
        Checkpoint::from_params(&f.params, cfg.seed, cfg.dropout)
            .save(&ckpt_dir.join(format!("fold_{}.json", f.fold)))?;
        info!(
            "fold {}: best epoch {}, {} epochs run",
            f.fold,
            f.best_epoch,
            f.curve.len()
        );
    }
    print!("{summary}");
    if let Some(acc) = result.report.mean(Metric::Accuracy) {
        info!("mean accuracy {acc:.4}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Laplacian(a) => cmd_laplacian(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Generate(a) => cmd_generate(a).map(|_| true),
        Command::Train(a) => cmd_train(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: property check failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
