use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use specreg::config::{parse_isolated, parse_target};
use specreg::io::{self, NodeIndex};
use specreg::{load_config, run_experiment};
use specreg_core::theory::{
    bipartite_thresholds, clique_spectrum, clique_thresholds, secular_eigenvalues, SECULAR_TOL,
};
use specreg_core::{
    bipartite_block_model, bipartite_spectral_embedding, bipartite_to_adjacency, clique_block_model,
    clique_block_model_eps, evaluate_all, kmeans, sbm, spectral_embedding, BlockSpec,
    EmbeddingConfig, KMeansConfig, Labels, MetricRecord, SbmSpec,
};

#[derive(Parser)]
#[command(name = "specreg", version, about = "Regularized spectral embedding and clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a block model graph and its labels.
    Generate(GenerateArgs),
    /// Embed a graph and write the coordinates as CSV.
    Embed(EmbedArgs),
    /// Run k-means on an embedding CSV.
    Cluster(ClusterArgs),
    /// Score a clustering against ground truth.
    Eval(EvalArgs),
    /// Print closed-form thresholds and eigenvalues of a clique block model.
    Theory(TheoryArgs),
    /// Run a sweep described by a config file.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Cliques,
    Sbm,
    Bipartite,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Block sizes; the SBM defaults to the 100 x 20 benchmark.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Intra-block probabilities, one per block or a single value.
    #[arg(long, value_delimiter = ',')]
    p_in: Vec<f64>,
    #[arg(long)]
    p_out: Option<f64>,
    /// Constant added to every entry of a clique model.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    m_sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list output.
    #[arg(long)]
    graph: PathBuf,
    /// Label output; rows only for bipartite models.
    #[arg(long)]
    labels: PathBuf,
    /// Column label output for bipartite models.
    #[arg(long)]
    col_labels: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Relative,
    Absolute,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Read the edge list as a biadjacency list.
    #[arg(long)]
    bipartite: bool,
    #[arg(long, default_value_t = 20)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "relative")]
    alpha_mode: Mode,
    /// Keep the trivial eigenvector.
    #[arg(long)]
    keep_first: bool,
    /// `biadjacency` or `adjacency`.
    #[arg(long, default_value = "biadjacency")]
    target: String,
    /// Zero-degree policy: `reject`, `pseudo_inverse` or `self_loop`.
    #[arg(long, default_value = "reject")]
    isolated: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// CSV output; settings and eigenvalues go to `<out>.meta`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    embedding: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    /// Label output.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mask {
    /// Every node must have a truth label.
    All,
    /// Score only the nodes listed in the truth file.
    Original,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Nodes are `row:<id>` and `col:<id>` of a biadjacency list.
    #[arg(long)]
    bipartite: bool,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    mask: Mask,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Absolute regularization.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    bipartite: bool,
    #[arg(long, value_delimiter = ',')]
    n_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    m_sizes: Vec<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn generate(a: GenerateArgs) -> anyhow::Result<()> {
    match a.model {
        Model::Cliques => {
            let mut spec = BlockSpec::new(a.sizes)?;
            let (g, labels) = match a.eps {
                Some(eps) => {
                    spec = spec.with_eps(eps)?;
                    clique_block_model_eps(&spec, specreg_core::generators::DENSE_NODE_CAP)?
                }
                None => clique_block_model(&spec)?,
            };
            write_graph(&a.graph, &a.labels, &g, &labels)
        }
        Model::Sbm => {
            let spec = if a.sizes.is_empty() {
                SbmSpec::benchmark()
            } else {
                let p_in = match a.p_in.as_slice() {
                    [p] => vec![*p; a.sizes.len()],
                    _ => a.p_in,
                };
                let p_out = a.p_out.context("--p-out is required with --sizes")?;
                SbmSpec {
                    sizes: a.sizes,
                    p_in,
                    p_out,
                }
            };
            let (g, labels) = sbm(&spec, a.seed)?;
            write_graph(&a.graph, &a.labels, &g, &labels)
        }
        Model::Bipartite => {
            let cols_path = a.col_labels.context("--col-labels is required for bipartite models")?;
            let (b, rows, cols) = bipartite_block_model(&a.n_sizes, &a.m_sizes)?;
            io::save_bipartite(&a.graph, &b)?;
            io::save_labels(&a.labels, &rows, &NodeIndex::identity(rows.len()))?;
            io::save_labels(&cols_path, &cols, &NodeIndex::identity(cols.len()))?;
            Ok(())
        }
    }
}

fn write_graph(
    graph: &PathBuf,
    labels_path: &PathBuf,
    g: &specreg_core::SparseGraph,
    labels: &Labels,
) -> anyhow::Result<()> {
    let nodes = NodeIndex::identity(g.node_count());
    io::save_edge_list(graph, g, &nodes)?;
    io::save_labels(labels_path, labels, &nodes)?;
    Ok(())
}

fn embed(a: EmbedArgs) -> anyhow::Result<()> {
    let mut cfg = match a.alpha_mode {
        Mode::Relative => EmbeddingConfig::relative(a.dim, a.alpha),
        Mode::Absolute => EmbeddingConfig::absolute(a.dim, a.alpha),
    }
    .skip_first(!a.keep_first)
    .with_seed(a.seed);
    cfg.solver.lanczos.tol = a.tol;
    cfg.solver.singular = parse_isolated(&a.isolated)
        .ok_or_else(|| specreg::Error::Config(format!("unknown policy {:?}", a.isolated)))?;
    cfg.target = parse_target(&a.target)
        .ok_or_else(|| specreg::Error::Config(format!("unknown target {:?}", a.target)))?;
    let (embedding, nodes) = if a.bipartite {
        let loaded = io::load_bipartite(&a.graph)?;
        (bipartite_spectral_embedding(&loaded.graph, &cfg)?, loaded.stacked_nodes())
    } else {
        let loaded = io::load_edge_list(&a.graph)?;
        (spectral_embedding(&loaded.graph, &cfg)?, loaded.nodes)
    };
    for w in &embedding.warnings {
        eprintln!("warning: {w:?}");
    }
    io::save_embedding(&a.out, &embedding, &nodes)?;
    Ok(())
}

fn cluster(a: ClusterArgs) -> anyhow::Result<()> {
    let (nodes, points) = io::load_embedding(&a.embedding)?;
    let cfg = KMeansConfig {
        n_init: a.n_init,
        ..KMeansConfig::new(a.k).with_seed(a.seed)
    };
    let r = kmeans(&points, &cfg)?;
    io::save_labels(&a.out, &r.labels, &nodes)?;
    eprintln!("inertia {:e} (restart {}, {} iterations)", r.inertia, r.restart, r.iterations);
    Ok(())
}

fn eval(a: EvalArgs) -> anyhow::Result<()> {
    let (g, nodes) = if a.bipartite {
        let loaded = io::load_bipartite(&a.graph)?;
        (bipartite_to_adjacency(&loaded.graph), loaded.stacked_nodes())
    } else {
        let loaded = io::load_edge_list(&a.graph)?;
        (loaded.graph, loaded.nodes)
    };
    let (pred, covered) = io::load_labels_for(&a.pred, &nodes)?;
    if let Some(i) = covered.iter().position(|&c| !c) {
        bail!(specreg::Error::Config(format!("node {} has no predicted label", nodes.name(i))));
    }
    let (truth, mask) = io::load_labels_for(&a.truth, &nodes)?;
    let mask = match a.mask {
        Mask::Original => Some(mask),
        Mask::All => match mask.iter().position(|&m| !m) {
            Some(i) => bail!(specreg::Error::Config(format!(
                "node {} has no truth label; use --mask original",
                nodes.name(i)
            ))),
            None => None,
        },
    };
    let record = evaluate_all(&g, &pred, &truth, mask.as_deref())?;
    for (name, v) in MetricRecord::NAMES.iter().zip(record.values()) {
        println!("{name}\t{v:.6}");
    }
    Ok(())
}

fn fmt(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn theory(a: TheoryArgs) -> anyhow::Result<()> {
    if a.bipartite {
        let t = bipartite_thresholds(&a.n_sizes, &a.m_sizes, a.alpha)?;
        println!("mu (block order): {}", fmt(&t.mus));
        println!("mu (sorted): {}", fmt(&t.sorted()));
        if let Some(h) = &t.harmonic_keys {
            println!("harmonic keys: {}", fmt(h));
        }
        if let Some(g) = &t.geometric_keys {
            println!("geometric keys: {}", fmt(g));
        }
        return Ok(());
    }
    let t = clique_thresholds(&a.sizes, a.alpha)?;
    println!("mu (block order): {}", fmt(&t.mus));
    println!("mu (sorted): {}", fmt(&t.sorted()));
    let strictly_decreasing = a.sizes.windows(2).all(|w| w[0] > w[1]);
    if strictly_decreasing {
        println!("secular roots: {}", fmt(&secular_eigenvalues(&a.sizes, a.alpha, SECULAR_TOL)?));
    }
    println!("spectrum: {}", fmt(&clique_spectrum(&a.sizes, a.alpha, SECULAR_TOL)?));
    Ok(())
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<()> {
    let cfg = load_config(&a.config)?;
    for p in run_experiment(&cfg, &a.out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn is_solver_failure(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        if let Some(e) = c.downcast_ref::<specreg::Error>() {
            return e.is_solver_failure();
        }
        matches!(
            c.downcast_ref::<specreg_core::Error>(),
            Some(specreg_core::Error::NonConvergence { .. } | specreg_core::Error::SingularDegree { .. })
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Embed(a) => embed(a),
        Command::Cluster(a) => cluster(a),
        Command::Eval(a) => eval(a),
        Command::Theory(a) => theory(a),
        Command::Experiment(a) => experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_solver_failure(&e) { 3 } else { 2 })
        }
    }
}
