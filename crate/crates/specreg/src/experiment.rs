//! Sweeps over regularization, noise and regularization target.
//!
//! Every (noise, α, target, repeat) cell is an independent job. Jobs run on
//! a bounded rayon pool (`SPECREG_THREADS` threads, all cores when unset)
//! and results are keyed by their indices, so the output does not depend
//! on scheduling. A failing cell is recorded and shown as `NA`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use specreg_core::pipeline::{run_bipartite, run_graph};
use specreg_core::theory::{clique_thresholds, secular_eigenvalues, sign_recovery, stacked_labels, SECULAR_TOL};
use specreg_core::{
    add_noise_nodes, bipartite_block_model, clique_block_model, clique_block_model_eps, sbm,
    spectral_embedding, BipartiteGraph, BlockSpec, EmbeddingConfig, KMeansConfig, Labels,
    LanczosConfig, MetricRecord, RegularizationTarget, SolverConfig, SparseGraph,
};

use crate::config::{Dataset, ExperimentConfig, ExperimentKind};
use crate::error::{Error, Result};
use crate::io;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the little-endian bytes of `words`.
pub fn fnv1a(words: &[u64]) -> u64 {
    let mut h = FNV_OFFSET;
    for w in words {
        for b in w.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Seed of the solver and k-means for one cell. Adding sweep points leaves
/// existing cells untouched.
pub fn cell_seed(base: u64, alpha_idx: usize, noise_idx: usize, repeat: usize) -> u64 {
    base ^ fnv1a(&[alpha_idx as u64, noise_idx as u64, repeat as u64])
}

/// Seed of the random graph of one repeat, shared by all cells of that repeat.
pub fn graph_seed(base: u64, repeat: usize) -> u64 {
    base ^ fnv1a(&[u64::MAX, repeat as u64])
}

/// Worker pool bounded by `SPECREG_THREADS`.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var("SPECREG_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Mean and sample standard deviation over the successful repeats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

impl CellStats {
    pub fn from_values(v: &[f64]) -> Self {
        let count = v.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
                count,
            };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std, count }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub keys: Vec<String>,
    /// One entry per metric, in [`MetricRecord::NAMES`] order.
    pub stats: Vec<CellStats>,
    pub runs: usize,
    pub failures: usize,
    pub first_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub key_names: Vec<String>,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn to_markdown(&self) -> String {
        let mut s = format!("## {}\n\n|", self.title);
        for k in &self.key_names {
            let _ = write!(s, " {k} |");
        }
        for m in MetricRecord::NAMES {
            let _ = write!(s, " {m} |");
        }
        s.push_str(" runs |\n|");
        for _ in 0..self.key_names.len() + MetricRecord::NAMES.len() + 1 {
            s.push_str("---|");
        }
        s.push('\n');
        for row in &self.rows {
            s.push('|');
            for k in &row.keys {
                let _ = write!(s, " {k} |");
            }
            for c in &row.stats {
                if c.count == 0 {
                    s.push_str(" NA |");
                } else {
                    let _ = write!(s, " {:.3} |", c.mean);
                }
            }
            let _ = writeln!(s, " {}/{} |", row.runs - row.failures, row.runs);
        }
        s
    }

    /// Every metric gets `_mean`, `_std` and `_n` columns.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = self.key_names.clone();
        for m in MetricRecord::NAMES {
            header.extend([format!("{m}_mean"), format!("{m}_std"), format!("{m}_n")]);
        }
        header.extend(["failures".to_string(), "error".to_string()]);
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = row.keys.clone();
            for c in &row.stats {
                if c.count == 0 {
                    rec.extend(["NA".to_string(), "NA".to_string(), "0".to_string()]);
                } else {
                    rec.extend([c.mean.to_string(), c.std.to_string(), c.count.to_string()]);
                }
            }
            rec.push(row.failures.to_string());
            rec.push(row.first_error.clone().unwrap_or_default());
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

enum Instance {
    Graph { g: SparseGraph, truth: Labels },
    Bipartite { b: BipartiteGraph, truth: Labels },
}

fn load_instance(ds: &Dataset, seed: u64) -> Result<Instance> {
    Ok(match ds {
        Dataset::Sbm(spec) => {
            let (g, truth) = sbm(spec, seed)?;
            Instance::Graph { g, truth }
        }
        Dataset::Cliques { sizes, eps } => {
            let mut spec = BlockSpec::new(sizes.clone())?;
            let (g, truth) = match eps {
                Some(e) => {
                    spec = spec.with_eps(*e)?;
                    clique_block_model_eps(&spec, specreg_core::generators::DENSE_NODE_CAP)?
                }
                None => clique_block_model(&spec)?,
            };
            Instance::Graph { g, truth }
        }
        Dataset::BipartiteBlocks { n_sizes, m_sizes } => {
            let (b, rows, cols) = bipartite_block_model(n_sizes, m_sizes)?;
            Instance::Bipartite {
                b,
                truth: stacked_labels(&rows, &cols),
            }
        }
        Dataset::File { graph, labels } => {
            let loaded = io::load_edge_list(graph)?;
            let (truth, mask) = io::load_labels_for(labels, &loaded.nodes)?;
            if let Some(i) = mask.iter().position(|&m| !m) {
                return Err(Error::Config(format!("node {} has no label", loaded.nodes.name(i))));
            }
            Instance::Graph {
                g: loaded.graph,
                truth,
            }
        }
        Dataset::BipartiteFile {
            graph,
            row_labels,
            col_labels,
        } => {
            let loaded = io::load_bipartite(graph)?;
            let (rows, rmask) = io::load_labels_for(row_labels, &loaded.rows)?;
            let (cols, cmask) = io::load_labels_for(col_labels, &loaded.cols)?;
            if rmask.iter().chain(&cmask).any(|&m| !m) {
                return Err(Error::Config("every row and column needs a label".into()));
            }
            Instance::Bipartite {
                b: loaded.graph,
                truth: stacked_labels(&rows, &cols),
            }
        }
    })
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct CellKey {
    noise: usize,
    alpha: usize,
    target: usize,
}

fn target_name(t: RegularizationTarget) -> &'static str {
    match t {
        RegularizationTarget::Biadjacency => "biadjacency",
        RegularizationTarget::Adjacency => "adjacency",
    }
}

fn run_cell(
    cfg: &ExperimentConfig,
    inst: &Instance,
    key: CellKey,
    noise: f64,
    target: RegularizationTarget,
    seed: u64,
) -> Result<MetricRecord> {
    let emb = EmbeddingConfig {
        dim: cfg.dim,
        alpha: cfg.alphas[key.alpha],
        alpha_mode: cfg.alpha_mode,
        theta: None,
        skip_first: cfg.skip_first,
        target,
        solver: SolverConfig {
            lanczos: LanczosConfig {
                seed,
                tol: cfg.tol,
                max_iter: None,
            },
            singular: cfg.isolated,
        },
    };
    let km = |k: usize| KMeansConfig {
        n_init: cfg.n_init,
        ..KMeansConfig::new(k).with_seed(seed)
    };
    match inst {
        Instance::Graph { g, truth } => {
            let k = cfg.k.resolve(truth.k());
            if noise > 0.0 {
                let (noisy, added) = add_noise_nodes(g, noise, cfg.noise_weight)?;
                let truth = truth.with_extra_block(added.len());
                let mask: Vec<bool> = (0..noisy.node_count()).map(|i| i < added.start).collect();
                Ok(run_graph(&noisy, &truth, &emb, &km(k), Some(&mask))?.metrics)
            } else {
                Ok(run_graph(g, truth, &emb, &km(k), None)?.metrics)
            }
        }
        Instance::Bipartite { b, truth } => {
            let k = cfg.k.resolve(truth.k());
            Ok(run_bipartite(b, truth, &emb, &km(k))?.metrics)
        }
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

// Runs all cells of the given axes and assembles one row per (noise, α, target).
fn sweep(cfg: &ExperimentConfig, noise: &[f64], targets: &[RegularizationTarget]) -> Result<Table> {
    cfg.validate()?;
    let pool = thread_pool()?;
    pool.install(|| {
        let instances: Vec<Instance> = if cfg.dataset.is_random() {
            (0..cfg.repeats)
                .into_par_iter()
                .map(|r| load_instance(&cfg.dataset, graph_seed(cfg.seed, r)))
                .collect::<Result<_>>()?
        } else {
            vec![load_instance(&cfg.dataset, cfg.seed)?]
        };
        let mut jobs = Vec::new();
        for n in 0..noise.len() {
            for a in 0..cfg.alphas.len() {
                for t in 0..targets.len() {
                    for r in 0..cfg.repeats {
                        jobs.push((CellKey { noise: n, alpha: a, target: t }, r));
                    }
                }
            }
        }
        let results: Vec<(CellKey, usize, std::result::Result<MetricRecord, String>)> = jobs
            .into_par_iter()
            .map(|(key, r)| {
                let inst = &instances[r.min(instances.len() - 1)];
                let seed = cell_seed(cfg.seed, key.alpha, key.noise, r);
                let out = run_cell(cfg, inst, key, noise[key.noise], targets[key.target], seed)
                    .map_err(|e| e.to_string());
                (key, r, out)
            })
            .collect();

        let mut cells: BTreeMap<CellKey, Vec<(usize, std::result::Result<MetricRecord, String>)>> =
            BTreeMap::new();
        for (key, r, out) in results {
            cells.entry(key).or_default().push((r, out));
        }
        let bipartite = cfg.dataset.is_bipartite();
        let mut key_names = Vec::new();
        if cfg.kind == ExperimentKind::NoiseSweep {
            key_names.push("noise".to_string());
        }
        if bipartite {
            key_names.push("target".to_string());
        }
        key_names.push("alpha".to_string());
        let rows = cells
            .into_iter()
            .map(|(key, mut runs)| {
                runs.sort_by_key(|(r, _)| *r);
                let ok: Vec<&MetricRecord> = runs.iter().filter_map(|(_, o)| o.as_ref().ok()).collect();
                let stats = (0..MetricRecord::NAMES.len())
                    .map(|m| CellStats::from_values(&ok.iter().map(|rec| rec.values()[m]).collect::<Vec<_>>()))
                    .collect();
                let mut keys = Vec::new();
                if cfg.kind == ExperimentKind::NoiseSweep {
                    keys.push(fmt_num(noise[key.noise]));
                }
                if bipartite {
                    keys.push(target_name(targets[key.target]).to_string());
                }
                keys.push(fmt_num(cfg.alphas[key.alpha]));
                TableRow {
                    keys,
                    stats,
                    runs: runs.len(),
                    failures: runs.len() - ok.len(),
                    first_error: runs.iter().find_map(|(_, o)| o.as_ref().err().cloned()),
                }
            })
            .collect();
        Ok(Table {
            title: cfg.kind.name().to_string(),
            key_names,
            rows,
        })
    })
}

/// One row per α. Bipartite data uses the first configured target.
pub fn run_alpha_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let targets = [cfg.targets.first().copied().unwrap_or_default()];
    sweep(cfg, &[0.0], &targets)
}

/// One row per (noise fraction, α); scores cover the original nodes only.
pub fn run_noise_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    if cfg.dataset.is_bipartite() {
        return Err(Error::Config("noise_sweep needs a unipartite model".into()));
    }
    sweep(cfg, &cfg.noise, &[RegularizationTarget::default()])
}

/// One row per (target, α) on bipartite data.
pub fn run_bipartite_comparison(cfg: &ExperimentConfig) -> Result<Table> {
    if !cfg.dataset.is_bipartite() {
        return Err(Error::Config("the bipartite experiment needs a bipartite model".into()));
    }
    sweep(cfg, &[0.0], &cfg.targets)
}

fn block_values(e: &specreg_core::Embedding, labels: &Labels) -> Vec<f64> {
    labels
        .members()
        .iter()
        .map(|m| e.coordinates[(m[0], 0)])
        .collect()
}

fn join(v: &[f64], digits: usize) -> String {
    v.iter()
        .map(|x| format!("{x:.digits$}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Three cliques of sizes 5, 3 and 2 embedded in dimension 1 without and
/// with regularization (absolute α).
pub fn run_toy() -> Result<String> {
    let sizes = [5usize, 3, 2];
    let (g, labels) = clique_block_model(&BlockSpec::new(sizes.to_vec())?)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "cliques of sizes 5, 3, 2: n = {}, w = {}",
        g.node_count(),
        g.total_weight()
    );

    let (components, _) = g.connected_components();
    let cfg0 = EmbeddingConfig::absolute(1, 0.0);
    let all = spectral_embedding(&g, &EmbeddingConfig::absolute(4, 0.0).skip_first(false))?;
    let nullity = all.eigenvalues.iter().filter(|l| l.abs() < 1e-8).count();
    let e0 = spectral_embedding(&g, &cfg0)?;
    let _ = writeln!(s, "\nalpha = 0");
    let _ = writeln!(s, "  nullspace dimension: {nullity} ({components} connected components)");
    let _ = writeln!(
        s,
        "  block values: {} (any vector of the nullspace; the basis is arbitrary)",
        join(&block_values(&e0, &labels), 4)
    );

    let alpha = 1.0;
    let e1 = spectral_embedding(&g, &EmbeddingConfig::absolute(1, alpha))?;
    let mus = clique_thresholds(&sizes, alpha)?.sorted();
    let roots = secular_eigenvalues(&sizes, alpha, SECULAR_TOL)?;
    let split = sign_recovery(&e1, 2, &labels, true)?;
    let side = |blocks: &[usize]| {
        let v: Vec<String> = blocks.iter().map(|&b| sizes[b].to_string()).collect();
        format!("{{{}}}", v.join(", "))
    };
    let _ = writeln!(s, "\nalpha = 1");
    let _ = writeln!(s, "  thresholds mu: {}", join(&mus, 4));
    let _ = writeln!(s, "  secular roots: {}", join(&roots, 6));
    let _ = writeln!(s, "  lambda_2 (solver): {:.6}", e1.eigenvalues[0]);
    let _ = writeln!(s, "  block values: {}", join(&block_values(&e1, &labels), 4));
    let _ = writeln!(
        s,
        "  sign split by block size: {} vs {}",
        side(&split.negative),
        side(&split.positive)
    );
    Ok(s)
}

/// Runs the configured experiment and writes its outputs into `out`.
/// Tables produce `<name>.md` and `<name>.csv`, the toy report `toy.txt`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let write = |name: String, body: String| -> Result<PathBuf> {
        let p = out.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        Ok(p)
    };
    let table = match cfg.kind {
        ExperimentKind::Toy => return Ok(vec![write("toy.txt".into(), run_toy()?)?]),
        ExperimentKind::AlphaSweep => run_alpha_sweep(cfg)?,
        ExperimentKind::NoiseSweep => run_noise_sweep(cfg)?,
        ExperimentKind::Bipartite => run_bipartite_comparison(cfg)?,
    };
    let name = cfg.kind.name();
    Ok(vec![
        write(format!("{name}.md"), table.to_markdown())?,
        write(format!("{name}.csv"), table.to_csv()?)?,
    ])
}
