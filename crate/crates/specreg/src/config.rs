//! Experiment configuration files.
//!
//! The format is flat `key = value` text. `#` starts a comment, list values
//! are comma separated and `v*c` repeats `v` c times, so the benchmark block
//! model reads
//!
//! ```text
//! experiment = alpha_sweep
//! model = sbm
//! sizes = 20*100
//! p_in = 0.5*50, 0.05*50
//! p_out = 0.001
//! alpha = 0, 0.1, 1, 10
//! repeats = 10
//! ```
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `experiment` | `alpha_sweep`, `noise_sweep`, `bipartite`, `toy` | `alpha_sweep` |
//! | `model` | `sbm`, `cliques`, `bipartite`, `file`, `bipartite_file` | `sbm` |
//! | `sizes`, `p_in`, `p_out` | block sizes and probabilities (`sbm`, `cliques`) | benchmark SBM |
//! | `eps` | constant added to every clique model entry | none |
//! | `n_sizes`, `m_sizes` | block sizes of the two parts (`bipartite`) | |
//! | `graph`, `labels` | edge list and label file (`file`, `bipartite_file`) | |
//! | `col_labels` | column label file (`bipartite_file`) | |
//! | `dim` | embedding dimension | 20 |
//! | `alpha` | regularization list | `0, 0.1, 1, 10` |
//! | `alpha_mode` | `relative`, `absolute` | `relative` |
//! | `k` | `truth`, `truth/2`, or a number | `truth` |
//! | `noise` | fractions of isolated nodes (`noise_sweep`) | `0, 0.01, 0.1` |
//! | `noise_weight` | self-loop weight of noise nodes | 1 |
//! | `seed`, `repeats` | base seed and number of repeats | 0, 1 |
//! | `skip_first` | drop the trivial eigenvector | `true` |
//! | `isolated` | zero-degree policy: `self_loop`, `pseudo_inverse`, `reject` | `self_loop` |
//! | `targets` | `biadjacency`, `adjacency` (bipartite data) | both |
//! | `n_init` | k-means restarts | 10 |
//! | `tol` | eigensolver tolerance | 1e-10 |
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use specreg_core::{AlphaMode, RegularizationTarget, SbmSpec, SingularDegree};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    AlphaSweep,
    NoiseSweep,
    Bipartite,
    Toy,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::AlphaSweep => "alpha_sweep",
            ExperimentKind::NoiseSweep => "noise_sweep",
            ExperimentKind::Bipartite => "bipartite",
            ExperimentKind::Toy => "toy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Sbm(SbmSpec),
    Cliques {
        sizes: Vec<usize>,
        eps: Option<f64>,
    },
    BipartiteBlocks {
        n_sizes: Vec<usize>,
        m_sizes: Vec<usize>,
    },
    File {
        graph: PathBuf,
        labels: PathBuf,
    },
    BipartiteFile {
        graph: PathBuf,
        row_labels: PathBuf,
        col_labels: PathBuf,
    },
}

impl Dataset {
    pub fn is_bipartite(&self) -> bool {
        matches!(self, Dataset::BipartiteBlocks { .. } | Dataset::BipartiteFile { .. })
    }

    /// Only the SBM is random; everything else is the same on every repeat.
    pub fn is_random(&self) -> bool {
        matches!(self, Dataset::Sbm(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KPolicy {
    Truth,
    HalfTruth,
    Fixed(usize),
}

impl KPolicy {
    pub fn resolve(self, truth: usize) -> usize {
        match self {
            KPolicy::Truth => truth,
            KPolicy::HalfTruth => (truth / 2).max(1),
            KPolicy::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dataset: Dataset,
    pub dim: usize,
    pub alphas: Vec<f64>,
    pub alpha_mode: AlphaMode,
    pub k: KPolicy,
    pub noise: Vec<f64>,
    pub noise_weight: f64,
    pub seed: u64,
    pub repeats: usize,
    pub skip_first: bool,
    pub isolated: SingularDegree,
    pub targets: Vec<RegularizationTarget>,
    pub n_init: usize,
    pub tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: ExperimentKind::AlphaSweep,
            dataset: Dataset::Sbm(SbmSpec::benchmark()),
            dim: 20,
            alphas: vec![0.0, 0.1, 1.0, 10.0],
            alpha_mode: AlphaMode::Relative,
            k: KPolicy::Truth,
            noise: vec![0.0, 0.01, 0.1],
            noise_weight: 1.0,
            seed: 0,
            repeats: 1,
            skip_first: true,
            isolated: SingularDegree::SelfLoop,
            targets: vec![RegularizationTarget::Biadjacency, RegularizationTarget::Adjacency],
            n_init: 10,
            tol: 1e-10,
        }
    }
}

fn err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

fn scalar<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| err(line, format!("bad value {v:?} for {key}")))
}

fn list<T: std::str::FromStr + Clone>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in v.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        match item.split_once('*') {
            Some((value, count)) => {
                let value: T = scalar(line, key, value)?;
                let count: usize = scalar(line, key, count)?;
                out.extend(std::iter::repeat_n(value, count));
            }
            None => out.push(scalar(line, key, item)?),
        }
    }
    Ok(out)
}

fn flag(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(err(line, format!("bad value {v:?} for {key}"))),
    }
}

pub fn parse_isolated(v: &str) -> Option<SingularDegree> {
    match v {
        "self_loop" => Some(SingularDegree::SelfLoop),
        "pseudo_inverse" => Some(SingularDegree::PseudoInverse),
        "reject" => Some(SingularDegree::Reject),
        _ => None,
    }
}

pub fn parse_target(v: &str) -> Option<RegularizationTarget> {
    match v {
        "biadjacency" => Some(RegularizationTarget::Biadjacency),
        "adjacency" => Some(RegularizationTarget::Adjacency),
        _ => None,
    }
}

#[derive(Default)]
struct Raw {
    model: Option<String>,
    sizes: Option<Vec<usize>>,
    p_in: Option<Vec<f64>>,
    p_out: Option<f64>,
    eps: Option<f64>,
    n_sizes: Option<Vec<usize>>,
    m_sizes: Option<Vec<usize>>,
    graph: Option<PathBuf>,
    labels: Option<PathBuf>,
    col_labels: Option<PathBuf>,
}

/// Parses a config; relative paths are resolved against `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut raw = Raw::default();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(n, "expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        let path = || base.join(value);
        match key {
            "experiment" => {
                cfg.kind = match value {
                    "alpha_sweep" => ExperimentKind::AlphaSweep,
                    "noise_sweep" => ExperimentKind::NoiseSweep,
                    "bipartite" => ExperimentKind::Bipartite,
                    "toy" => ExperimentKind::Toy,
                    _ => return Err(err(n, format!("unknown experiment {value:?}"))),
                }
            }
            "model" => raw.model = Some(value.to_string()),
            "sizes" => raw.sizes = Some(list(n, key, value)?),
            "p_in" => raw.p_in = Some(list(n, key, value)?),
            "p_out" => raw.p_out = Some(scalar(n, key, value)?),
            "eps" => raw.eps = Some(scalar(n, key, value)?),
            "n_sizes" => raw.n_sizes = Some(list(n, key, value)?),
            "m_sizes" => raw.m_sizes = Some(list(n, key, value)?),
            "graph" => raw.graph = Some(path()),
            "labels" => raw.labels = Some(path()),
            "col_labels" => raw.col_labels = Some(path()),
            "dim" => cfg.dim = scalar(n, key, value)?,
            "alpha" => cfg.alphas = list(n, key, value)?,
            "alpha_mode" => {
                cfg.alpha_mode = match value {
                    "relative" => AlphaMode::Relative,
                    "absolute" => AlphaMode::Absolute,
                    _ => return Err(err(n, format!("unknown alpha_mode {value:?}"))),
                }
            }
            "k" => {
                cfg.k = match value {
                    "truth" => KPolicy::Truth,
                    "truth/2" => KPolicy::HalfTruth,
                    _ => KPolicy::Fixed(scalar(n, key, value)?),
                }
            }
            "noise" => cfg.noise = list(n, key, value)?,
            "noise_weight" => cfg.noise_weight = scalar(n, key, value)?,
            "seed" => cfg.seed = scalar(n, key, value)?,
            "repeats" => cfg.repeats = scalar(n, key, value)?,
            "skip_first" => cfg.skip_first = flag(n, key, value)?,
            "isolated" => {
                cfg.isolated =
                    parse_isolated(value).ok_or_else(|| err(n, format!("unknown policy {value:?}")))?
            }
            "targets" => {
                cfg.targets = value
                    .split(',')
                    .map(|t| {
                        parse_target(t.trim()).ok_or_else(|| err(n, format!("unknown target {t:?}")))
                    })
                    .collect::<Result<_>>()?
            }
            "n_init" => cfg.n_init = scalar(n, key, value)?,
            "tol" => cfg.tol = scalar(n, key, value)?,
            _ => return Err(err(n, format!("unknown key {key:?}"))),
        }
    }
    cfg.dataset = dataset(raw)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = crate::io::read(path)?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

fn required<T>(v: Option<T>, key: &str, model: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("model {model} needs {key}")))
}

fn dataset(raw: Raw) -> Result<Dataset> {
    let model = raw.model.as_deref().unwrap_or("sbm");
    Ok(match model {
        "sbm" => match raw.sizes {
            None => Dataset::Sbm(SbmSpec::benchmark()),
            Some(sizes) => {
                let mut p_in = required(raw.p_in, "p_in", model)?;
                if p_in.len() == 1 {
                    p_in = vec![p_in[0]; sizes.len()];
                }
                Dataset::Sbm(SbmSpec {
                    sizes,
                    p_in,
                    p_out: required(raw.p_out, "p_out", model)?,
                })
            }
        },
        "cliques" => Dataset::Cliques {
            sizes: required(raw.sizes, "sizes", model)?,
            eps: raw.eps,
        },
        "bipartite" => Dataset::BipartiteBlocks {
            n_sizes: required(raw.n_sizes, "n_sizes", model)?,
            m_sizes: required(raw.m_sizes, "m_sizes", model)?,
        },
        "file" => Dataset::File {
            graph: required(raw.graph, "graph", model)?,
            labels: required(raw.labels, "labels", model)?,
        },
        "bipartite_file" => Dataset::BipartiteFile {
            graph: required(raw.graph, "graph", model)?,
            row_labels: required(raw.labels, "labels", model)?,
            col_labels: required(raw.col_labels, "col_labels", model)?,
        },
        _ => return Err(Error::Config(format!("unknown model {model:?}"))),
    })
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.alphas.is_empty() {
            return bad("alpha list is empty");
        }
        if self.alphas.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return bad("alpha values must be finite and nonnegative");
        }
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.repeats == 0 {
            return bad("repeats must be at least 1");
        }
        if self.n_init == 0 {
            return bad("n_init must be at least 1");
        }
        if self.k == KPolicy::Fixed(0) {
            return bad("k must be at least 1");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        match self.kind {
            ExperimentKind::NoiseSweep => {
                if self.noise.is_empty() {
                    return bad("noise list is empty");
                }
                if self.noise.iter().any(|f| !(*f >= 0.0) || !f.is_finite()) {
                    return bad("noise fractions must be finite and nonnegative");
                }
                if !(self.noise_weight > 0.0) || !self.noise_weight.is_finite() {
                    return bad("noise_weight must be positive");
                }
                if self.dataset.is_bipartite() {
                    return bad("noise_sweep needs a unipartite model");
                }
            }
            ExperimentKind::Bipartite => {
                if !self.dataset.is_bipartite() {
                    return bad("the bipartite experiment needs a bipartite model");
                }
                if self.targets.is_empty() {
                    return bad("targets list is empty");
                }
            }
            ExperimentKind::AlphaSweep | ExperimentKind::Toy => {}
        }
        Ok(())
    }
}
