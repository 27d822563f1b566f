//! Block model generators with ground-truth labels.
//!
//! Random instances use `ChaCha8Rng::seed_from_u64(seed)` and draw exactly one
//! `f64` per unordered pair, visiting pairs row-major over `i < j`, so a seed
//! pins the instance independently of platform.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{BipartiteGraph, Labels, SparseGraph};
use crate::linalg::Matrix;

/// Default node cap for [`clique_block_model_eps`].
pub const DENSE_NODE_CAP: usize = 2000;

/// Block sizes with optional degree correction and inter-block weight.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSpec {
    sizes: Vec<usize>,
    theta: Option<Vec<f64>>,
    eps: Option<f64>,
}

impl BlockSpec {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(invalid("at least one block is required"));
        }
        if let Some(b) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyBlock(b));
        }
        Ok(Self {
            sizes,
            theta: None,
            eps: None,
        })
    }

    /// Per-node degree-correction weights, all strictly positive.
    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.node_count() {
            return Err(Error::LengthMismatch {
                left: theta.len(),
                right: self.node_count(),
            });
        }
        if let Some(i) = theta.iter().position(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(invalid(alloc::format!("theta[{i}] must be positive")));
        }
        self.theta = Some(theta);
        Ok(self)
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid("eps must be nonnegative"));
        }
        self.eps = Some(eps);
        Ok(self)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn labels(&self) -> Labels {
        Labels::from_sizes(&self.sizes)
    }
}

/// Disjoint cliques: `A = ZZᵀ`, self-loops included.
pub fn clique_block_model(spec: &BlockSpec) -> Result<(SparseGraph, Labels)> {
    if spec.theta.is_some() || spec.eps.is_some() {
        return Err(invalid(
            "clique_block_model takes plain sizes; use the eps or degree-corrected variants",
        ));
    }
    block_model(spec.sizes(), |_, _| 1.0)
}

/// `A = ZZᵀ + εJ`, materialized densely. Refuses graphs above `node_cap`
/// nodes; for larger instances regularize with `α + ε` instead.
pub fn clique_block_model_eps(spec: &BlockSpec, node_cap: usize) -> Result<(SparseGraph, Labels)> {
    let eps = spec.eps.unwrap_or(0.0);
    if spec.theta.is_some() {
        return Err(invalid("eps model does not take theta"));
    }
    if eps == 0.0 {
        return block_model(spec.sizes(), |_, _| 1.0);
    }
    let n = spec.node_count();
    if n > node_cap {
        return Err(Error::TooLarge { n, cap: node_cap });
    }
    let labels = spec.labels();
    let z = labels.assignments();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = if z[i] == z[j] { 1.0 + eps } else { eps };
        }
    }
    Ok((SparseGraph::from_dense(&a)?, labels))
}

/// `A_ij = θ_i θ_j` within blocks, zero across.
pub fn degree_corrected_model(spec: &BlockSpec) -> Result<(SparseGraph, Labels)> {
    let theta = spec
        .theta
        .as_deref()
        .ok_or_else(|| invalid("degree-corrected model needs theta"))?;
    if spec.eps.is_some() {
        return Err(invalid("degree-corrected model does not take eps"));
    }
    block_model(spec.sizes(), |i, j| theta[i] * theta[j])
}

fn block_model(
    sizes: &[usize],
    weight: impl Fn(usize, usize) -> f64,
) -> Result<(SparseGraph, Labels)> {
    let n: usize = sizes.iter().sum();
    let mut edges = Vec::new();
    let mut start = 0;
    for &s in sizes {
        for i in start..start + s {
            for j in i..start + s {
                edges.push((i, j, weight(i, j)));
            }
        }
        start += s;
    }
    Ok((SparseGraph::from_edges(n, edges)?, Labels::from_sizes(sizes)))
}

/// Parameters of a stochastic block model.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub sizes: Vec<usize>,
    /// Intra-block edge probability, one per block.
    pub p_in: Vec<f64>,
    pub p_out: f64,
}

impl SbmSpec {
    /// 100 blocks of 20 nodes; intra-block probability 0.5 for the first 50
    /// blocks and 0.05 for the rest; inter-block probability 0.001.
    pub fn benchmark() -> Self {
        let mut p_in = vec![0.5; 50];
        p_in.extend(core::iter::repeat_n(0.05, 50));
        Self {
            sizes: vec![20; 100],
            p_in,
            p_out: 0.001,
        }
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Expected number of undirected edges.
    pub fn expected_edges(&self) -> f64 {
        let n = self.node_count() as f64;
        let mut within_pairs = 0.0;
        let mut within = 0.0;
        for (&s, &p) in self.sizes.iter().zip(&self.p_in) {
            let pairs = (s * s.saturating_sub(1) / 2) as f64;
            within_pairs += pairs;
            within += p * pairs;
        }
        let across = n * (n - 1.0) / 2.0 - within_pairs;
        within + self.p_out * across
    }

    /// Variance of the edge count (sum of independent Bernoulli pairs).
    pub fn edge_variance(&self) -> f64 {
        let n = self.node_count() as f64;
        let mut within_pairs = 0.0;
        let mut var = 0.0;
        for (&s, &p) in self.sizes.iter().zip(&self.p_in) {
            let pairs = (s * s.saturating_sub(1) / 2) as f64;
            within_pairs += pairs;
            var += p * (1.0 - p) * pairs;
        }
        let across = n * (n - 1.0) / 2.0 - within_pairs;
        var + self.p_out * (1.0 - self.p_out) * across
    }
}

/// Samples an unweighted SBM without self-loops. Each unordered pair is an
/// independent Bernoulli draw with `p_in[b]` inside block `b` and `p_out`
/// across blocks.
pub fn sbm(spec: &SbmSpec, seed: u64) -> Result<(SparseGraph, Labels)> {
    if spec.p_in.len() != spec.sizes.len() {
        return Err(Error::LengthMismatch {
            left: spec.p_in.len(),
            right: spec.sizes.len(),
        });
    }
    if let Some(b) = spec.sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyBlock(b));
    }
    let valid = |p: f64| (0.0..=1.0).contains(&p);
    if !spec.p_in.iter().all(|&p| valid(p)) || !valid(spec.p_out) {
        return Err(invalid("probabilities must lie in [0, 1]"));
    }
    let labels = Labels::from_sizes(&spec.sizes);
    let z = labels.assignments();
    let n = z.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if z[i] == z[j] { spec.p_in[z[i]] } else { spec.p_out };
            let u: f64 = rng.random();
            if u < p {
                edges.push((i, j, 1.0));
            }
        }
    }
    Ok((SparseGraph::from_edges(n, edges)?, labels))
}

/// Block-diagonal biadjacency `B = Z_1 Z_2ᵀ` with all-ones blocks.
pub fn bipartite_block_model(
    n_sizes: &[usize],
    m_sizes: &[usize],
) -> Result<(BipartiteGraph, Labels, Labels)> {
    if n_sizes.len() != m_sizes.len() {
        return Err(Error::LengthMismatch {
            left: n_sizes.len(),
            right: m_sizes.len(),
        });
    }
    if n_sizes.is_empty() {
        return Err(invalid("at least one block is required"));
    }
    if let Some(b) = n_sizes
        .iter()
        .zip(m_sizes)
        .position(|(&a, &b)| a == 0 || b == 0)
    {
        return Err(Error::EmptyBlock(b));
    }
    let n: usize = n_sizes.iter().sum();
    let m: usize = m_sizes.iter().sum();
    let mut edges = Vec::new();
    let (mut r0, mut c0) = (0, 0);
    for (&ns, &ms) in n_sizes.iter().zip(m_sizes) {
        for i in r0..r0 + ns {
            for j in c0..c0 + ms {
                edges.push((i, j, 1.0));
            }
        }
        r0 += ns;
        c0 += ms;
    }
    Ok((
        BipartiteGraph::from_edges(n, m, edges)?,
        Labels::from_sizes(n_sizes),
        Labels::from_sizes(m_sizes),
    ))
}
