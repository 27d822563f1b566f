//! Spectral embeddings of graphs and bipartite graphs.

use alloc::vec::Vec;

use crate::eigensolve::{
    regularized_gsvd, smallest_generalized_eigenpairs, RegularizedOperator, SingularDegree,
    SolverConfig,
};
use crate::error::{invalid, Result};
use crate::graph::{bipartite_to_adjacency, relative_to_absolute_alpha, BipartiteGraph, SparseGraph};
use crate::linalg::Matrix;

/// How the configured `alpha` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaMode {
    /// Used as is.
    Absolute,
    /// Multiplied by the mean entry of the adjacency matrix, `w / n²`
    /// (`ΣB / (n m)` for a regularized biadjacency matrix).
    #[default]
    Relative,
}

/// Where the bipartite regularization goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegularizationTarget {
    /// `B + αJ`, keeps the graph bipartite.
    #[default]
    Biadjacency,
    /// `A + αJ` on the `(n+m)`-node adjacency matrix.
    Adjacency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingConfig {
    pub dim: usize,
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
    /// Degree-correction weights for `A + αθθᵀ`; graph embeddings only.
    pub theta: Option<Vec<f64>>,
    /// Drop the trivial `λ = 0` eigenvector.
    pub skip_first: bool,
    pub target: RegularizationTarget,
    pub solver: SolverConfig,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dim: 20,
            alpha: 1.0,
            alpha_mode: AlphaMode::Relative,
            theta: None,
            skip_first: true,
            target: RegularizationTarget::Biadjacency,
            solver: SolverConfig::default(),
        }
    }
}

impl EmbeddingConfig {
    pub fn absolute(dim: usize, alpha: f64) -> Self {
        Self {
            dim,
            alpha,
            alpha_mode: AlphaMode::Absolute,
            ..Self::default()
        }
    }

    pub fn relative(dim: usize, alpha_rel: f64) -> Self {
        Self {
            dim,
            alpha: alpha_rel,
            ..Self::default()
        }
    }

    pub fn skip_first(mut self, skip: bool) -> Self {
        self.skip_first = skip;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.solver.lanczos.seed = seed;
        self
    }

    pub fn with_singular(mut self, policy: SingularDegree) -> Self {
        self.solver.singular = policy;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingWarning {
    /// No regularization on a graph with several components: the bottom of
    /// the spectrum is a degenerate nullspace and the basis is arbitrary.
    UnregularizedDisconnected { components: usize },
    /// Nodes with zero degree were embedded under a non-rejecting policy.
    IsolatedNodes { count: usize },
}

#[derive(Debug, Clone)]
pub struct Embedding {
    /// One row per node; bipartite embeddings stack the first part on top.
    pub coordinates: Matrix,
    /// Ascending, one per column.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Absolute regularization actually applied.
    pub alpha: f64,
    pub skip_first: bool,
    /// Rows of the first part for bipartite embeddings.
    pub part_boundary: Option<usize>,
    pub warnings: Vec<EmbeddingWarning>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.coordinates.cols()
    }

    pub fn node_count(&self) -> usize {
        self.coordinates.rows()
    }
}

/// Makes the entry of largest magnitude in every column positive.
pub fn normalize_signs(x: &mut Matrix) {
    for j in 0..x.cols() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for i in 0..x.rows() {
            let v = x[(i, j)];
            if libm::fabs(v) > best {
                best = libm::fabs(v);
                sign = if v < 0.0 { -1.0 } else { 1.0 };
            }
        }
        if sign < 0.0 {
            for i in 0..x.rows() {
                x[(i, j)] = -x[(i, j)];
            }
        }
    }
}

fn check_dim(dim: usize, skip_first: bool, limit: usize) -> Result<usize> {
    if dim == 0 {
        return Err(invalid("embedding dimension must be at least 1"));
    }
    let solve = dim + usize::from(skip_first);
    if solve > limit {
        return Err(invalid(alloc::format!(
            "embedding dimension {dim} needs {solve} eigenpairs but only {limit} exist"
        )));
    }
    Ok(solve)
}

fn finish(
    vectors: Matrix,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
    skip_first: bool,
) -> (Matrix, Vec<f64>, Vec<f64>) {
    let first = usize::from(skip_first);
    let cols: Vec<usize> = (first..vectors.cols()).collect();
    let mut x = vectors.select_columns(&cols);
    normalize_signs(&mut x);
    (x, eigenvalues[first..].to_vec(), residuals[first..].to_vec())
}

/// Bottom generalized eigenvectors of the regularized graph.
pub fn spectral_embedding(g: &SparseGraph, cfg: &EmbeddingConfig) -> Result<Embedding> {
    let solve = check_dim(cfg.dim, cfg.skip_first, g.node_count())?;
    let alpha = match cfg.alpha_mode {
        AlphaMode::Absolute => cfg.alpha,
        AlphaMode::Relative => relative_to_absolute_alpha(cfg.alpha, g)?,
    };
    let op = match &cfg.theta {
        None => RegularizedOperator::new(g, alpha)?,
        Some(theta) => RegularizedOperator::with_theta(g, alpha, theta.clone())?,
    };
    let mut warnings = Vec::new();
    if alpha == 0.0 {
        let (components, _) = g.connected_components();
        if components > 1 {
            warnings.push(EmbeddingWarning::UnregularizedDisconnected { components });
        }
    }
    let isolated = op.zero_degree_nodes().len();
    if isolated > 0 && cfg.solver.singular != SingularDegree::Reject {
        warnings.push(EmbeddingWarning::IsolatedNodes { count: isolated });
    }
    let r = smallest_generalized_eigenpairs(&op, solve, &cfg.solver)?;
    let (coordinates, eigenvalues, residuals) =
        finish(r.vectors, r.eigenvalues, r.residuals, cfg.skip_first);
    Ok(Embedding {
        coordinates,
        eigenvalues,
        residuals,
        alpha,
        skip_first: cfg.skip_first,
        part_boundary: None,
        warnings,
    })
}

/// Stacked embedding of both parts of a bipartite graph.
///
/// With [`RegularizationTarget::Biadjacency`] the columns come from the
/// generalized SVD of `B + αJ` and `λ = 1 - σ`; each part is scaled by
/// `1/√2` so the stacked matrix is `D_α`-orthonormal like any graph
/// embedding. With [`RegularizationTarget::Adjacency`] the graph is embedded
/// as an `(n+m)`-node graph regularized with `αJ`.
pub fn bipartite_spectral_embedding(
    b: &BipartiteGraph,
    cfg: &EmbeddingConfig,
) -> Result<Embedding> {
    if cfg.theta.is_some() {
        return Err(invalid("degree correction is not supported for bipartite embeddings"));
    }
    let (n, m) = (b.left_count(), b.right_count());
    match cfg.target {
        RegularizationTarget::Adjacency => {
            let a = bipartite_to_adjacency(b);
            let mut e = spectral_embedding(&a, cfg)?;
            e.part_boundary = Some(n);
            Ok(e)
        }
        RegularizationTarget::Biadjacency => {
            let solve = check_dim(cfg.dim, cfg.skip_first, n.min(m))?;
            let alpha = match cfg.alpha_mode {
                AlphaMode::Absolute => cfg.alpha,
                AlphaMode::Relative => {
                    if n == 0 || m == 0 {
                        return Err(crate::error::Error::EmptyGraph);
                    }
                    cfg.alpha * b.total_weight() / (n as f64 * m as f64)
                }
            };
            let mut warnings = Vec::new();
            if alpha == 0.0 {
                let (components, _) = bipartite_to_adjacency(b).connected_components();
                if components > 1 {
                    warnings.push(EmbeddingWarning::UnregularizedDisconnected { components });
                }
                if cfg.solver.singular == SingularDegree::PseudoInverse {
                    let isolated = b.left_degrees().iter().chain(&b.right_degrees()).filter(|&&d| d <= 0.0).count();
                    if isolated > 0 {
                        warnings.push(EmbeddingWarning::IsolatedNodes { count: isolated });
                    }
                }
            }
            let r = regularized_gsvd(b, alpha, solve, &cfg.solver)?;
            let h = core::f64::consts::FRAC_1_SQRT_2;
            let mut stacked = Matrix::zeros(n + m, solve);
            for j in 0..solve {
                for i in 0..n {
                    stacked[(i, j)] = h * r.left[(i, j)];
                }
                for i in 0..m {
                    stacked[(n + i, j)] = h * r.right[(i, j)];
                }
            }
            let eigenvalues = r.sigmas.iter().map(|s| (1.0 - s).max(0.0)).collect();
            let (coordinates, eigenvalues, residuals) =
                finish(stacked, eigenvalues, r.residuals, cfg.skip_first);
            Ok(Embedding {
                coordinates,
                eigenvalues,
                residuals,
                alpha,
                skip_first: cfg.skip_first,
                part_boundary: Some(n),
                warnings,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{bipartite_block_model, clique_block_model, BlockSpec};
    use alloc::vec;

    #[test]
    fn constant_column_without_skip() {
        let g = SparseGraph::from_edges(5, (0..4).map(|i| (i, i + 1, 1.0))).unwrap();
        let e = spectral_embedding(&g, &EmbeddingConfig::absolute(1, 0.0).skip_first(false)).unwrap();
        let c = e.coordinates.column(0);
        assert!(e.eigenvalues[0].abs() < 1e-10);
        assert!(c.iter().all(|v| (v - c[0]).abs() < 1e-10 && *v > 0.0));
    }

    #[test]
    fn toy_block_values() {
        let (g, _) = clique_block_model(&BlockSpec::new(vec![5, 3, 2]).unwrap()).unwrap();
        let e = spectral_embedding(&g, &EmbeddingConfig::absolute(1, 1.0)).unwrap();
        let x = e.coordinates.column(0);
        let expect = [-0.0756, 0.1143, 0.0507];
        for (i, v) in x.iter().enumerate() {
            let block = if i < 5 { 0 } else if i < 8 { 1 } else { 2 };
            assert!((v - expect[block]).abs() < 1e-3, "{x:?}");
        }
    }

    #[test]
    fn relative_alpha_conversion_is_recorded() {
        let (g, _) = clique_block_model(&BlockSpec::new(vec![5, 3, 2]).unwrap()).unwrap();
        let e = spectral_embedding(&g, &EmbeddingConfig::relative(2, 1.0)).unwrap();
        assert!((e.alpha - 0.38).abs() < 1e-12);
    }

    #[test]
    fn isolated_nodes_need_opt_in() {
        let g = SparseGraph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(spectral_embedding(&g, &EmbeddingConfig::absolute(1, 0.0)).is_err());
        let cfg = EmbeddingConfig::absolute(1, 0.0).with_singular(SingularDegree::PseudoInverse);
        let e = spectral_embedding(&g, &cfg).unwrap();
        assert!(e.warnings.contains(&EmbeddingWarning::IsolatedNodes { count: 1 }));
        assert!(e.warnings.contains(&EmbeddingWarning::UnregularizedDisconnected { components: 2 }));
    }

    #[test]
    fn dimension_limits() {
        let (g, _) = clique_block_model(&BlockSpec::new(vec![2, 1]).unwrap()).unwrap();
        assert!(spectral_embedding(&g, &EmbeddingConfig::absolute(0, 1.0)).is_err());
        assert!(spectral_embedding(&g, &EmbeddingConfig::absolute(3, 1.0)).is_err());
        assert!(spectral_embedding(&g, &EmbeddingConfig::absolute(2, 1.0)).is_ok());
    }

    #[test]
    fn bipartite_one_by_one() {
        let (b, _, _) = bipartite_block_model(&[1], &[1]).unwrap();
        let e = bipartite_spectral_embedding(&b, &EmbeddingConfig::absolute(1, 0.0).skip_first(false)).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-12);
        assert!((e.coordinates[(0, 0)] - e.coordinates[(1, 0)]).abs() < 1e-12);
        assert_eq!(e.part_boundary, Some(1));
    }

    #[test]
    fn bipartite_modes_agree_on_trivial_pair() {
        let (b, _, _) = bipartite_block_model(&[3, 2], &[3, 2]).unwrap();
        for target in [RegularizationTarget::Biadjacency, RegularizationTarget::Adjacency] {
            let cfg = EmbeddingConfig {
                target,
                ..EmbeddingConfig::absolute(1, 1.0)
            };
            let e = bipartite_spectral_embedding(&b, &cfg).unwrap();
            assert!(e.eigenvalues[0] > 0.0 && e.eigenvalues[0] < 1.0);
            assert_eq!(e.node_count(), 10);
        }
    }

    #[test]
    fn sign_convention() {
        let mut x = Matrix::from_row_major(3, 2, alloc::vec![1.0, 0.5, -3.0, -0.5, 2.0, 0.1]).unwrap();
        normalize_signs(&mut x);
        assert_eq!(x.column(0), [-1.0, 3.0, -2.0]);
        assert_eq!(x.column(1), [0.5, -0.5, 0.1]);
    }
}
