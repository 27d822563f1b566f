//! Regularized spectral embedding of graphs and bipartite graphs.
//!
//! The regularized adjacency `A + αJ` (or `A + αθθᵀ`) is never formed: it is
//! applied as a CSR product plus a rank-one correction, and the bottom
//! generalized eigenpairs of `L_α x = λ D_α x` are obtained from a Lanczos
//! solver on the symmetric normalized operator `D_α^{-1/2} A_α D_α^{-1/2}`.
//!
//! Besides the solver the crate carries the closed-form machinery for clique
//! block models (aggregation, eigenvalue thresholds, the secular equation,
//! sign-based block recovery), random and deterministic block model
//! generators, k-means and the clustering scores used to evaluate
//! embeddings.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and the experiment harness live in the `specreg` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clustering;
pub mod eigensolve;
pub mod embedding;
pub mod error;
pub mod generators;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod theory;

pub use clustering::{kmeans, KMeansConfig, KMeansResult};
pub use eigensolve::{
    lanczos_extreme, regularized_gsvd, smallest_generalized_eigenpairs, EigenPairs, EigenResult,
    Gsvd, LanczosConfig, LinearOperator, RegularizedOperator, SingularDegree, SolverConfig, Which,
};
pub use embedding::{
    bipartite_spectral_embedding, spectral_embedding, AlphaMode, Embedding, EmbeddingConfig,
    EmbeddingWarning, RegularizationTarget,
};
pub use error::{Error, Result};
pub use generators::{
    bipartite_block_model, clique_block_model, clique_block_model_eps, degree_corrected_model,
    sbm, BlockSpec, SbmSpec,
};
pub use graph::{
    add_noise_nodes, bipartite_to_adjacency, degrees, relative_to_absolute_alpha, total_weight,
    BipartiteGraph, Labels, SparseGraph,
};
pub use linalg::Matrix;
pub use metrics::{evaluate_all, MetricRecord};
