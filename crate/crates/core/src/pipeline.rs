//! Embed, cluster and score in one call.

use crate::clustering::{kmeans, KMeansConfig, KMeansResult};
use crate::embedding::{bipartite_spectral_embedding, spectral_embedding, Embedding, EmbeddingConfig};
use crate::error::Result;
use crate::graph::{bipartite_to_adjacency, BipartiteGraph, Labels, SparseGraph};
use crate::metrics::{evaluate_all, MetricRecord};

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub embedding: Embedding,
    pub clustering: KMeansResult,
    pub metrics: MetricRecord,
}

/// Scores are restricted to `mask` when given; clustering always sees every node.
pub fn run_graph(
    g: &SparseGraph,
    truth: &Labels,
    embedding: &EmbeddingConfig,
    clustering: &KMeansConfig,
    mask: Option<&[bool]>,
) -> Result<PipelineOutcome> {
    let embedding = spectral_embedding(g, embedding)?;
    let clustering = kmeans(&embedding.coordinates, clustering)?;
    let metrics = evaluate_all(g, &clustering.labels, truth, mask)?;
    Ok(PipelineOutcome {
        embedding,
        clustering,
        metrics,
    })
}

/// Clusters both parts together; `truth` covers the rows and then the
/// columns, and modularity is taken on the `(n+m)`-node graph.
pub fn run_bipartite(
    b: &BipartiteGraph,
    truth: &Labels,
    embedding: &EmbeddingConfig,
    clustering: &KMeansConfig,
) -> Result<PipelineOutcome> {
    let embedding = bipartite_spectral_embedding(b, embedding)?;
    let clustering = kmeans(&embedding.coordinates, clustering)?;
    let metrics = evaluate_all(&bipartite_to_adjacency(b), &clustering.labels, truth, None)?;
    Ok(PipelineOutcome {
        embedding,
        clustering,
        metrics,
    })
}
