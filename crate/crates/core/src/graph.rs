//! Undirected weighted graphs and bipartite graphs in CSR form, plus ground
//! truth labels.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Undirected weighted graph stored as a symmetric CSR matrix.
///
/// Weights are strictly positive. Column indices are sorted within each row
/// and the structure is symmetric: `(i, j)` is stored iff `(j, i)` is, with
/// the same weight. A self-loop is a single diagonal entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseGraph {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseGraph {
    /// Builds a graph from undirected edges. An edge `(i, j, w)` with
    /// `i != j` contributes `w` to both `(i, j)` and `(j, i)`; a self-loop
    /// contributes `w` once. Duplicate edges are summed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut triplets = Vec::new();
        for (i, j, w) in edges {
            check_index(i, n)?;
            check_index(j, n)?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeight {
                    row: i,
                    col: j,
                    weight: w,
                });
            }
            triplets.push((i, j, w));
            if i != j {
                triplets.push((j, i, w));
            }
        }
        Ok(Self::from_sorted_triplets(n, triplets))
    }

    /// Builds a graph from a dense symmetric matrix, dropping zero entries.
    pub fn from_dense(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.cols(),
            });
        }
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let w = a[(i, j)];
                if w == 0.0 {
                    continue;
                }
                if !(w > 0.0) || !w.is_finite() {
                    return Err(Error::InvalidWeight {
                        row: i,
                        col: j,
                        weight: w,
                    });
                }
                if a[(j, i)] != w {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                triplets.push((i, j, w));
            }
        }
        Ok(Self::from_sorted_triplets(n, triplets))
    }

    /// Wraps raw CSR arrays after checking every invariant.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        check_csr(n, n, &row_offsets, &col_indices, &values)?;
        for (k, &w) in values.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                let row = row_offsets.partition_point(|&o| o <= k) - 1;
                return Err(Error::InvalidWeight {
                    row,
                    col: col_indices[k],
                    weight: w,
                });
            }
        }
        let g = Self {
            n,
            row_offsets,
            col_indices,
            values,
        };
        for i in 0..n {
            let (cols, vals) = g.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                if g.get(j, i) != w {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(g)
    }

    fn from_sorted_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let (row_offsets, col_indices, values) = compress(n, triplets);
        Self {
            n,
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of stored entries (each undirected edge twice, loops once).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    /// Entry `(i, j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &w)| w * x[j]).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Undirected edges `(i, j, w)` with `i <= j`, each listed once.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .filter(move |(&j, _)| j >= i)
                .map(move |(&j, &w)| (i, j, w))
        })
    }

    /// Subgraph induced by `nodes`, renumbered in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<SparseGraph> {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            check_index(old, self.n)?;
            map[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_i, &old_i) in nodes.iter().enumerate() {
            let (cols, vals) = self.row(old_i);
            for (&j, &w) in cols.iter().zip(vals) {
                if map[j] != usize::MAX {
                    triplets.push((new_i, map[j], w));
                }
            }
        }
        Ok(Self::from_sorted_triplets(nodes.len(), triplets))
    }

    pub fn to_dense(&self) -> Matrix {
        let mut a = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                a[(i, j)] = w;
            }
        }
        a
    }

    /// Scales every weight by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<SparseGraph> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("scale factor must be positive"));
        }
        let mut g = self.clone();
        for w in &mut g.values {
            *w *= c;
        }
        Ok(g)
    }

    /// Connected components as a per-node component id.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.row(u).0 {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }
}

/// Bipartite graph given by its `n × m` biadjacency matrix in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    n: usize,
    m: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl BipartiteGraph {
    /// Left indices in `0..n`, right indices in `0..m`. Duplicates are
    /// summed and zero weights dropped.
    pub fn from_edges<I>(n: usize, m: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut triplets = Vec::new();
        for (i, j, w) in edges {
            check_index(i, n)?;
            check_index(j, m)?;
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidWeight {
                    row: i,
                    col: j,
                    weight: w,
                });
            }
            if w > 0.0 {
                triplets.push((i, j, w));
            }
        }
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let (row_offsets, col_indices, values) = compress(n, triplets);
        Ok(Self {
            n,
            m,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn left_count(&self) -> usize {
        self.n
    }

    pub fn right_count(&self) -> usize {
        self.m
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `D_1 = diag(B 1_m)`
    pub fn left_degrees(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).1.iter().sum()).collect()
    }

    /// `D_2 = diag(Bᵀ 1_n)`
    pub fn right_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.m];
        for (&j, &w) in self.col_indices.iter().zip(&self.values) {
            d[j] += w;
        }
        d
    }

    pub fn total_weight(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `y = B x`, `x` of length `m`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &w)| w * x[j]).sum();
        }
    }

    /// `y = Bᵀ x`, `x` of length `n`.
    pub fn matvec_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                y[j] += w * xi;
            }
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &w)| (i, j, w))
        })
    }

    pub fn to_dense(&self) -> Matrix {
        let mut b = Matrix::zeros(self.n, self.m);
        for (i, j, w) in self.edges() {
            b[(i, j)] = w;
        }
        b
    }
}

/// Per-node block assignment in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    assignments: Vec<usize>,
    k: usize,
}

impl Labels {
    pub fn new(assignments: Vec<usize>, k: usize) -> Result<Self> {
        if let Some((node, &a)) = assignments.iter().enumerate().find(|(_, &a)| a >= k) {
            return Err(invalid(alloc::format!(
                "label {a} of node {node} is not below k = {k}"
            )));
        }
        Ok(Self { assignments, k })
    }

    /// `k` is one past the largest assignment.
    pub fn from_assignments(assignments: Vec<usize>) -> Self {
        let k = assignments.iter().max().map_or(0, |&m| m + 1);
        Self { assignments, k }
    }

    /// Labels for consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let assignments = sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &s)| core::iter::repeat_n(b, s))
            .collect();
        Self {
            assignments,
            k: sizes.len(),
        }
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Block sizes, including empty blocks.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &a in &self.assignments {
            s[a] += 1;
        }
        s
    }

    /// Members of each block.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &a) in self.assignments.iter().enumerate() {
            m[a].push(i);
        }
        m
    }

    /// Keeps the nodes where `mask` is true; `k` is unchanged.
    pub fn restrict(&self, mask: &[bool]) -> Result<Labels> {
        if mask.len() != self.len() {
            return Err(Error::LengthMismatch {
                left: mask.len(),
                right: self.len(),
            });
        }
        let assignments = self
            .assignments
            .iter()
            .zip(mask)
            .filter(|(_, &keep)| keep)
            .map(|(&a, _)| a)
            .collect();
        Ok(Labels {
            assignments,
            k: self.k,
        })
    }

    /// Appends `count` nodes all assigned to a fresh extra label.
    pub fn with_extra_block(&self, count: usize) -> Labels {
        let mut assignments = self.assignments.clone();
        assignments.extend(core::iter::repeat_n(self.k, count));
        Labels {
            assignments,
            k: self.k + 1,
        }
    }
}

pub fn degrees(g: &SparseGraph) -> Vec<f64> {
    g.degrees()
}

/// `1ᵀ A 1`
pub fn total_weight(g: &SparseGraph) -> f64 {
    g.total_weight()
}

/// Converts a relative regularization `α_rel` to the absolute `α_rel · w / n²`.
pub fn relative_to_absolute_alpha(alpha_rel: f64, g: &SparseGraph) -> Result<f64> {
    if !(alpha_rel >= 0.0) || !alpha_rel.is_finite() {
        return Err(invalid("alpha must be nonnegative"));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = n as f64;
    Ok(alpha_rel * g.total_weight() / (n * n))
}

/// Appends `⌈fraction · n⌉` isolated nodes, each carrying a single self-loop
/// of weight `self_loop_weight`. Returns the new graph and the range of the
/// added node indices; original nodes keep their indices.
pub fn add_noise_nodes(
    g: &SparseGraph,
    fraction: f64,
    self_loop_weight: f64,
) -> Result<(SparseGraph, Range<usize>)> {
    if !(fraction >= 0.0) || !fraction.is_finite() {
        return Err(invalid("noise fraction must be nonnegative"));
    }
    if !(self_loop_weight > 0.0) || !self_loop_weight.is_finite() {
        return Err(invalid("self-loop weight must be positive"));
    }
    let n = g.node_count();
    // absorb representation error of e.g. 0.1 * 30
    let added = libm::ceil(fraction * n as f64 - 1e-9).max(0.0) as usize;
    let mut row_offsets = g.row_offsets.clone();
    let mut col_indices = g.col_indices.clone();
    let mut values = g.values.clone();
    for i in n..n + added {
        col_indices.push(i);
        values.push(self_loop_weight);
        row_offsets.push(col_indices.len());
    }
    let noisy = SparseGraph {
        n: n + added,
        row_offsets,
        col_indices,
        values,
    };
    Ok((noisy, n..n + added))
}

/// The `(n + m)`-node graph with adjacency `[0 B; Bᵀ 0]`.
pub fn bipartite_to_adjacency(b: &BipartiteGraph) -> SparseGraph {
    let n = b.n;
    let mut triplets = Vec::with_capacity(2 * b.nnz());
    for (i, j, w) in b.edges() {
        triplets.push((i, n + j, w));
        triplets.push((n + j, i, w));
    }
    SparseGraph::from_sorted_triplets(n + b.m, triplets)
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        Err(Error::IndexOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

// Sorted triplets to CSR, summing duplicates.
fn compress(n: usize, triplets: Vec<(usize, usize, f64)>) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
    let mut row_offsets = vec![0usize; n + 1];
    let mut col_indices: Vec<usize> = Vec::with_capacity(triplets.len());
    let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
    let mut last: Option<(usize, usize)> = None;
    for (i, j, w) in triplets {
        if last == Some((i, j)) {
            *values.last_mut().unwrap() += w;
            continue;
        }
        last = Some((i, j));
        col_indices.push(j);
        values.push(w);
        row_offsets[i + 1] += 1;
    }
    for i in 0..n {
        row_offsets[i + 1] += row_offsets[i];
    }
    (row_offsets, col_indices, values)
}

fn check_csr(
    rows: usize,
    cols: usize,
    row_offsets: &[usize],
    col_indices: &[usize],
    values: &[f64],
) -> Result<()> {
    if row_offsets.len() != rows + 1 {
        return Err(Error::MalformedCsr(alloc::format!(
            "row_offsets has length {}, expected {}",
            row_offsets.len(),
            rows + 1
        )));
    }
    if row_offsets[0] != 0 || row_offsets.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::MalformedCsr("row_offsets not monotone from 0".into()));
    }
    let nnz = row_offsets[rows];
    if col_indices.len() != nnz || values.len() != nnz {
        return Err(Error::MalformedCsr(alloc::format!(
            "expected {nnz} entries, got {} indices and {} values",
            col_indices.len(),
            values.len()
        )));
    }
    for i in 0..rows {
        let r = &col_indices[row_offsets[i]..row_offsets[i + 1]];
        if let Some(&j) = r.iter().find(|&&j| j >= cols) {
            return Err(Error::IndexOutOfRange { index: j, n: cols });
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedCsr(alloc::format!(
                "row {i} columns not strictly increasing"
            )));
        }
    }
    Ok(())
}
