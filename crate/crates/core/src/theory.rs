//! Closed forms for regularized block models.
//!
//! For a clique block model `A = ZZᵀ` with block sizes `n_1 > … > n_K` and
//! regularization `αJ`, the `K` smallest eigenvalues of the generalized
//! problem interleave the thresholds `μ_j = αn / (αn + n_j)` and the interior
//! ones are the roots of a secular equation. The corresponding eigenvectors
//! are constant on blocks and their signs split off the largest blocks.
//!
//! The dense checks here are validation tools and refuse graphs above
//! [`DENSE_CHECK_CAP`] nodes.

use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::Embedding;
use crate::error::{invalid, Error, Result};
use crate::graph::{BipartiteGraph, Labels, SparseGraph};
use crate::linalg::{generalized_diagonal_eigen, symmetric_eigen, Matrix};

pub const DENSE_CHECK_CAP: usize = 500;

/// Bisection tolerance on `λ` used by default.
pub const SECULAR_TOL: f64 = 1e-12;

const POLE_TOL: f64 = 1e-12;
const ENDPOINT_SHRINK: f64 = 1e-14;

/// `Ā = ZᵀAZ` and its degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub adjacency: Matrix,
    pub degrees: Vec<f64>,
}

impl Aggregate {
    /// `D̄ - Ā`
    pub fn laplacian(&self) -> Matrix {
        let mut l = self.adjacency.clone();
        for i in 0..l.rows() {
            for j in 0..l.cols() {
                l[(i, j)] = -l[(i, j)];
            }
            l[(i, i)] += self.degrees[i];
        }
        l
    }
}

fn check_labels(n: usize, labels: &Labels) -> Result<()> {
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: labels.len(),
        });
    }
    if let Some(b) = labels.sizes().iter().position(|&s| s == 0) {
        return Err(Error::EmptyBlock(b));
    }
    Ok(())
}

/// Sums the adjacency over pairs of blocks.
pub fn aggregate(g: &SparseGraph, labels: &Labels) -> Result<Aggregate> {
    check_labels(g.node_count(), labels)?;
    let k = labels.k();
    let z = labels.assignments();
    let mut a = Matrix::zeros(k, k);
    for i in 0..g.node_count() {
        let (cols, vals) = g.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            a[(z[i], z[j])] += v;
        }
    }
    let degrees = (0..k).map(|i| a.row(i).iter().sum()).collect();
    Ok(Aggregate {
        adjacency: a,
        degrees,
    })
}

/// `Zᵀ(A + αJ)Z = Ā + α W J W` with `W` the block sizes.
pub fn regularized_aggregate(g: &SparseGraph, labels: &Labels, alpha: f64) -> Result<Aggregate> {
    let mut agg = aggregate(g, labels)?;
    let sizes = labels.sizes();
    let n = g.node_count() as f64;
    for i in 0..sizes.len() {
        for j in 0..sizes.len() {
            agg.adjacency[(i, j)] += alpha * (sizes[i] * sizes[j]) as f64;
        }
        agg.degrees[i] += alpha * sizes[i] as f64 * n;
    }
    Ok(agg)
}

/// Outcome of comparing a full spectrum with the one predicted from the
/// aggregate graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCheck {
    /// Ascending.
    pub full: Vec<f64>,
    /// Ascending, padded.
    pub predicted: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

fn compare_spectra(mut full: Vec<f64>, mut predicted: Vec<f64>, tol: f64) -> SpectrumCheck {
    full.sort_by(f64::total_cmp);
    predicted.sort_by(f64::total_cmp);
    let max_deviation = full
        .iter()
        .zip(&predicted)
        .map(|(a, b)| libm::fabs(a - b))
        .fold(0.0, f64::max);
    let passed = full.len() == predicted.len() && max_deviation <= tol;
    SpectrumCheck {
        full,
        predicted,
        max_deviation,
        passed,
    }
}

fn dense_cap(n: usize) -> Result<()> {
    if n > DENSE_CHECK_CAP {
        return Err(Error::TooLarge {
            n,
            cap: DENSE_CHECK_CAP,
        });
    }
    Ok(())
}

// Every row equal to the first row of its block.
fn check_block_rows(a: &Matrix, labels: &Labels, tol: f64) -> Result<()> {
    let reps: Vec<usize> = labels.members().iter().map(|m| m[0]).collect();
    for i in 0..a.rows() {
        let r = reps[labels.assignments()[i]];
        let same = a
            .row(i)
            .iter()
            .zip(a.row(r))
            .all(|(x, y)| libm::fabs(x - y) <= tol * libm::fabs(*y).max(1.0));
        if !same {
            return Err(Error::NotABlockModel { node: i });
        }
    }
    Ok(())
}

fn rayleigh_to_laplacian(eig: &[f64]) -> Vec<f64> {
    eig.iter().map(|t| 1.0 - t).collect()
}

/// Full generalized spectrum of `A + αJ` (dense) against the aggregate
/// spectrum padded with `λ = 1`.
pub fn aggregate_eigen_check(
    g: &SparseGraph,
    labels: &Labels,
    alpha: f64,
    tol: f64,
) -> Result<SpectrumCheck> {
    let n = g.node_count();
    dense_cap(n)?;
    check_labels(n, labels)?;
    let mut a = g.to_dense();
    check_block_rows(&a, labels, tol)?;
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] += alpha;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a.row(i).iter().sum()).collect();
    let full = rayleigh_to_laplacian(&generalized_diagonal_eigen(&a, &d)?.values);

    let agg = regularized_aggregate(g, labels, alpha)?;
    let mut predicted =
        rayleigh_to_laplacian(&generalized_diagonal_eigen(&agg.adjacency, &agg.degrees)?.values);
    predicted.resize(n, 1.0);
    Ok(compare_spectra(full, predicted, tol))
}

// Singular values of a small dense matrix, descending.
fn dense_singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let (r, c) = (m.rows(), m.cols());
    let mut aug = Matrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            aug[(i, r + j)] = m[(i, j)];
            aug[(r + j, i)] = m[(i, j)];
        }
    }
    let mut values = symmetric_eigen(&aug)?.values;
    values.reverse();
    values.truncate(r.min(c));
    Ok(values.into_iter().map(|v| v.max(0.0)).collect())
}

fn normalized_biadjacency(b: &Matrix) -> Result<Matrix> {
    let (r, c) = (b.rows(), b.cols());
    let d1: Vec<f64> = (0..r).map(|i| b.row(i).iter().sum()).collect();
    let d2: Vec<f64> = (0..c).map(|j| (0..r).map(|i| b[(i, j)]).sum()).collect();
    if let Some(i) = d1.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::SingularDegree { node: i });
    }
    if let Some(j) = d2.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::SingularDegree { node: r + j });
    }
    let mut m = b.clone();
    for i in 0..r {
        for j in 0..c {
            m[(i, j)] /= libm::sqrt(d1[i] * d2[j]);
        }
    }
    Ok(m)
}

/// Generalized singular values of `B + αJ` (dense) against those of the
/// aggregate biadjacency padded with `σ = 0`. Both lists are ascending.
pub fn bipartite_aggregate_check(
    b: &BipartiteGraph,
    row_labels: &Labels,
    col_labels: &Labels,
    alpha: f64,
    tol: f64,
) -> Result<SpectrumCheck> {
    let (n, m) = (b.left_count(), b.right_count());
    dense_cap(n + m)?;
    check_labels(n, row_labels)?;
    check_labels(m, col_labels)?;
    let dense = b.to_dense();
    check_block_rows(&dense, row_labels, tol)?;
    check_block_rows(&dense.transpose(), col_labels, tol).map_err(|e| match e {
        Error::NotABlockModel { node } => Error::NotABlockModel { node: n + node },
        e => e,
    })?;
    let mut ba = dense;
    for i in 0..n {
        for j in 0..m {
            ba[(i, j)] += alpha;
        }
    }
    let full = dense_singular_values(&normalized_biadjacency(&ba)?)?;

    let (k1, k2) = (row_labels.k(), col_labels.k());
    let mut agg = Matrix::zeros(k1, k2);
    for i in 0..n {
        for j in 0..m {
            agg[(row_labels.assignments()[i], col_labels.assignments()[j])] += ba[(i, j)];
        }
    }
    let mut predicted = dense_singular_values(&normalized_biadjacency(&agg)?)?;
    predicted.resize(n.min(m), 0.0);
    Ok(compare_spectra(full, predicted, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Clique,
    Bipartite,
}

/// Eigenvalue thresholds, one per block in the order the sizes were given.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    pub mus: Vec<f64>,
    pub alpha: f64,
    pub kind: ModelKind,
    /// `(n/n_j + m/m_j)⁻¹`: blocks with larger values are isolated first as `α → 0⁺`.
    pub harmonic_keys: Option<Vec<f64>>,
    /// `n_j m_j / (n m)`: blocks with larger values are isolated first as `α → ∞`.
    pub geometric_keys: Option<Vec<f64>>,
}

impl ThresholdSet {
    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.mus.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(invalid("at least one block size is required"));
    }
    if let Some(b) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyBlock(b));
    }
    Ok(())
}

fn check_positive_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha must be positive and finite"));
    }
    Ok(())
}

/// `μ_j = αn / (αn + n_j)`
pub fn clique_thresholds(sizes: &[usize], alpha: f64) -> Result<ThresholdSet> {
    check_sizes(sizes)?;
    check_positive_alpha(alpha)?;
    let an = alpha * sizes.iter().sum::<usize>() as f64;
    Ok(ThresholdSet {
        mus: sizes.iter().map(|&s| an / (an + s as f64)).collect(),
        alpha,
        kind: ModelKind::Clique,
        harmonic_keys: None,
        geometric_keys: None,
    })
}

/// `μ_j = 1 - sqrt(n_j m_j / ((n_j + αn)(m_j + αm)))`
///
/// Eliminating one side of the aggregate singular value problem leaves
/// `σ²(n_j + αn)(m_j + αm) - n_j m_j` in the denominator, so the sign flips at
/// `σ² = n_j m_j / (...)`. The unsquared ratio does not interleave the spectrum.
pub fn bipartite_thresholds(n_sizes: &[usize], m_sizes: &[usize], alpha: f64) -> Result<ThresholdSet> {
    check_sizes(n_sizes)?;
    check_sizes(m_sizes)?;
    if n_sizes.len() != m_sizes.len() {
        return Err(Error::LengthMismatch {
            left: n_sizes.len(),
            right: m_sizes.len(),
        });
    }
    check_positive_alpha(alpha)?;
    let n = n_sizes.iter().sum::<usize>() as f64;
    let m = m_sizes.iter().sum::<usize>() as f64;
    let pairs = || n_sizes.iter().zip(m_sizes).map(|(&a, &b)| (a as f64, b as f64));
    Ok(ThresholdSet {
        mus: pairs()
            .map(|(nj, mj)| 1.0 - libm::sqrt(nj * mj / ((nj + alpha * n) * (mj + alpha * m))))
            .collect(),
        alpha,
        kind: ModelKind::Bipartite,
        harmonic_keys: Some(pairs().map(|(nj, mj)| 1.0 / (n / nj + m / mj)).collect()),
        geometric_keys: Some(pairs().map(|(nj, mj)| nj * mj / (n * m)).collect()),
    })
}

// Σ_l c_l s_l (s_l + αn) / (λ/μ_l - 1)
fn secular(groups: &[(f64, f64, f64)], lambda: f64) -> f64 {
    groups
        .iter()
        .map(|&(count, weight, mu)| count * weight / (lambda / mu - 1.0))
        .sum()
}

fn bisect_root(groups: &[(f64, f64, f64)], lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let mut a = lo * (1.0 + ENDPOINT_SHRINK);
    let mut b = hi * (1.0 - ENDPOINT_SHRINK);
    if !(secular(groups, a) > 0.0 && secular(groups, b) < 0.0) {
        return Err(Error::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= tol {
            break;
        }
        if secular(groups, mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// The `K - 1` interior eigenvalues `λ_2 < … < λ_K` of a regularized clique
/// model, one secular root per interval `(μ_{j-1}, μ_j)`.
pub fn secular_eigenvalues(sizes: &[usize], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_sizes(sizes)?;
    if sizes.windows(2).any(|w| w[0] <= w[1]) {
        return Err(invalid("block sizes must be strictly decreasing"));
    }
    let thr = clique_thresholds(sizes, alpha)?;
    let an = alpha * sizes.iter().sum::<usize>() as f64;
    let groups: Vec<(f64, f64, f64)> = sizes
        .iter()
        .zip(&thr.mus)
        .map(|(&s, &mu)| (1.0, s as f64 * (s as f64 + an), mu))
        .collect();
    thr.mus
        .windows(2)
        .map(|w| bisect_root(&groups, w[0], w[1], tol))
        .collect()
}

/// All `K` smallest eigenvalues of a regularized clique model, ascending,
/// including `λ_1 = 0`. Sizes may repeat: a size shared by `c` blocks
/// contributes its threshold with multiplicity `c - 1`.
pub fn clique_spectrum(sizes: &[usize], alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_sizes(sizes)?;
    check_positive_alpha(alpha)?;
    let mut distinct: Vec<(usize, usize)> = Vec::new();
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    for s in sorted {
        match distinct.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => distinct.push((s, 1)),
        }
    }
    let an = alpha * sizes.iter().sum::<usize>() as f64;
    let groups: Vec<(f64, f64, f64)> = distinct
        .iter()
        .map(|&(s, c)| {
            let s = s as f64;
            (c as f64, s * (s + an), an / (an + s))
        })
        .collect();
    let mut out = vec![0.0];
    for w in groups.windows(2) {
        out.push(bisect_root(&groups, w[0].2, w[1].2, tol)?);
    }
    for &(c, _, mu) in &groups {
        out.extend(core::iter::repeat_n(mu, c as usize - 1));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Block values `y_j ∝ 1 / (λ n_j - α(1-λ)n)` of the eigenvector for `λ`,
/// scaled so that `Σ n_j (n_j + αn) y_j² = 1`, which makes `x = Zy`
/// `D_α`-normalized.
pub fn eigenvector_block_values(sizes: &[usize], alpha: f64, lambda: f64) -> Result<Vec<f64>> {
    check_sizes(sizes)?;
    if !(alpha >= 0.0) {
        return Err(invalid("alpha must be nonnegative"));
    }
    let n = sizes.iter().sum::<usize>() as f64;
    let mut y = Vec::with_capacity(sizes.len());
    for (j, &s) in sizes.iter().enumerate() {
        let s = s as f64;
        let mu = alpha * n / (alpha * n + s);
        if libm::fabs(lambda - mu) < POLE_TOL {
            return Err(Error::Pole { lambda, index: j });
        }
        y.push(1.0 / (lambda * s - alpha * (1.0 - lambda) * n));
    }
    let norm2: f64 = sizes
        .iter()
        .zip(&y)
        .map(|(&s, v)| s as f64 * (s as f64 + alpha * n) * v * v)
        .sum();
    let c = 1.0 / libm::sqrt(norm2);
    Ok(y.into_iter().map(|v| v * c).collect())
}

/// Blocks on either side of `λ`'s sign threshold `n_j ≥ α(1-λ)n/λ`.
pub fn threshold_split(sizes: &[usize], alpha: f64, lambda: f64) -> Vec<bool> {
    let n = sizes.iter().sum::<usize>() as f64;
    let cut = alpha * (1.0 - lambda) / lambda * n;
    sizes.iter().map(|&s| s as f64 >= cut).collect()
}

/// Indices of the `count` largest blocks (ties by lower index).
pub fn largest_blocks(sizes: &[usize], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..sizes.len()).collect();
    idx.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    idx.truncate(count);
    idx.sort_unstable();
    idx
}

/// Row labels followed by column labels, sharing block ids.
pub fn stacked_labels(rows: &Labels, cols: &Labels) -> Labels {
    let mut a = rows.assignments().to_vec();
    a.extend_from_slice(cols.assignments());
    Labels::new(a, rows.k().max(cols.k())).expect("ids are below the larger k")
}

/// Blocks grouped by the sign of one embedding column.
#[derive(Debug, Clone, PartialEq)]
pub struct SignSplit {
    /// Blocks on the side of the largest block, sorted.
    pub negative: Vec<usize>,
    pub positive: Vec<usize>,
    /// Fraction of each block's nodes carrying the block's majority sign.
    pub purity: Vec<f64>,
    /// Whether the column was negated to put the largest block on the
    /// negative side.
    pub flipped: bool,
}

impl SignSplit {
    /// `group` is exactly one of the two sides.
    pub fn separates(&self, group: &[usize]) -> bool {
        let mut g = group.to_vec();
        g.sort_unstable();
        g.dedup();
        g == self.negative || g == self.positive
    }

    pub fn min_purity(&self) -> f64 {
        self.purity.iter().copied().fold(1.0, f64::min)
    }
}

/// Splits blocks by the sign of the eigenvector of the `index`-th smallest
/// eigenvalue, counting from 1 with the trivial eigenvector as index 1.
///
/// With `strict` any block holding both signs is an error; otherwise the
/// majority sign is used and the purity reported. Entries within `1e-12` of
/// zero relative to the column maximum are always rejected.
pub fn sign_recovery(
    embedding: &Embedding,
    index: usize,
    labels: &Labels,
    strict: bool,
) -> Result<SignSplit> {
    let column = match (index, embedding.skip_first) {
        (0, _) | (1, true) => {
            return Err(invalid(alloc::format!(
                "eigenvector {index} is not part of the embedding"
            )))
        }
        (i, true) => i - 2,
        (i, false) => i - 1,
    };
    if column >= embedding.dim() {
        return Err(invalid(alloc::format!(
            "eigenvector {index} is not part of a {}-dimensional embedding",
            embedding.dim()
        )));
    }
    let x = embedding.coordinates.column(column);
    check_labels(x.len(), labels)?;
    let max = x.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
    if let Some(node) = x.iter().position(|v| libm::fabs(*v) <= 1e-12 * max) {
        return Err(Error::ZeroEntry { column, node });
    }

    let k = labels.k();
    let mut pos = vec![0usize; k];
    let mut neg = vec![0usize; k];
    for (&v, &b) in x.iter().zip(labels.assignments()) {
        if v > 0.0 {
            pos[b] += 1;
        } else {
            neg[b] += 1;
        }
    }
    let mut purity = Vec::with_capacity(k);
    let mut positive_block = Vec::with_capacity(k);
    for b in 0..k {
        if strict && pos[b] > 0 && neg[b] > 0 {
            return Err(Error::MixedSigns { block: b });
        }
        purity.push(pos[b].max(neg[b]) as f64 / (pos[b] + neg[b]) as f64);
        positive_block.push(pos[b] >= neg[b]);
    }
    let largest = largest_blocks(&labels.sizes(), 1)[0];
    let flipped = positive_block[largest];
    let (mut negative, mut positive) = (Vec::new(), Vec::new());
    for (b, &p) in positive_block.iter().enumerate() {
        if p != flipped {
            positive.push(b);
        } else {
            negative.push(b);
        }
    }
    Ok(SignSplit {
        negative,
        positive,
        purity,
        flipped,
    })
}

/// One strict comparison `left < right` of an interleaving chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub left: f64,
    pub right: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingReport {
    /// `|λ_1| ≤ tol`
    pub first_is_zero: bool,
    pub length_ok: bool,
    /// `λ_1 < μ_1 < λ_2 < μ_2 < … < λ_K < μ_K`, in order.
    pub comparisons: Vec<Comparison>,
    pub passed: bool,
}

/// Checks `0 = λ_1 < μ_1 < λ_2 < … < λ_K < μ_K`, each gap larger than `tol`.
pub fn verify_interleaving(eigs: &[f64], thr: &ThresholdSet, tol: f64) -> InterleavingReport {
    let mus = thr.sorted();
    let length_ok = eigs.len() == mus.len();
    let first_is_zero = eigs.first().is_some_and(|l| libm::fabs(*l) <= tol);
    let mut chain = Vec::with_capacity(2 * eigs.len());
    for (l, m) in eigs.iter().zip(&mus) {
        chain.push(*l);
        chain.push(*m);
    }
    let comparisons: Vec<Comparison> = chain
        .windows(2)
        .map(|w| Comparison {
            left: w[0],
            right: w[1],
            holds: w[1] - w[0] > tol,
        })
        .collect();
    let passed = length_ok && first_is_zero && comparisons.iter().all(|c| c.holds);
    InterleavingReport {
        first_is_zero,
        length_ok,
        comparisons,
        passed,
    }
}
