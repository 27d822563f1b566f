//! Clustering scores: entropy-based, pair-counting, modularity and balance.
//!
//! Entropies use natural logarithms. Conventions for degenerate inputs
//! follow the usual toolkit behavior: homogeneity is 1 when the truth has
//! zero entropy (completeness symmetrically), the V-measure is 0 when both
//! vanish, ARI is 1 when the pair counts leave nothing to adjust, and AMI is
//! 1 when both labelings are a single cluster.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Labels, SparseGraph};

/// Counts of predicted cluster `u` against true class `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<usize>,
    row_sums: Vec<usize>,
    col_sums: Vec<usize>,
    total: usize,
}

impl ContingencyTable {
    pub fn new(pred: &Labels, truth: &Labels) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        if pred.is_empty() {
            return Err(Error::EmptyInput);
        }
        let (rows, cols) = (pred.k(), truth.k());
        let mut counts = vec![0usize; rows * cols];
        let mut row_sums = vec![0usize; rows];
        let mut col_sums = vec![0usize; cols];
        for (&u, &v) in pred.assignments().iter().zip(truth.assignments()) {
            counts[u * cols + v] += 1;
            row_sums[u] += 1;
            col_sums[v] += 1;
        }
        Ok(Self {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            total: pred.len(),
        })
    }

    pub fn get(&self, u: usize, v: usize) -> usize {
        self.counts[u * self.cols + v]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_sums(&self) -> &[usize] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[usize] {
        &self.col_sums
    }

    pub fn total(&self) -> usize {
        self.total
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.rows).flat_map(move |u| (0..self.cols).map(move |v| (u, v, self.get(u, v))))
    }

    /// `I(pred; truth)`
    pub fn mutual_information(&self) -> f64 {
        let n = self.total as f64;
        self.cells()
            .filter(|&(_, _, c)| c > 0)
            .map(|(u, v, c)| {
                let c = c as f64;
                let ab = self.row_sums[u] as f64 * self.col_sums[v] as f64;
                c / n * (libm::log(c) + libm::log(n) - libm::log(ab))
            })
            .sum::<f64>()
            .max(0.0)
    }

    /// Expected mutual information of two random labelings with these
    /// marginals (hypergeometric model).
    pub fn expected_mutual_information(&self) -> f64 {
        let n = self.total;
        let lf = ln_factorials(n);
        let nf = n as f64;
        let mut emi = 0.0;
        for &a in self.row_sums.iter().filter(|&&a| a > 0) {
            for &b in self.col_sums.iter().filter(|&&b| b > 0) {
                let lo = (a + b).saturating_sub(n).max(1);
                let hi = a.min(b);
                let fixed = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n];
                for nij in lo..=hi {
                    let x = nij as f64;
                    let term = x / nf * (libm::log(nf * x) - libm::log(a as f64 * b as f64));
                    let ln_p = fixed - lf[nij] - lf[a - nij] - lf[b - nij] - lf[n + nij - a - b];
                    emi += term * libm::exp(ln_p);
                }
            }
        }
        emi
    }

    fn pair_counts(&self) -> PairCounts {
        let c2 = |x: usize| (x as f64) * (x as f64 - 1.0) / 2.0;
        PairCounts {
            same_both: self.counts.iter().map(|&c| c2(c)).sum(),
            same_pred: self.row_sums.iter().map(|&c| c2(c)).sum(),
            same_truth: self.col_sums.iter().map(|&c| c2(c)).sum(),
            total: c2(self.total),
        }
    }
}

struct PairCounts {
    same_both: f64,
    same_pred: f64,
    same_truth: f64,
    total: f64,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += libm::log(k as f64);
        out.push(acc);
    }
    out
}

fn entropy_of(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy of a labeling.
pub fn entropy(labels: &Labels) -> f64 {
    entropy_of(&labels.sizes(), labels.len())
}

pub fn mutual_information(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(ContingencyTable::new(pred, truth)?.mutual_information())
}

/// `(homogeneity, completeness, v_measure)`
pub fn homogeneity_completeness_v(pred: &Labels, truth: &Labels) -> Result<(f64, f64, f64)> {
    let t = ContingencyTable::new(pred, truth)?;
    Ok(hcv(&t))
}

fn hcv(t: &ContingencyTable) -> (f64, f64, f64) {
    let mi = t.mutual_information();
    let h_truth = entropy_of(&t.col_sums, t.total);
    let h_pred = entropy_of(&t.row_sums, t.total);
    let h = if h_truth > 0.0 { (mi / h_truth).min(1.0) } else { 1.0 };
    let c = if h_pred > 0.0 { (mi / h_pred).min(1.0) } else { 1.0 };
    let v = if h + c > 0.0 { 2.0 * h * c / (h + c) } else { 0.0 };
    (h, c, v)
}

pub fn homogeneity(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(homogeneity_completeness_v(pred, truth)?.0)
}

pub fn completeness(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(homogeneity_completeness_v(pred, truth)?.1)
}

pub fn v_measure(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(homogeneity_completeness_v(pred, truth)?.2)
}

/// Adjusted Rand index.
pub fn ari(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(ari_of(&ContingencyTable::new(pred, truth)?))
}

fn ari_of(t: &ContingencyTable) -> f64 {
    let p = t.pair_counts();
    if p.total == 0.0 {
        return 1.0;
    }
    let expected = p.same_pred * p.same_truth / p.total;
    let max = 0.5 * (p.same_pred + p.same_truth);
    let denom = max - expected;
    if denom == 0.0 {
        return 1.0;
    }
    (p.same_both - expected) / denom
}

/// Adjusted mutual information with arithmetic-mean normalization.
pub fn ami(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(ami_of(&ContingencyTable::new(pred, truth)?))
}

fn ami_of(t: &ContingencyTable) -> f64 {
    let used_rows = t.row_sums.iter().filter(|&&c| c > 0).count();
    let used_cols = t.col_sums.iter().filter(|&&c| c > 0).count();
    if used_rows == 1 && used_cols == 1 {
        return 1.0;
    }
    let mi = t.mutual_information();
    let emi = t.expected_mutual_information();
    let mean = 0.5 * (entropy_of(&t.row_sums, t.total) + entropy_of(&t.col_sums, t.total));
    let mut denom = mean - emi;
    if denom < 0.0 {
        denom = denom.min(-f64::EPSILON);
    } else {
        denom = denom.max(f64::EPSILON);
    }
    (mi - emi) / denom
}

/// Fowlkes–Mallows index, 0 when no pair is shared.
pub fn fmi(pred: &Labels, truth: &Labels) -> Result<f64> {
    Ok(fmi_of(&ContingencyTable::new(pred, truth)?))
}

fn fmi_of(t: &ContingencyTable) -> f64 {
    let p = t.pair_counts();
    if p.same_both == 0.0 {
        return 0.0;
    }
    p.same_both / libm::sqrt(p.same_pred * p.same_truth)
}

/// Newman–Girvan modularity with `w = 1ᵀA1`; self-loops count once in
/// both terms.
pub fn modularity(g: &SparseGraph, pred: &Labels) -> Result<f64> {
    if pred.len() != g.node_count() {
        return Err(Error::LengthMismatch {
            left: g.node_count(),
            right: pred.len(),
        });
    }
    let w = g.total_weight();
    if !(w > 0.0) {
        return Err(Error::ZeroWeight);
    }
    let k = pred.k();
    let z = pred.assignments();
    let mut inside = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for i in 0..g.node_count() {
        let (cols, vals) = g.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            degree[z[i]] += v;
            if z[j] == z[i] {
                inside[z[i]] += v;
            }
        }
    }
    Ok(inside
        .iter()
        .zip(&degree)
        .map(|(a, d)| a / w - (d / w) * (d / w))
        .sum())
}

/// One minus the standard deviation of the `k` cluster sizes (empty
/// clusters included) over that of the most unbalanced partition, one
/// cluster of `N - k + 1` and `k - 1` singletons. Clamped to `[0, 1]`.
pub fn nsd(pred: &Labels) -> Result<f64> {
    if pred.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = pred.k();
    if k <= 1 {
        return Ok(1.0);
    }
    let n = pred.len();
    let sigma = population_std(pred.sizes().iter().map(|&s| s as f64));
    let sigma_max = if n >= k {
        population_std(core::iter::once((n - k + 1) as f64).chain(core::iter::repeat_n(1.0, k - 1)))
    } else {
        population_std(core::iter::once(n as f64).chain(core::iter::repeat_n(0.0, k - 1)))
    };
    if sigma_max == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - sigma / sigma_max).clamp(0.0, 1.0))
}

fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let count = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / count;
    libm::sqrt(values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / count)
}

/// All scores of one clustering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
    pub ari: f64,
    pub ami: f64,
    pub fmi: f64,
    pub modularity: f64,
    pub nsd: f64,
}

impl MetricRecord {
    pub const NAMES: [&'static str; 8] = ["H", "C", "V", "ARI", "AMI", "FMI", "Q", "NSD"];

    pub fn values(&self) -> [f64; 8] {
        [
            self.homogeneity,
            self.completeness,
            self.v_measure,
            self.ari,
            self.ami,
            self.fmi,
            self.modularity,
            self.nsd,
        ]
    }
}

/// Scores `pred` against `truth`, optionally on the nodes where `mask` is
/// true only. Modularity is then taken on the induced subgraph and the
/// cluster count of `pred` is kept.
pub fn evaluate_all(
    g: &SparseGraph,
    pred: &Labels,
    truth: &Labels,
    mask: Option<&[bool]>,
) -> Result<MetricRecord> {
    let n = g.node_count();
    for len in [pred.len(), truth.len()] {
        if len != n {
            return Err(Error::LengthMismatch { left: n, right: len });
        }
    }
    let g_sub: SparseGraph;
    let (pred_sub, truth_sub): (Labels, Labels);
    let (g, pred, truth) = match mask {
        None => (g, pred, truth),
        Some(mask) => {
            if mask.len() != n {
                return Err(Error::LengthMismatch {
                    left: n,
                    right: mask.len(),
                });
            }
            let nodes: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
            g_sub = g.induced_subgraph(&nodes)?;
            pred_sub = pred.restrict(mask)?;
            truth_sub = truth.restrict(mask)?;
            (&g_sub, &pred_sub, &truth_sub)
        }
    };
    let t = ContingencyTable::new(pred, truth)?;
    let (h, c, v) = hcv(&t);
    Ok(MetricRecord {
        homogeneity: h,
        completeness: c,
        v_measure: v,
        ari: ari_of(&t),
        ami: ami_of(&t),
        fmi: fmi_of(&t),
        modularity: modularity(g, pred)?,
        nsd: nsd(pred)?,
    })
}
