//! Lloyd's k-means with k-means++ seeding.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::Labels;
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once the relative decrease of the inertia falls to this value.
    pub tol: f64,
    pub n_init: usize,
}

impl KMeansConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            seed: 0,
            max_iter: 300,
            tol: 1e-6,
            n_init: 10,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: Labels,
    /// Sum of squared distances to the assigned centroid.
    pub inertia: f64,
    /// `k × dim`
    pub centroids: Matrix,
    /// Lloyd iterations of the winning restart.
    pub iterations: usize,
    /// Index of the winning restart.
    pub restart: usize,
    /// Fewer distinct points than clusters: some centroids coincide.
    pub degenerate: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

// Index of the nearest centroid, lowest index on ties.
fn nearest(p: &[f64], centroids: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = sq_dist(p, centroids.row(c));
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn seed_centroids(points: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> (Matrix, bool) {
    let n = points.rows();
    let mut centroids = Matrix::zeros(k, points.cols());
    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    let mut degenerate = false;
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            degenerate = true;
            rng.random_range(0..n)
        };
        centroids.row_mut(c).copy_from_slice(points.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(pick)));
        }
    }
    (centroids, degenerate)
}

struct Run {
    assignments: Vec<usize>,
    inertia: f64,
    centroids: Matrix,
    iterations: usize,
    degenerate: bool,
}

fn assign(points: &Matrix, centroids: &Matrix, out: &mut [usize], dist: &mut [f64]) -> f64 {
    let mut inertia = 0.0;
    for i in 0..points.rows() {
        let (c, d) = nearest(points.row(i), centroids);
        out[i] = c;
        dist[i] = d;
        inertia += d;
    }
    inertia
}

// Moves the point farthest from its centroid into each empty cluster.
fn repair_empty(
    points: &Matrix,
    k: usize,
    assignments: &mut [usize],
    dist: &mut [f64],
    centroids: &mut Matrix,
) {
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut best: Option<usize> = None;
        for i in 0..points.rows() {
            if counts[assignments[i]] > 1 && best.is_none_or(|b| dist[i] > dist[b]) {
                best = Some(i);
            }
        }
        let Some(i) = best else { return };
        counts[assignments[i]] -= 1;
        counts[c] += 1;
        assignments[i] = c;
        dist[i] = 0.0;
        centroids.row_mut(c).copy_from_slice(points.row(i));
    }
}

fn update_centroids(points: &Matrix, assignments: &[usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let mut counts = vec![0usize; k];
    let mut sums = Matrix::zeros(k, points.cols());
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for (s, &p) in sums.row_mut(a).iter_mut().zip(points.row(i)) {
            *s += p;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for (dst, &s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s * inv;
            }
        }
    }
}

fn lloyd(points: &Matrix, cfg: &KMeansConfig, rng: &mut ChaCha8Rng) -> Run {
    let n = points.rows();
    let (mut centroids, degenerate) = seed_centroids(points, cfg.k, rng);
    let mut assignments = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut inertia = assign(points, &centroids, &mut assignments, &mut dist);
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        repair_empty(points, cfg.k, &mut assignments, &mut dist, &mut centroids);
        update_centroids(points, &assignments, &mut centroids);
        let next = assign(points, &centroids, &mut assignments, &mut dist);
        debug_assert!(next <= inertia * (1.0 + 1e-9) + 1e-12, "inertia went up");
        let done = inertia - next <= cfg.tol * inertia;
        inertia = next;
        if done {
            break;
        }
    }
    Run {
        assignments,
        inertia,
        centroids,
        iterations,
        degenerate,
    }
}

/// Best of `n_init` seeded restarts by inertia, ties to the earlier restart.
pub fn kmeans(points: &Matrix, cfg: &KMeansConfig) -> Result<KMeansResult> {
    let n = points.rows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if cfg.k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if cfg.k > n {
        return Err(Error::TooManyClusters { k: cfg.k, points: n });
    }
    if cfg.n_init == 0 {
        return Err(invalid("n_init must be at least 1"));
    }
    if points.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(invalid("points must be finite"));
    }
    let mut best: Option<(usize, Run)> = None;
    for r in 0..cfg.n_init {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(r as u64);
        let run = lloyd(points, cfg, &mut rng);
        if best.as_ref().is_none_or(|(_, b)| run.inertia < b.inertia) {
            best = Some((r, run));
        }
    }
    let (restart, run) = best.expect("n_init >= 1");
    Ok(KMeansResult {
        labels: Labels::new(run.assignments, cfg.k)?,
        inertia: run.inertia,
        centroids: run.centroids,
        iterations: run.iterations,
        restart,
        degenerate: run.degenerate,
    })
}
