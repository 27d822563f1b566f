//! Iterative symmetric eigensolver and the regularized operators it runs on.
//!
//! [`lanczos_extreme`] is a thick-restart Lanczos method with full
//! reorthogonalization. Converged Ritz pairs are locked and later runs start
//! from fresh seeded vectors orthogonal to everything locked, which recovers
//! every copy of a repeated eigenvalue. Once `k` pairs are locked, one more
//! deflated run checks that nothing larger was missed.
//!
//! The generalized problem `L_α x = λ D_α x` is reduced to the symmetric
//! operator `D_α^{-1/2} A_α D_α^{-1/2} + I`, whose spectrum lies in `[0, 2]`;
//! its largest eigenvalues `θ` give `λ = 2 - θ` and `x = D_α^{-1/2} u`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::graph::{BipartiteGraph, SparseGraph};
use crate::linalg::{axpy, dot, norm, scale, symmetric_eigen, Matrix};

/// A symmetric linear map applied matrix-free.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    /// `y = A x`. `y` has length `dim()` and may hold garbage on entry.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for Matrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }
}

impl LinearOperator for SparseGraph {
    fn dim(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Largest,
    Smallest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    pub seed: u64,
    /// Residual tolerance, relative to `max(1, |θ|)`.
    pub tol: f64,
    /// Operator application budget; `None` uses [`default_max_iter`].
    pub max_iter: Option<usize>,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-10,
            max_iter: None,
        }
    }
}

/// `10 k ln(n) + 300` operator applications.
pub fn default_max_iter(k: usize, n: usize) -> usize {
    let ln = libm::log((n.max(1)) as f64);
    (10.0 * k as f64 * ln) as usize + 300
}

/// Random restarts allowed when a start vector collapses under deflation.
const RESTART_CAP: usize = 5;

/// Extreme eigenpairs, ordered from the requested end inward.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Unit-norm, mutually orthogonal.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A v - θ v‖` per pair.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

struct Budget {
    used: usize,
    max: usize,
}

struct Signed<'a, O: ?Sized> {
    op: &'a O,
    sign: f64,
}

impl<O: LinearOperator + ?Sized> Signed<'_, O> {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y);
        if self.sign < 0.0 {
            scale(-1.0, y);
        }
    }
}

struct RunOutcome {
    /// (value, vector, residual estimate), descending in the signed operator.
    pairs: Vec<(f64, Vec<f64>, f64)>,
    /// Largest Ritz value of the final projection and its residual estimate.
    top: Option<(f64, f64)>,
    out_of_budget: bool,
}

/// The `k` largest or smallest eigenpairs of a symmetric operator.
pub fn lanczos_extreme<O: LinearOperator + ?Sized>(
    op: &O,
    which: Which,
    k: usize,
    cfg: &LanczosConfig,
) -> Result<EigenPairs> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(invalid(alloc::format!(
            "cannot compute {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let signed = Signed {
        op,
        sign: if which == Which::Largest { 1.0 } else { -1.0 },
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut budget = Budget {
        used: 0,
        max: cfg.max_iter.unwrap_or_else(|| default_max_iter(k, n)),
    };

    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();

    while locked.len() < k {
        let want = k - locked.len();
        let run = thick_restart_run(&signed, &locked, want, cfg.tol, &mut budget, &mut rng)?;
        if run.pairs.is_empty() {
            return Err(non_convergence(k, locked.len(), &budget, &run, &estimates));
        }
        for (v, x, r) in run.pairs {
            values.push(v);
            locked.push(x);
            estimates.push(r);
        }
        if locked.len() < k && run.out_of_budget {
            return Err(Error::NonConvergence {
                requested: k,
                converged: locked.len(),
                matvecs: budget.used,
                worst_residual: estimates.iter().copied().fold(0.0, f64::max),
            });
        }
    }

    // Look for anything above the k-th largest locked value that a previous
    // Krylov space could not see.
    while locked.len() < n {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let threshold = sorted[k - 1];
        let margin = 100.0 * cfg.tol * threshold.abs().max(1.0);
        let run = thick_restart_run(&signed, &locked, 1, cfg.tol, &mut budget, &mut rng)?;
        match run.pairs.into_iter().next() {
            Some((v, x, r)) if v > threshold + margin => {
                values.push(v);
                locked.push(x);
                estimates.push(r);
            }
            Some(_) => break,
            None => match run.top {
                Some((top, res)) if top > threshold + margin => {
                    return Err(Error::NonConvergence {
                        requested: k,
                        converged: k - 1,
                        matvecs: budget.used,
                        worst_residual: res,
                    });
                }
                _ => break,
            },
        }
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order.truncate(k);

    let mut out = EigenPairs {
        values: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
        matvecs: budget.used,
    };
    let mut ax = vec![0.0; n];
    for &i in &order {
        let x = core::mem::take(&mut locked[i]);
        let value = signed.sign * values[i];
        op.apply(&x, &mut ax);
        axpy(-value, &x, &mut ax);
        out.residuals.push(norm(&ax));
        out.values.push(value);
        out.vectors.push(x);
    }
    Ok(out)
}

fn non_convergence(
    k: usize,
    converged: usize,
    budget: &Budget,
    run: &RunOutcome,
    estimates: &[f64],
) -> Error {
    let worst = run
        .top
        .map(|(_, r)| r)
        .into_iter()
        .chain(estimates.iter().copied())
        .fold(0.0, f64::max);
    Error::NonConvergence {
        requested: k,
        converged,
        matvecs: budget.used,
        worst_residual: worst,
    }
}

fn project_out(w: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

fn random_orthogonal(
    n: usize,
    locked: &[Vec<f64>],
    basis: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<f64>> {
    for _ in 0..RESTART_CAP {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let before = norm(&v);
        project_out(&mut v, locked);
        project_out(&mut v, basis);
        let after = norm(&v);
        if after > 1e-8 * before {
            scale(1.0 / after, &mut v);
            return Some(v);
        }
    }
    None
}

fn thick_restart_run<O: LinearOperator + ?Sized>(
    op: &Signed<'_, O>,
    locked: &[Vec<f64>],
    want: usize,
    tol: f64,
    budget: &mut Budget,
    rng: &mut ChaCha8Rng,
) -> Result<RunOutcome> {
    let n = op.op.dim();
    let avail = n - locked.len();
    let empty = RunOutcome {
        pairs: Vec::new(),
        top: None,
        out_of_budget: false,
    };
    if avail == 0 {
        return Ok(empty);
    }
    let want = want.min(avail);
    let m = avail.min((2 * want + 10).max(20));

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut h = Matrix::zeros(m, m);
    let Some(mut next) = random_orthogonal(n, locked, &basis, rng) else {
        return Ok(empty);
    };
    let mut beta_next = 0.0;
    let mut exhausted = false;
    let mut w = vec![0.0; n];
    let mut coeffs = vec![0.0; m];

    loop {
        let mut out_of_budget = false;
        while basis.len() < m && !exhausted {
            if budget.used >= budget.max {
                out_of_budget = true;
                break;
            }
            basis.push(core::mem::take(&mut next));
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            budget.used += 1;
            project_out(&mut w, locked);
            coeffs[..=j].iter_mut().for_each(|c| *c = 0.0);
            for _ in 0..2 {
                for (i, b) in basis.iter().enumerate() {
                    let c = dot(b, &w);
                    coeffs[i] += c;
                    axpy(-c, b, &mut w);
                }
            }
            for i in 0..=j {
                h[(i, j)] = coeffs[i];
                h[(j, i)] = coeffs[i];
            }
            let beta = norm(&w);
            let size_scale = libm::fabs(coeffs[j]).max(beta).max(1.0);
            if beta > 1e-12 * size_scale {
                next = w.iter().map(|x| x / beta).collect();
                beta_next = beta;
            } else {
                beta_next = 0.0;
                match random_orthogonal(n, locked, &basis, rng) {
                    Some(v) => next = v,
                    None => exhausted = true,
                }
            }
        }

        let size = basis.len();
        if size == 0 {
            return Ok(RunOutcome {
                out_of_budget: true,
                ..empty
            });
        }
        let mut proj = Matrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                proj[(i, j)] = h[(i, j)];
            }
        }
        let eig = symmetric_eigen(&proj)?;
        // descending
        let ritz: Vec<usize> = (0..size).rev().collect();
        let theta_scale = eig
            .values
            .iter()
            .map(|v| libm::fabs(*v))
            .fold(1.0, f64::max);
        let resid = |i: usize| libm::fabs(beta_next * eig.vectors[(size - 1, i)]);
        let target = want.min(size);
        let converged = ritz
            .iter()
            .take(target)
            .take_while(|&&i| resid(i) <= tol * theta_scale)
            .count();
        let top = Some((eig.values[ritz[0]], resid(ritz[0])));

        let ritz_vector = |i: usize| {
            let mut y = vec![0.0; n];
            for (l, b) in basis.iter().enumerate() {
                axpy(eig.vectors[(l, i)], b, &mut y);
            }
            let ny = norm(&y);
            scale(1.0 / ny, &mut y);
            y
        };

        if converged >= target || exhausted || out_of_budget {
            // an exhausted space makes every Ritz pair exact
            let take = if exhausted { target } else { converged };
            let pairs = ritz
                .iter()
                .take(take)
                .map(|&i| (eig.values[i], ritz_vector(i), resid(i)))
                .collect();
            return Ok(RunOutcome {
                pairs,
                top,
                out_of_budget,
            });
        }

        let keep = (want + (m - want) / 2).clamp(want, m - 1);
        let kept: Vec<Vec<f64>> = ritz.iter().take(keep).map(|&i| ritz_vector(i)).collect();
        h = Matrix::zeros(m, m);
        for (l, &i) in ritz.iter().take(keep).enumerate() {
            h[(l, l)] = eig.values[i];
        }
        basis = kept;
        if beta_next == 0.0 {
            match random_orthogonal(n, locked, &basis, rng) {
                Some(v) => next = v,
                None => exhausted = true,
            }
        }
    }
}

/// What to do with a zero regularized degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingularDegree {
    /// Fail with [`Error::SingularDegree`].
    #[default]
    Reject,
    /// Use `D^+`: zero-degree nodes get zero coordinates and `λ = 1`.
    PseudoInverse,
    /// Treat each zero-degree node as carrying a unit self-loop, making it
    /// a component of its own with `λ = 0`, like any other component of an
    /// unregularized graph. Graphs only.
    SelfLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverConfig {
    pub lanczos: LanczosConfig,
    pub singular: SingularDegree,
}

/// Implicit `A_α = A + α 1 1ᵀ`, or `A + α θ θᵀ` with degree correction.
#[derive(Debug, Clone)]
pub struct RegularizedOperator<'a> {
    graph: &'a SparseGraph,
    alpha: f64,
    theta: Option<Vec<f64>>,
    degrees: Vec<f64>,
}

impl<'a> RegularizedOperator<'a> {
    pub fn new(graph: &'a SparseGraph, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let n = graph.node_count() as f64;
        let degrees = graph.degrees().into_iter().map(|d| d + alpha * n).collect();
        Ok(Self {
            graph,
            alpha,
            theta: None,
            degrees,
        })
    }

    pub fn with_theta(graph: &'a SparseGraph, alpha: f64, theta: Vec<f64>) -> Result<Self> {
        check_alpha(alpha)?;
        if theta.len() != graph.node_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.node_count(),
                got: theta.len(),
            });
        }
        if theta.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(invalid("theta entries must be positive"));
        }
        let theta_sum: f64 = theta.iter().sum();
        let degrees = graph
            .degrees()
            .into_iter()
            .zip(&theta)
            .map(|(d, &t)| d + alpha * t * theta_sum)
            .collect();
        Ok(Self {
            graph,
            alpha,
            theta: Some(theta),
            degrees,
        })
    }

    pub fn graph(&self) -> &SparseGraph {
        self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> Option<&[f64]> {
        self.theta.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// `D_α 1 = A_α 1`
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn zero_degree_nodes(&self) -> Vec<usize> {
        (0..self.degrees.len())
            .filter(|&i| self.degrees[i] <= 0.0)
            .collect()
    }

    pub fn is_singular(&self) -> bool {
        self.degrees.iter().any(|&d| d <= 0.0)
    }

    /// `y = A v + α (1ᵀv) 1`, or `A v + α (θᵀv) θ`.
    pub fn matvec_into(&self, v: &[f64], y: &mut [f64]) {
        self.graph.matvec_into(v, y);
        if self.alpha == 0.0 {
            return;
        }
        match &self.theta {
            None => {
                let s = self.alpha * v.iter().sum::<f64>();
                y.iter_mut().for_each(|yi| *yi += s);
            }
            Some(theta) => {
                let s = self.alpha * dot(theta, v);
                axpy(s, theta, y);
            }
        }
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.node_count() {
            return Err(Error::DimensionMismatch {
                expected: self.node_count(),
                got: v.len(),
            });
        }
        let mut y = vec![0.0; v.len()];
        self.matvec_into(v, &mut y);
        Ok(y)
    }

    /// `L_α x = D_α x - A_α x`
    pub fn laplacian_matvec_into(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
        for ((yi, &xi), &d) in y.iter_mut().zip(x).zip(&self.degrees) {
            *yi = d * xi - *yi;
        }
    }

    fn inverse_sqrt_degrees(&self, policy: SingularDegree) -> Result<Vec<f64>> {
        inverse_sqrt(&self.degrees, policy)
    }
}

impl LinearOperator for RegularizedOperator<'_> {
    fn dim(&self) -> usize {
        self.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(invalid("alpha must be a nonnegative finite number"));
    }
    Ok(())
}

fn inverse_sqrt(d: &[f64], policy: SingularDegree) -> Result<Vec<f64>> {
    d.iter()
        .enumerate()
        .map(|(i, &di)| {
            if di > 0.0 {
                Ok(1.0 / libm::sqrt(di))
            } else {
                match policy {
                    SingularDegree::Reject => Err(Error::SingularDegree { node: i }),
                    SingularDegree::PseudoInverse => Ok(0.0),
                    SingularDegree::SelfLoop => Ok(1.0),
                }
            }
        })
        .collect()
}

// D^{-1/2} A_α D^{-1/2} + I, plus the unit self-loops of `loops`
struct ShiftedNormalized<'a, 'g> {
    op: &'a RegularizedOperator<'g>,
    inv_sqrt: Vec<f64>,
    loops: Vec<usize>,
    scratch: core::cell::RefCell<Vec<f64>>,
}

impl LinearOperator for ShiftedNormalized<'_, '_> {
    fn dim(&self) -> usize {
        self.op.node_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = self.scratch.borrow_mut();
        for ((ti, &xi), &s) in t.iter_mut().zip(x).zip(&self.inv_sqrt) {
            *ti = xi * s;
        }
        self.op.matvec_into(&t, y);
        for ((yi, &xi), &s) in y.iter_mut().zip(x).zip(&self.inv_sqrt) {
            *yi = *yi * s + xi;
        }
        for &i in &self.loops {
            y[i] += x[i];
        }
    }
}

/// Bottom of the generalized spectrum `L_α X = D_α X Λ`.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `n × k`, `Xᵀ D_α X = I`.
    pub vectors: Matrix,
    /// `‖L_α x - λ D_α x‖ / ‖D_α x‖` per column.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

/// The `k` smallest generalized eigenpairs of `L_α x = λ D_α x`.
pub fn smallest_generalized_eigenpairs(
    op: &RegularizedOperator<'_>,
    k: usize,
    cfg: &SolverConfig,
) -> Result<EigenResult> {
    let n = op.node_count();
    let inv_sqrt = op.inverse_sqrt_degrees(cfg.singular)?;
    let loops = match cfg.singular {
        SingularDegree::SelfLoop => op.zero_degree_nodes(),
        _ => Vec::new(),
    };
    let shifted = ShiftedNormalized {
        op,
        inv_sqrt,
        loops,
        scratch: core::cell::RefCell::new(vec![0.0; n]),
    };
    let pairs = lanczos_extreme(&shifted, Which::Largest, k, &cfg.lanczos)?;

    let mut vectors = Matrix::zeros(n, k);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut lx = vec![0.0; n];
    // Largest θ first, so λ = 2 - θ comes out ascending.
    for (j, (theta, u)) in pairs.values.iter().zip(&pairs.vectors).enumerate() {
        let lambda = (2.0 - theta).max(0.0);
        let x: Vec<f64> = u.iter().zip(&shifted.inv_sqrt).map(|(a, s)| a * s).collect();
        op.laplacian_matvec_into(&x, &mut lx);
        let mut dx = 0.0;
        let mut r = 0.0;
        for i in 0..n {
            let d = op.degrees[i] * x[i];
            dx += d * d;
            let ri = lx[i] - lambda * d;
            r += ri * ri;
        }
        residuals.push(if dx > 0.0 { libm::sqrt(r / dx) } else { libm::sqrt(r) });
        eigenvalues.push(lambda);
        vectors.set_column(j, &x);
    }
    Ok(EigenResult {
        eigenvalues,
        vectors,
        residuals,
        matvecs: pairs.matvecs,
    })
}

/// Top generalized singular triplets of a regularized biadjacency matrix.
#[derive(Debug, Clone)]
pub struct Gsvd {
    /// Descending.
    pub sigmas: Vec<f64>,
    /// `n × k`, `X_1ᵀ D_{α,1} X_1 = I`.
    pub left: Matrix,
    /// `m × k`, `X_2ᵀ D_{α,2} X_2 = I`.
    pub right: Matrix,
    /// Max of the two relative residuals of `B_α X_2 = D_1 X_1 Σ`, `B_αᵀ X_1 = D_2 X_2 Σ`.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
}

// Implicit M = D_1^{-1/2} (B + αJ) D_2^{-1/2}
struct NormalizedBiadjacency<'a> {
    b: &'a BipartiteGraph,
    alpha: f64,
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl NormalizedBiadjacency<'_> {
    // y (n) = M x (m)
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let t: Vec<f64> = x.iter().zip(&self.s2).map(|(a, s)| a * s).collect();
        self.b.matvec_into(&t, y);
        let shift = self.alpha * t.iter().sum::<f64>();
        for (yi, &s) in y.iter_mut().zip(&self.s1) {
            *yi = (*yi + shift) * s;
        }
    }

    // y (m) = Mᵀ x (n)
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let t: Vec<f64> = x.iter().zip(&self.s1).map(|(a, s)| a * s).collect();
        self.b.matvec_transpose_into(&t, y);
        let shift = self.alpha * t.iter().sum::<f64>();
        for (yi, &s) in y.iter_mut().zip(&self.s2) {
            *yi = (*yi + shift) * s;
        }
    }
}

// M Mᵀ (left) or Mᵀ M (right)
struct Gram<'a, 'b> {
    m: &'a NormalizedBiadjacency<'b>,
    left: bool,
}

impl LinearOperator for Gram<'_, '_> {
    fn dim(&self) -> usize {
        if self.left {
            self.m.b.left_count()
        } else {
            self.m.b.right_count()
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.left {
            let mut t = vec![0.0; self.m.b.right_count()];
            self.m.apply_transpose(x, &mut t);
            self.m.apply(&t, y);
        } else {
            let mut t = vec![0.0; self.m.b.left_count()];
            self.m.apply(x, &mut t);
            self.m.apply_transpose(&t, y);
        }
    }
}

/// Top `k` solutions of `B_α x_2 = σ D_{α,1} x_1`, `B_αᵀ x_1 = σ D_{α,2} x_2`
/// with `B_α = B + αJ`, via the singular vectors of
/// `D_{α,1}^{-1/2} B_α D_{α,2}^{-1/2}`.
///
/// Singular vectors on the smaller side come from the eigenvectors of the
/// corresponding Gram operator; the other side is `M v / σ`. For `σ` at
/// rounding level the other side is an orthonormal completion.
pub fn regularized_gsvd(
    b: &BipartiteGraph,
    alpha: f64,
    k: usize,
    cfg: &SolverConfig,
) -> Result<Gsvd> {
    check_alpha(alpha)?;
    let (n, m) = (b.left_count(), b.right_count());
    if k == 0 || k > n.min(m) {
        return Err(invalid(alloc::format!(
            "cannot compute {k} singular triplets of a {n} x {m} matrix"
        )));
    }
    let d1: Vec<f64> = b.left_degrees().into_iter().map(|d| d + alpha * m as f64).collect();
    let d2: Vec<f64> = b.right_degrees().into_iter().map(|d| d + alpha * n as f64).collect();
    // a zero-degree node only matters when there is one
    let has_zero = d1.iter().chain(&d2).any(|&d| d == 0.0);
    if cfg.singular == SingularDegree::SelfLoop && has_zero {
        return Err(invalid("self-loops have no bipartite counterpart"));
    }
    let s1 = inverse_sqrt(&d1, cfg.singular)?;
    let s2 = inverse_sqrt(&d2, cfg.singular).map_err(|e| match e {
        Error::SingularDegree { node } => Error::SingularDegree { node: n + node },
        e => e,
    })?;
    let mop = NormalizedBiadjacency { b, alpha, s1, s2 };
    let left = n <= m;
    let gram = Gram { m: &mop, left };
    let pairs = lanczos_extreme(&gram, Which::Largest, k, &cfg.lanczos)?;

    let (small_dim, other_dim) = if left { (n, m) } else { (m, n) };
    let mut small_vecs = Vec::with_capacity(k);
    let mut other_vecs: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut sigmas = Vec::with_capacity(k);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.lanczos.seed ^ 0x9e37_79b9_7f4a_7c15);
    for (theta, v) in pairs.values.iter().zip(&pairs.vectors) {
        let sigma = libm::sqrt(theta.max(0.0));
        let mut other = vec![0.0; other_dim];
        if left {
            mop.apply_transpose(v, &mut other);
        } else {
            mop.apply(v, &mut other);
        }
        let on = norm(&other);
        if sigma > 1e-10 && on > 0.0 {
            scale(1.0 / on, &mut other);
        } else {
            other = random_orthogonal(other_dim, &other_vecs, &[], &mut rng)
                .ok_or_else(|| invalid("no orthonormal completion for a zero singular value"))?;
        }
        debug_assert_eq!(v.len(), small_dim);
        sigmas.push(sigma);
        small_vecs.push(v.clone());
        other_vecs.push(other);
    }
    let (us, vs) = if left {
        (small_vecs, other_vecs)
    } else {
        (other_vecs, small_vecs)
    };
    let mut x1 = Matrix::zeros(n, k);
    let mut x2 = Matrix::zeros(m, k);
    let mut residuals = Vec::with_capacity(k);
    for j in 0..k {
        let a: Vec<f64> = us[j].iter().zip(&mop.s1).map(|(u, s)| u * s).collect();
        let c: Vec<f64> = vs[j].iter().zip(&mop.s2).map(|(v, s)| v * s).collect();
        // B_α x2 - σ D1 x1 and B_αᵀ x1 - σ D2 x2
        let mut bx2 = vec![0.0; n];
        b.matvec_into(&c, &mut bx2);
        let s = alpha * c.iter().sum::<f64>();
        let mut r1 = 0.0;
        let mut n1 = 0.0;
        for i in 0..n {
            let lhs = bx2[i] + s;
            let rhs = sigmas[j] * d1[i] * a[i];
            r1 += (lhs - rhs) * (lhs - rhs);
            n1 += (d1[i] * a[i]) * (d1[i] * a[i]);
        }
        let mut btx1 = vec![0.0; m];
        b.matvec_transpose_into(&a, &mut btx1);
        let s = alpha * a.iter().sum::<f64>();
        let mut r2 = 0.0;
        let mut n2 = 0.0;
        for i in 0..m {
            let lhs = btx1[i] + s;
            let rhs = sigmas[j] * d2[i] * c[i];
            r2 += (lhs - rhs) * (lhs - rhs);
            n2 += (d2[i] * c[i]) * (d2[i] * c[i]);
        }
        let rel = |r: f64, d: f64| if d > 0.0 { libm::sqrt(r / d) } else { libm::sqrt(r) };
        residuals.push(rel(r1, n1).max(rel(r2, n2)));
        x1.set_column(j, &a);
        x2.set_column(j, &c);
    }
    Ok(Gsvd {
        sigmas,
        left: x1,
        right: x2,
        residuals,
        matvecs: pairs.matvecs,
    })
}
