//! Solver results against dense decompositions from nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specreg_core::{
    bipartite_spectral_embedding, lanczos_extreme, regularized_gsvd, smallest_generalized_eigenpairs,
    spectral_embedding, theory::{bipartite_thresholds, verify_interleaving}, bipartite_block_model, BipartiteGraph, EmbeddingConfig, LanczosConfig, Matrix, RegularizationTarget,
    RegularizedOperator, SolverConfig, SparseGraph, Which,
};

fn random_graph(n: usize, p: f64, seed: u64) -> SparseGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    SparseGraph::from_edges(n, edges).unwrap()
}

fn random_bipartite(n: usize, m: usize, p: f64, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    BipartiteGraph::from_edges(n, m, edges).unwrap()
}

fn to_na(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

// Ascending eigenvalues of D_α^{-1/2} L_α D_α^{-1/2}.
fn oracle_spectrum(g: &SparseGraph, alpha: f64) -> Vec<f64> {
    let n = g.node_count();
    let a = to_na(&g.to_dense()).add_scalar(alpha);
    let d: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        let l = if i == j { d[i] - a[(i, j)] } else { -a[(i, j)] };
        l / (d[i] * d[j]).sqrt()
    });
    let mut v: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn d_orthonormality_error(x: &Matrix, d: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..x.cols() {
        for b in 0..x.cols() {
            let g: f64 = (0..x.rows()).map(|i| x[(i, a)] * d[i] * x[(i, b)]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

#[test]
fn generalized_eigenpairs_match_dense() {
    for seed in 0..5 {
        let g = random_graph(50, 0.15, seed);
        let alpha = [0.01, 0.1, 1.0, 0.5, 2.0][seed as usize];
        let op = RegularizedOperator::new(&g, alpha).unwrap();
        let r = smallest_generalized_eigenpairs(&op, 6, &SolverConfig::default()).unwrap();
        let oracle = oracle_spectrum(&g, alpha);
        for (got, want) in r.eigenvalues.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-8, "seed {seed}: {got} vs {want}");
        }
        assert!(d_orthonormality_error(&r.vectors, op.degrees()) < 1e-8);
        assert!(r.residuals.iter().all(|&res| res < 1e-8));
    }
}

#[test]
fn lanczos_matches_dense_on_random_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 50;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let mut oracle: Vec<f64> = SymmetricEigen::new(to_na(&m)).eigenvalues.iter().copied().collect();
    oracle.sort_by(f64::total_cmp);
    let cfg = LanczosConfig::default();
    let top = lanczos_extreme(&m, Which::Largest, 5, &cfg).unwrap();
    let bottom = lanczos_extreme(&m, Which::Smallest, 5, &cfg).unwrap();
    for i in 0..5 {
        assert!((top.values[i] - oracle[n - 1 - i]).abs() < 1e-8);
        assert!((bottom.values[i] - oracle[i]).abs() < 1e-8);
        let v = &top.vectors[i];
        let mv = {
            let mut y = vec![0.0; n];
            for r in 0..n {
                y[r] = (0..n).map(|c| m[(r, c)] * v[c]).sum();
            }
            y
        };
        let res: f64 = mv.iter().zip(v).map(|(a, b)| (a - top.values[i] * b).powi(2)).sum::<f64>().sqrt();
        assert!(res < 1e-8);
    }
}

#[test]
fn gsvd_matches_dense_svd() {
    let (n, m) = (30, 20);
    let b = random_bipartite(n, m, 0.2, 3);
    let alpha = 0.05;
    let ba = to_na(&b.to_dense()).add_scalar(alpha);
    let d1: Vec<f64> = (0..n).map(|i| ba.row(i).sum()).collect();
    let d2: Vec<f64> = (0..m).map(|j| ba.column(j).sum()).collect();
    let s = DMatrix::from_fn(n, m, |i, j| ba[(i, j)] / (d1[i] * d2[j]).sqrt());
    let mut oracle: Vec<f64> = s.svd(false, false).singular_values.iter().copied().collect();
    oracle.sort_by(|a, b| b.total_cmp(a));

    let r = regularized_gsvd(&b, alpha, 5, &SolverConfig::default()).unwrap();
    for (got, want) in r.sigmas.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
    assert!(d_orthonormality_error(&r.left, &d1) < 1e-8);
    assert!(d_orthonormality_error(&r.right, &d2) < 1e-8);
    assert!(r.residuals.iter().all(|&res| res < 1e-8));
}

#[test]
fn graph_embedding_is_d_orthonormal() {
    let g = random_graph(60, 0.08, 21);
    let e = spectral_embedding(&g, &EmbeddingConfig::relative(8, 1.0)).unwrap();
    let op = RegularizedOperator::new(&g, e.alpha).unwrap();
    assert!(d_orthonormality_error(&e.coordinates, op.degrees()) < 1e-8);
    let oracle = oracle_spectrum(&g, e.alpha);
    for (got, want) in e.eigenvalues.iter().zip(&oracle[1..]) {
        assert!((got - want).abs() < 1e-8);
    }
}

#[test]
fn bipartite_embedding_is_d_orthonormal_in_both_targets() {
    let b = random_bipartite(25, 18, 0.25, 8);
    let a = specreg_core::bipartite_to_adjacency(&b);
    for target in [RegularizationTarget::Biadjacency, RegularizationTarget::Adjacency] {
        let cfg = EmbeddingConfig {
            target,
            ..EmbeddingConfig::absolute(4, 0.02)
        };
        let e = bipartite_spectral_embedding(&b, &cfg).unwrap();
        let d: Vec<f64> = match target {
            RegularizationTarget::Adjacency => RegularizedOperator::new(&a, 0.02).unwrap().degrees().to_vec(),
            RegularizationTarget::Biadjacency => {
                let ba = to_na(&b.to_dense()).add_scalar(0.02);
                let mut d: Vec<f64> = (0..25).map(|i| ba.row(i).sum()).collect();
                d.extend((0..18).map(|j| ba.column(j).sum()));
                d
            }
        };
        assert!(d_orthonormality_error(&e.coordinates, &d) < 1e-8);
    }
}

#[test]
fn bipartite_block_spectrum_interleaves_thresholds() {
    let cases: [(&[usize], &[usize], f64); 4] = [
        (&[30, 20, 10], &[25, 15, 5], 1.0),
        (&[12, 7, 3], &[9, 6, 4], 0.2),
        (&[8, 5], &[8, 5], 3.0),
        (&[10, 6, 4, 2], &[9, 7, 5, 3], 0.05),
    ];
    // both parts in decreasing block order
    for (ns, ms, alpha) in cases {
        let (b, _, _) = bipartite_block_model(ns, ms).unwrap();
        let ba = to_na(&b.to_dense()).add_scalar(alpha);
        let (n, m) = (ba.nrows(), ba.ncols());
        let d1: Vec<f64> = (0..n).map(|i| ba.row(i).sum()).collect();
        let d2: Vec<f64> = (0..m).map(|j| ba.column(j).sum()).collect();
        let s = DMatrix::from_fn(n, m, |i, j| ba[(i, j)] / (d1[i] * d2[j]).sqrt());
        let mut sigmas: Vec<f64> = s.svd(false, false).singular_values.iter().copied().collect();
        sigmas.sort_by(|a, b| b.total_cmp(a));
        let eigs: Vec<f64> = sigmas[..ns.len()].iter().map(|s| 1.0 - s).collect();
        let thr = bipartite_thresholds(ns, ms, alpha).unwrap();
        assert!(verify_interleaving(&eigs, &thr, 1e-10).passed, "{ns:?} {ms:?} {alpha}: {eigs:?} vs {:?}", thr.sorted());
    }
}
