#![allow(dead_code)]

use fjpolar::graph::{InfluenceMatrix, SelfWeight};
use fjpolar::model::{build_response_matrix, Convergence};
use fjpolar::{
    build_susceptibility, convergence_check, load_edge_list, pagerank, row_normalize, EdgeListFormat,
    ModelConfig, OpinionVector, ResponseMatrix, SocialGraph, SusceptibilityProfile, SusceptibilityScheme,
};
use nalgebra::DMatrix;
use rand::Rng;

pub const KARATE: &str = include_str!("../../data/karate.edges");

pub fn karate() -> SocialGraph {
    load_edge_list(KARATE.as_bytes(), EdgeListFormat { directed: false }).unwrap()
}

pub fn gfj(rows: &[Vec<f64>], lambdas: &[f64]) -> ModelConfig {
    ModelConfig::gfj(
        InfluenceMatrix::from_rows(rows).unwrap(),
        SusceptibilityProfile::explicit(lambdas.to_vec()).unwrap(),
    )
    .unwrap()
}

pub fn opinions(v: &[f64]) -> OpinionVector {
    OpinionVector::new(v.to_vec()).unwrap()
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

/// Weighted four-node graph with self weights and susceptibilities (0.9, 0.1, 0.1, 0.5).
pub fn four_node() -> ModelConfig {
    let rows = vec![
        vec![1.0, 4.0, 0.0, 1.0],
        vec![1.0, 8.0, 0.0, 3.0],
        vec![4.0, 1.0, 1.0, 0.0],
        vec![0.0, 0.0, 8.0, 1.0],
    ];
    let w = row_normalize(&SocialGraph::from_matrix(&rows).unwrap()).unwrap();
    ModelConfig::gfj(w, SusceptibilityProfile::explicit(vec![0.9, 0.1, 0.1, 0.5]).unwrap()).unwrap()
}

/// Triangle with equal splits: one naive, one half-susceptible and one stubborn node.
pub fn three_node() -> ModelConfig {
    let half = vec![
        vec![0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.5],
        vec![0.5, 0.5, 0.0],
    ];
    gfj(&half, &[1.0, 0.5, 0.0])
}

pub fn karate_model(scheme: SusceptibilityScheme) -> (SocialGraph, ModelConfig) {
    let g = karate();
    let w = row_normalize(&g).unwrap();
    let c = pagerank(&g, 0.85, 1e-12, 10_000).unwrap();
    let l = build_susceptibility(&c, scheme, 0.01).unwrap();
    let cfg = ModelConfig::gfj(w, l).unwrap();
    (g, cfg)
}

pub fn uniform_opinions<R: Rng>(rng: &mut R, n: usize, lo: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..=1.0)).collect()
}

/// Random tie set on `n` nodes where every node has an outgoing tie.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, directed: bool) -> SocialGraph {
    let density = rng.random_range(0.2..0.9);
    let mut w = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && (directed || i < j) && rng.random_bool(density) {
                let x = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.1..2.0) };
                w[(i, j)] = x;
                if !directed {
                    w[(j, i)] = x;
                }
            }
        }
    }
    for i in 0..n {
        if w.row(i).sum() == 0.0 {
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            w[(i, j)] = 1.0;
            if !directed {
                w[(j, i)] = 1.0;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if w[(i, j)] > 0.0 && (directed || i < j) {
                edges.push((i, j, w[(i, j)]));
            }
        }
    }
    SocialGraph::from_edges(n, &edges, directed).unwrap()
}

/// Random susceptibility with occasional exactly stubborn or naive nodes.
pub fn random_lambdas<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random_range(0.0..1.0),
        })
        .collect()
}

/// A converged generalized model with `2 <= n <= max_n`, with its response matrix.
pub fn random_gfj<R: Rng>(rng: &mut R, max_n: usize) -> (ModelConfig, ResponseMatrix) {
    loop {
        let n = rng.random_range(2..=max_n);
        let directed = rng.random_bool(0.5);
        let g = random_graph(rng, n, directed);
        let w = row_normalize(&g).unwrap();
        let l = SusceptibilityProfile::explicit(random_lambdas(rng, n)).unwrap();
        let cfg = ModelConfig::gfj(w, l).unwrap();
        if convergence_check(&cfg).unwrap().verdict == Convergence::Converges {
            let h = build_response_matrix(&cfg).unwrap();
            return (cfg, h);
        }
    }
}

/// Generalized model whose response matrix is doubly stochastic: uniform susceptibility
/// and an influence matrix mixing random permutations.
pub fn doubly_stochastic_gfj<R: Rng>(rng: &mut R, max_n: usize) -> (ModelConfig, ResponseMatrix) {
    let n = rng.random_range(2..=max_n);
    let mut w = DMatrix::<f64>::zeros(n, n);
    let k = rng.random_range(1..4);
    for _ in 0..k {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let c = 1.0 / k as f64;
        for (i, &j) in perm.iter().enumerate() {
            w[(i, j)] += c;
        }
    }
    let lambda = rng.random_range(0.05..0.95);
    let cfg = ModelConfig::gfj(
        InfluenceMatrix::new(w).unwrap(),
        SusceptibilityProfile::constant(n, lambda).unwrap(),
    )
    .unwrap();
    let h = build_response_matrix(&cfg).unwrap();
    (cfg, h)
}

/// Restricted model on random undirected ties.
pub fn random_rfj<R: Rng>(rng: &mut R, max_n: usize) -> (ModelConfig, ResponseMatrix) {
    let n = rng.random_range(2..=max_n);
    let g = random_graph(rng, n, false);
    let cfg = ModelConfig::rfj(g.adjacency()).unwrap();
    let h = build_response_matrix(&cfg).unwrap();
    (cfg, h)
}

/// Variational model with random finite self weights.
pub fn random_vfj<R: Rng>(rng: &mut R, max_n: usize) -> ModelConfig {
    let n = rng.random_range(2..=max_n);
    let directed = rng.random_bool(0.5);
    let g = random_graph(rng, n, directed);
    let own = (0..n).map(|_| SelfWeight::Finite(rng.random_range(0.1..3.0))).collect();
    ModelConfig::vfj(g.adjacency(), own).unwrap()
}

/// Preferential-attachment graph: each new node ties to `m` existing nodes.
pub fn preferential_attachment<R: Rng>(rng: &mut R, n: usize, m: usize) -> SocialGraph {
    let mut targets: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for i in 0..=m {
        for j in 0..i {
            edges.push((j, i, 1.0));
            seen.insert((j, i));
            targets.extend([i, j]);
        }
    }
    for v in m + 1..n {
        let mut chosen = std::collections::BTreeSet::new();
        while chosen.len() < m {
            chosen.insert(targets[rng.random_range(0..targets.len())]);
        }
        for u in chosen {
            edges.push((u, v, 1.0));
            seen.insert((u, v));
            targets.extend([u, v]);
        }
    }
    SocialGraph::from_edges(n, &edges, false).unwrap()
}
