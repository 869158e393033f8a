use super::*;
use crate::graph::{row_normalize, SocialGraph, SusceptibilityProfile};
use crate::model::{build_response_matrix, ModelConfig, Variant};

fn four_node() -> ResponseMatrix {
    let rows = vec![
        vec![1.0, 4.0, 0.0, 1.0],
        vec![1.0, 8.0, 0.0, 3.0],
        vec![4.0, 1.0, 1.0, 0.0],
        vec![0.0, 0.0, 8.0, 1.0],
    ];
    let w = row_normalize(&SocialGraph::from_matrix(&rows).unwrap()).unwrap();
    let l = SusceptibilityProfile::explicit(vec![0.9, 0.1, 0.1, 0.5]).unwrap();
    build_response_matrix(&ModelConfig::gfj(w, l).unwrap()).unwrap()
}

fn three_node() -> ResponseMatrix {
    let w = crate::graph::InfluenceMatrix::from_rows(&[
        vec![0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.5],
        vec![0.5, 0.5, 0.0],
    ])
    .unwrap();
    let l = SusceptibilityProfile::explicit(vec![1.0, 0.5, 0.0]).unwrap();
    build_response_matrix(&ModelConfig::gfj(w, l).unwrap()).unwrap()
}

fn synthetic(rows: &[[f64; 4]]) -> ResponseMatrix {
    let h = nalgebra::DMatrix::from_fn(4, 4, |i, j| rows[i][j]);
    ResponseMatrix::from_matrix(h, Variant::Gfj).unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn four_node_basis() {
    let basis = spectral_basis(&four_node(), EIGEN_TOL).unwrap();
    assert!(close(basis.sigmas(), &[1.22686, 1.02299, 0.46727, 0.094944], 1e-5));
    assert!(close(&basis.vector(0), &[0.0578785, 0.915561, 0.36703, 0.153909], 1e-5));
    assert!(close(&basis.vector(1), &[-0.0122301, -0.394875, 0.887539, 0.237064], 1e-5));
    assert_eq!(basis.count_above_one(), 2);
    let gram = basis.b().transpose() * basis.b();
    assert!((gram - nalgebra::DMatrix::identity(4, 4)).amax() < 1e-12);
}

#[test]
fn four_node_candidates() {
    let h = four_node();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    let b21 = candidate_b2_1(&basis).unwrap();
    assert!((basis.delta_p3(b21.s.values()) - 0.505183).abs() < 1e-5);
    let b2t = candidate_b2_t(&basis).unwrap();
    assert!(close(b2t.s.values(), &[0.0632164, 1.0, 0.40088, 0.168103], 1e-5));
    assert!((basis.delta_p3(b2t.s.values()) - 0.602663).abs() < 1e-5);
    let heu = heuristic_v_gt1(&basis).unwrap();
    assert!(close(heu.s.values(), &[0.0549607, 0.733446, 1.0, 0.32813], 1e-5));
    assert!((basis.delta_p3(heu.s.values()) - 0.623852).abs() < 1e-5);
    let b11 = candidate_b1_1(&h).unwrap();
    assert_eq!(b11.s.values(), &[0.0, 1.0, 0.0, 0.0]);
    let col: f64 = h.matrix().column(1).sum();
    assert!((basis.delta_p4(b11.s.values()) - (col - 1.0)).abs() < 1e-12);
    assert!((col - 1.755185).abs() < 1e-5);
}

#[test]
fn three_node_candidates() {
    let h = three_node();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    assert!(close(candidate_b2_1(&basis).unwrap().s.values(), &[0.0, 0.30013, 0.95390], 1e-4));
    let b2t = candidate_b2_t(&basis).unwrap();
    assert!(close(b2t.s.values(), &[0.0, 0.31464, 1.0], 1e-4));
    assert!(close(&h.apply(b2t.s.values()), &[0.80418, 0.60836, 1.0], 1e-4));
    assert_eq!(candidate_subspace_qp(&basis, SubspaceMode::StrictlyGreater).unwrap_err(), Unavailable::TooFewSingularValues);
    let g = global_p23_search(&basis, 8, 12).unwrap();
    assert!(g.certified);
    let (grid_best, grid_delta) = brute_force_max(&h, Metric::P3, 20).unwrap();
    assert!(close(grid_best.values(), &[0.0, 0.75, 1.0], 1e-12));
    assert!(basis.delta_p3(g.s.values()) >= grid_delta - 1e-12);
    assert!(close(g.s.values(), &[0.0, 0.75, 1.0], 0.02));
}

#[test]
fn identity_is_never_polarizing() {
    let h = ResponseMatrix::from_matrix(nalgebra::DMatrix::identity(3, 3), Variant::Gfj).unwrap();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    assert!(basis.sigmas().iter().all(|&s| (s - 1.0).abs() < 1e-15));
    assert!(basis.vector(0).iter().all(|&x| x >= 0.0));
    assert_eq!(candidate_b2_1(&basis).unwrap_err(), Unavailable::NotPolarizing);
    assert_eq!(candidate_b1_1(&h).unwrap_err(), Unavailable::NotPolarizing);
    assert_eq!(candidate_lp_p4(&basis).unwrap_err(), Unavailable::NotPolarizing);
    assert_eq!(global_p23_search(&basis, 4, 12).unwrap_err(), Unavailable::NotPolarizing);
    for m in [Metric::P2, Metric::P3, Metric::P4] {
        let (s, d) = brute_force_max(&h, m, 4).unwrap();
        assert_eq!((s.values(), d), (&[0.0; 3][..], 0.0));
    }
}

#[test]
fn lp_matches_vertex_enumeration() {
    let h = three_node();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    let lp = candidate_lp_p4(&basis).unwrap();
    let mut best = f64::NEG_INFINITY;
    for bits in 0..8u32 {
        let s: Vec<f64> = (0..3).map(|i| ((bits >> i) & 1) as f64).collect();
        best = best.max(basis.delta_p4(&s));
    }
    assert!((basis.delta_p4(lp.s.values()) - best).abs() < 1e-12);
    let b11 = candidate_b1_1(&h).unwrap();
    assert!(basis.delta_p4(lp.s.values()) >= basis.delta_p4(b11.s.values()) - 1e-12);
}

#[test]
fn degenerate_top_singular_value_gets_nonnegative_leading_vector() {
    let h = synthetic(&[
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    assert!((basis.sigmas()[0] - 2f64.sqrt()).abs() < 1e-12);
    assert!((basis.sigmas()[1] - 2f64.sqrt()).abs() < 1e-12);
    assert!(basis.vector(0).iter().all(|&x| x >= 0.0));
    let gram = basis.b().transpose() * basis.b();
    assert!((gram - nalgebra::DMatrix::identity(4, 4)).amax() < 1e-12);
}

/// Zooming grid over the two coefficients of the `σ > 1` span.
fn subspace_grid_oracle(basis: &SpectralBasis) -> f64 {
    let v0 = basis.vector(0);
    let v1 = basis.vector(1);
    let d = [basis.sigmas()[0].powi(2) - 1.0, basis.sigmas()[1].powi(2) - 1.0];
    let feasible = |a: f64, b: f64| v0.iter().zip(&v1).all(|(x, y)| (-1e-12..=1.0 + 1e-12).contains(&(a * x + b * y)));
    let (mut ca, mut cb, mut half) = (0.0, 0.0, 2.0);
    let mut best = 0.0;
    for _ in 0..12 {
        let (mut ba, mut bb) = (ca, cb);
        for i in 0..=200 {
            for j in 0..=200 {
                let a = ca - half + 2.0 * half * i as f64 / 200.0;
                let b = cb - half + 2.0 * half * j as f64 / 200.0;
                let f = d[0] * a * a + d[1] * b * b;
                if f > best && feasible(a, b) {
                    best = f;
                    (ba, bb) = (a, b);
                }
            }
        }
        (ca, cb, half) = (ba, bb, half / 8.0);
    }
    best
}

#[test]
fn subspace_qp_matches_grid_oracle() {
    let h = synthetic(&[
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.7, 0.3, 0.0, 0.0],
        [0.2, 0.8, 0.0, 0.0],
    ]);
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    assert_eq!(basis.count_above_one(), 2);
    let qp = candidate_subspace_qp(&basis, SubspaceMode::StrictlyGreater).unwrap();
    assert!(qp.certified);
    let oracle = subspace_grid_oracle(&basis);
    assert!((basis.delta_p3(qp.s.values()) - oracle).abs() < 1e-4, "{} vs {oracle}", basis.delta_p3(qp.s.values()));
    let b2t = candidate_b2_t(&basis).unwrap();
    assert!(basis.delta_p3(qp.s.values()) >= basis.delta_p3(b2t.s.values()) - 1e-12);
}

#[test]
fn greater_or_equal_mode_keeps_the_p3_gain() {
    let h = four_node();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    let gt = candidate_subspace_qp(&basis, SubspaceMode::StrictlyGreater).unwrap();
    let ge = candidate_subspace_qp(&basis, SubspaceMode::GreaterOrEqual).unwrap();
    assert!(basis.delta_p3(ge.s.values()) >= basis.delta_p3(gt.s.values()) - 1e-9);
    let heu = heuristic_v_gt1(&basis).unwrap();
    assert!(basis.delta_p3(gt.s.values()) >= basis.delta_p3(heu.s.values()) - 1e-12);
}

#[test]
fn lift_examples() {
    let h = three_node();
    let s = OpinionVector::new(vec![0.2, 0.5, 0.9]).unwrap();
    assert_eq!(concordance_lift(&s, &h, Metric::P3).unwrap(), s);
    let s = OpinionVector::new(vec![-0.5, 0.8, 0.1]).unwrap();
    let lifted = concordance_lift(&s, &h, Metric::P3).unwrap();
    assert_eq!(lifted.values(), &[0.5, 0.8, 0.1]);
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    assert!(basis.delta_p3(lifted.values()) >= basis.delta_p3(s.values()) - 1e-12);
    assert!(concordance_lift(&s, &h, Metric::P1).is_err());
}

#[test]
fn size_limits() {
    let h = ResponseMatrix::from_matrix(nalgebra::DMatrix::identity(13, 13), Variant::Gfj).unwrap();
    assert_eq!(brute_force_max(&h, Metric::P3, 10).unwrap_err(), Unavailable::SizeLimit);
    assert!(brute_force_max(&h, Metric::P3, 0).is_ok());
    let basis = spectral_basis(&three_node(), EIGEN_TOL).unwrap();
    assert_eq!(global_p23_search(&basis, 0, 12).unwrap_err(), Unavailable::ZeroBudget);
}

#[test]
fn large_instances_use_multistart() {
    let h = three_node();
    let basis = spectral_basis(&h, EIGEN_TOL).unwrap();
    let exact = global_p23_search(&basis, 8, 12).unwrap();
    let multi = global_p23_search(&basis, 8, 0).unwrap();
    assert_eq!(multi.provenance, Provenance::Multistart);
    assert!(!multi.certified);
    assert!((basis.delta_p3(multi.s.values()) - basis.delta_p3(exact.s.values())).abs() < 1e-9);
}
