//! Spectral analysis of `HᵀH` and construction of prejudice vectors that maximize the
//! growth of the 2-norm (P2, P3) or the 1-norm (P4) of opinions.
//!
//! Every candidate lives in the positive branch `[0, 1]^n`; its negation polarizes equally.

mod brute;
mod heuristic;
mod qp;
mod set;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::OpinionVector;
use crate::linalg::{column_sums, dotv, gram_eigen, mat_vec};
use crate::metrics::Metric;
use crate::model::ResponseMatrix;

pub use brute::brute_force_max;
pub use heuristic::heuristic_v_gt1;
pub use qp::{candidate_subspace_qp, global_p23_search, global_p23_search_seeded, SubspaceMode};
pub use set::{candidate_set, CandidateSet, CandidateSetOptions};

/// Band around 1 used to classify singular values.
pub const SIGMA_TOL: f64 = 1e-9;

/// Default off-diagonal tolerance of the eigensolver.
pub const EIGEN_TOL: f64 = 1e-12;

/// Singular values of `H` with the eigenvectors of `HᵀH` as columns of `B`.
#[derive(Clone, Debug)]
pub struct SpectralBasis {
    sigmas: Vec<f64>,
    b: DMatrix<f64>,
    h: DMatrix<f64>,
}

/// Eigendecomposition of `HᵀH`, sorted by decreasing singular value. Each eigenvector is
/// signed so its largest-magnitude entry is positive; the leading one is made nonnegative.
pub fn spectral_basis(h: &ResponseMatrix, tol: f64) -> Result<SpectralBasis> {
    let hm = h.matrix();
    let eig = gram_eigen(hm, tol, 200)?;
    let n = hm.ncols();
    let mut b = eig.vectors;
    for k in 0..n {
        let mut col = b.column_mut(k);
        let pivot = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if pivot < 0.0 {
            col.neg_mut();
        }
    }
    if n > 0 {
        if b.column(0).iter().any(|&x| x < -1e-9) {
            perron_leading(&mut b, &eig.values)?;
        }
        b.column_mut(0).iter_mut().for_each(|x| *x = x.max(0.0));
    }
    let sigmas = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let basis = SpectralBasis { sigmas, b, h: hm.clone() };
    basis.verify()?;
    Ok(basis)
}

/// Replaces the leading eigenvector by a nonnegative one when the top eigenvalue is
/// repeated. The projection of `1` onto the top eigenspace is the limit of the power
/// iteration from `1`, hence nonnegative; the rest of the cluster is re-orthogonalized.
fn perron_leading(b: &mut DMatrix<f64>, values: &[f64]) -> Result<()> {
    let n = b.nrows();
    let top = values[0];
    let cluster = values.iter().take_while(|&&l| top - l <= 1e-10 * top.max(1.0)).count();
    let mut u = nalgebra::DVector::zeros(n);
    for k in 0..cluster {
        u += b.column(k) * b.column(k).sum();
    }
    let norm = u.norm();
    if cluster < 2 || norm == 0.0 || u.iter().any(|&x| x < -1e-9 * norm) {
        return Err(Error::Numerical("leading eigenvector has mixed signs".into()));
    }
    let mut basis = vec![u / norm];
    let mut pool: Vec<_> = (0..cluster).map(|k| b.column(k).into_owned()).collect();
    while basis.len() < cluster {
        let residuals: Vec<_> = pool
            .iter()
            .map(|v| {
                let mut w = v.clone();
                for q in &basis {
                    w -= q * q.dot(&w);
                }
                w
            })
            .collect();
        let best = (0..pool.len())
            .max_by(|&i, &j| residuals[i].norm().total_cmp(&residuals[j].norm()))
            .expect("pool outlives the loop");
        let w = &residuals[best];
        basis.push(w / w.norm());
        pool.remove(best);
    }
    for (k, q) in basis.into_iter().enumerate() {
        b.set_column(k, &q);
    }
    Ok(())
}

impl SpectralBasis {
    pub fn n(&self) -> usize {
        self.sigmas.len()
    }

    /// Descending singular values.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Eigenvectors as columns.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.b.column(k).iter().copied().collect()
    }

    pub fn response(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Number of singular values strictly above one.
    pub fn count_above_one(&self) -> usize {
        self.sigmas.iter().filter(|&&s| s > 1.0 + SIGMA_TOL).count()
    }

    /// Number of singular values equal to one within `SIGMA_TOL`.
    pub fn count_equal_one(&self) -> usize {
        self.sigmas.iter().filter(|&&s| (s - 1.0).abs() <= SIGMA_TOL).count()
    }

    pub fn coefficients(&self, s: &[f64]) -> Result<CoefficientVector> {
        check_len(self.n(), s.len())?;
        Ok(CoefficientVector(self.b.tr_mul(&nalgebra::DVector::from_column_slice(s)).as_slice().to_vec()))
    }

    pub fn reconstruct(&self, alpha: &CoefficientVector) -> Vec<f64> {
        mat_vec(&self.b, &alpha.0)
    }

    /// `‖Hs‖² - ‖s‖²`
    pub fn delta_p3(&self, s: &[f64]) -> f64 {
        let z = mat_vec(&self.h, s);
        dotv(&z, &z) - dotv(s, s)
    }

    /// `‖Hs‖₁ - ‖s‖₁`
    pub fn delta_p4(&self, s: &[f64]) -> f64 {
        let z = mat_vec(&self.h, s);
        z.iter().map(|x| x.abs()).sum::<f64>() - s.iter().map(|x| x.abs()).sum::<f64>()
    }

    fn verify(&self) -> Result<()> {
        let ata = self.h.tr_mul(&self.h);
        let scale = 1.0 + ata.amax();
        for k in 0..self.n() {
            let v = self.b.column(k);
            let r = (&ata * v - v * self.sigmas[k].powi(2)).amax();
            if r > 1e-8 * scale {
                return Err(Error::Convergence { what: "eigenpair check", residual: r });
            }
        }
        Ok(())
    }
}

/// Coordinates of a vector in the eigenbasis, `α = Bᵀs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CoefficientVector(pub Vec<f64>);

/// Why a candidate could not be produced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Unavailable {
    /// The model cannot increase the targeted index.
    NotPolarizing,
    /// Fewer singular values above one than the construction needs.
    TooFewSingularValues,
    SizeLimit,
    ZeroBudget,
    SolverFailure(String),
}

impl fmt::Display for Unavailable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unavailable::NotPolarizing => write!(f, "model is not polarizing for this index"),
            Unavailable::TooFewSingularValues => write!(f, "not enough singular values above one"),
            Unavailable::SizeLimit => write!(f, "instance exceeds the enumeration limit"),
            Unavailable::ZeroBudget => write!(f, "search budget is zero"),
            Unavailable::SolverFailure(m) => write!(f, "solver failure: {m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CandidateKind {
    /// Leading eigenvector of `HᵀH`.
    B2One,
    /// Leading eigenvector scaled to a unit maximum entry.
    B2T,
    /// Best point of the span of eigenvectors with `σ > 1` inside the unit box.
    VGt1,
    /// As `VGt1`, extended with `σ = 1` eigenvectors.
    VGe1,
    /// Boundary-walk heuristic in the `σ > 1` span.
    VGt1Heu,
    /// Global maximizer of the 2-norm growth over the unit box.
    MaxP23,
    /// Unit vector on the heaviest column of `H`.
    B1One,
    /// Maximizer of the 1-norm growth over the unit box.
    MaxP4,
}

impl CandidateKind {
    pub const ALL: [CandidateKind; 8] = [
        CandidateKind::B2One,
        CandidateKind::B2T,
        CandidateKind::VGt1,
        CandidateKind::VGe1,
        CandidateKind::VGt1Heu,
        CandidateKind::MaxP23,
        CandidateKind::B1One,
        CandidateKind::MaxP4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CandidateKind::B2One => "b2_1",
            CandidateKind::B2T => "b2_t",
            CandidateKind::VGt1 => "v_gt1",
            CandidateKind::VGe1 => "v_ge1",
            CandidateKind::VGt1Heu => "v_gt1_heu",
            CandidateKind::MaxP23 => "max_p23",
            CandidateKind::B1One => "b1_1",
            CandidateKind::MaxP4 => "max_p4",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// The index family the candidate is built for.
    pub fn targets_p4(self) -> bool {
        matches!(self, CandidateKind::B1One | CandidateKind::MaxP4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    ClosedForm,
    Exact,
    Heuristic,
    Multistart,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub s: OpinionVector,
    pub provenance: Provenance,
    /// True when the construction is guaranteed optimal for its problem.
    pub certified: bool,
}

pub type CandidateResult = std::result::Result<Candidate, Unavailable>;

fn candidate(kind: CandidateKind, s: Vec<f64>, provenance: Provenance, certified: bool) -> CandidateResult {
    let s = s.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let s = OpinionVector::new(s).map_err(|e| Unavailable::SolverFailure(e.to_string()))?;
    Ok(Candidate { kind, s, provenance, certified })
}

/// `v_1`, with `Δ_P3 = σ_1² - 1`.
pub fn candidate_b2_1(basis: &SpectralBasis) -> CandidateResult {
    if basis.n() == 0 || basis.sigmas[0] <= 1.0 + SIGMA_TOL {
        return Err(Unavailable::NotPolarizing);
    }
    let v = basis.vector(0);
    let predicted = basis.sigmas[0].powi(2) - 1.0;
    let got = basis.delta_p3(&v);
    if (got - predicted).abs() > 1e-8 {
        return Err(Unavailable::SolverFailure(format!(
            "Δ_P3 of the leading eigenvector is {got}, expected {predicted}"
        )));
    }
    candidate(CandidateKind::B2One, v, Provenance::ClosedForm, true)
}

/// `v_1 / max(v_1)`, with `Δ_P3 = t² (σ_1² - 1)`.
pub fn candidate_b2_t(basis: &SpectralBasis) -> CandidateResult {
    let v = candidate_b2_1(basis)?.s.into_vec();
    let top = v.iter().copied().fold(0.0, f64::max);
    let t = 1.0 / top;
    let s: Vec<f64> = v.iter().map(|x| x * t).collect();
    let predicted = t * t * (basis.sigmas[0].powi(2) - 1.0);
    let got = basis.delta_p3(&s);
    if (got - predicted).abs() > 1e-8 * (1.0 + predicted) {
        return Err(Unavailable::SolverFailure(format!("Δ_P3 of scaled vector is {got}")));
    }
    candidate(CandidateKind::B2T, s, Provenance::ClosedForm, true)
}

/// `e_j` for the heaviest column `j` of `H` (smallest index on ties), with `Δ_P4 = ‖H‖₁ - 1`.
pub fn candidate_b1_1(h: &ResponseMatrix) -> CandidateResult {
    let sums = column_sums(h.matrix());
    let mut j = 0;
    for (k, &c) in sums.iter().enumerate() {
        if c > sums[j] {
            j = k;
        }
    }
    if sums.is_empty() || sums[j] <= 1.0 + SIGMA_TOL {
        return Err(Unavailable::NotPolarizing);
    }
    let mut s = vec![0.0; sums.len()];
    s[j] = 1.0;
    candidate(CandidateKind::B1One, s, Provenance::ClosedForm, true)
}

/// Maximizes `Σ α_i (σ_i² - 1) ⟨v_i, 1⟩` over `0 <= Bα <= 1`. In the original coordinates
/// the objective is `c'ᵀs` with `c' = B c`, so the box maximizer sets `s_j = 1` where `c'_j > 0`.
pub fn candidate_lp_p4(basis: &SpectralBasis) -> CandidateResult {
    let n = basis.n();
    let ones = vec![1.0; n];
    let c: Vec<f64> = (0..n)
        .map(|i| (basis.sigmas[i].powi(2) - 1.0) * dotv(basis.b.column(i).as_slice(), &ones))
        .collect();
    let cp = mat_vec(&basis.b, &c);
    let tol = 1e-9 * (1.0 + cp.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let s: Vec<f64> = cp.iter().map(|&x| if x > tol { 1.0 } else { 0.0 }).collect();
    if s.iter().all(|&x| x == 0.0) {
        return Err(Unavailable::NotPolarizing);
    }
    candidate(CandidateKind::MaxP4, s, Provenance::ClosedForm, true)
}

/// `|s|`, which grows P2, P3 and P4 at least as much as `s`.
pub fn concordance_lift(s: &OpinionVector, h: &ResponseMatrix, metric: Metric) -> Result<OpinionVector> {
    check_len(h.n(), s.len())?;
    if !matches!(metric, Metric::P2 | Metric::P3 | Metric::P4) {
        return Err(Error::invalid(format!("lifting does not apply to {}", metric.name())));
    }
    OpinionVector::new(s.values().iter().map(|x| x.abs()).collect())
}

#[cfg(test)]
mod tests;
