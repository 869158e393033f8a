//! Friedkin-Johnsen variants, their response matrices and the opinion dynamics.
//!
//! Every variant reduces to the generalized form `z(k+1) = (I - Λ) s + Λ W z(k)`, whose
//! unique fixed point is `z = H s` with `H = (I - ΛW)⁻¹ (I - Λ)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::graph::{InfluenceMatrix, OpinionVector, SelfWeight, SocialGraph, SusceptibilityProfile};
use crate::linalg::{lu_solve, mat_vec};

/// `λ_i` at or above this value marks a naive node.
pub const NAIVE_TOL: f64 = 1e-12;

/// The spectral radius of `ΛW` must stay below `1 - RADIUS_MARGIN`.
pub const RADIUS_MARGIN: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Gfj,
    Vfj,
    Rfj,
}

#[derive(Clone, Debug)]
enum Params {
    Generalized { w: InfluenceMatrix, lambdas: SusceptibilityProfile },
    Variational { social: DMatrix<f64>, self_weights: Vec<SelfWeight> },
    Restricted { social: DMatrix<f64> },
}

/// A model instance: the variant together with its parameters.
#[derive(Clone, Debug)]
pub struct ModelConfig {
    params: Params,
    symmetric: bool,
}

impl ModelConfig {
    pub fn gfj(w: InfluenceMatrix, lambdas: SusceptibilityProfile) -> Result<Self> {
        check_len(w.n(), lambdas.lambdas().len())?;
        let m = w.matrix();
        let symmetric = m == &m.transpose();
        Ok(ModelConfig { params: Params::Generalized { w, lambdas }, symmetric })
    }

    /// Variational model from social ties and per-node self weights.
    pub fn vfj(social: DMatrix<f64>, self_weights: Vec<SelfWeight>) -> Result<Self> {
        let social = validate_social(social)?;
        check_len(social.nrows(), self_weights.len())?;
        let symmetric = social == social.transpose();
        Ok(ModelConfig { params: Params::Variational { social, self_weights }, symmetric })
    }

    /// Variational model reading self weights from the graph; nodes without one use `default`.
    pub fn vfj_from_graph(g: &SocialGraph, default: Option<f64>) -> Result<Self> {
        let weights = match (g.self_weights(), default) {
            (Some(w), _) => w.to_vec(),
            (None, Some(d)) => vec![SelfWeight::Finite(d); g.n()],
            (None, None) => {
                return Err(Error::invalid("the variational model needs self weights"))
            }
        };
        Self::vfj(g.adjacency(), weights)
    }

    /// Restricted model: every self weight is 1.
    pub fn rfj(social: DMatrix<f64>) -> Result<Self> {
        let social = validate_social(social)?;
        let symmetric = social == social.transpose();
        Ok(ModelConfig { params: Params::Restricted { social }, symmetric })
    }

    pub fn variant(&self) -> Variant {
        match self.params {
            Params::Generalized { .. } => Variant::Gfj,
            Params::Variational { .. } => Variant::Vfj,
            Params::Restricted { .. } => Variant::Rfj,
        }
    }

    pub fn n(&self) -> usize {
        match &self.params {
            Params::Generalized { w, .. } => w.n(),
            Params::Variational { social, .. } | Params::Restricted { social } => social.nrows(),
        }
    }

    /// Whether the influence (gFJ) or social (vFJ, rFJ) weights are symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Off-diagonal social weights for vFJ and rFJ.
    pub fn social(&self) -> Option<&DMatrix<f64>> {
        match &self.params {
            Params::Generalized { .. } => None,
            Params::Variational { social, .. } | Params::Restricted { social } => Some(social),
        }
    }

    /// Self weights for vFJ (all 1 for rFJ).
    pub fn self_weights(&self) -> Option<Vec<SelfWeight>> {
        match &self.params {
            Params::Generalized { .. } => None,
            Params::Variational { self_weights, .. } => Some(self_weights.clone()),
            Params::Restricted { social } => Some(vec![SelfWeight::Finite(1.0); social.nrows()]),
        }
    }

    /// Influence matrix and susceptibilities of the equivalent generalized model.
    pub fn generalized(&self) -> Result<(InfluenceMatrix, Vec<f64>)> {
        match &self.params {
            Params::Generalized { w, lambdas } => Ok((w.clone(), lambdas.lambdas().to_vec())),
            _ => {
                let m = map_vfj_to_gfj(self)?;
                m.generalized()
            }
        }
    }

    pub fn lambdas(&self) -> Result<Vec<f64>> {
        Ok(self.generalized()?.1)
    }

    pub fn naive_set(&self) -> Result<Vec<usize>> {
        Ok(naive_nodes(&self.lambdas()?))
    }
}

fn validate_social(social: DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !social.is_square() {
        return Err(Error::invalid("social weight matrix is not square"));
    }
    if social.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
        return Err(Error::invalid("social weights must be finite and nonnegative"));
    }
    let mut social = social;
    social.fill_diagonal(0.0);
    Ok(social)
}

pub(crate) fn naive_nodes(lambdas: &[f64]) -> Vec<usize> {
    (0..lambdas.len()).filter(|&i| lambdas[i] >= 1.0 - NAIVE_TOL).collect()
}

/// Rewrites a variational or restricted model as a generalized one:
/// `λ_i = d_i / (ŵ_ii + d_i)` and `w_ij = ŵ_ij / d_i` with `d_i = Σ_k ŵ_ik`.
/// Stubborn nodes, and nodes with no neighbors, get `λ_i = 0` and an identity row.
pub fn map_vfj_to_gfj(cfg: &ModelConfig) -> Result<ModelConfig> {
    let (social, self_weights) = match (cfg.social(), cfg.self_weights()) {
        (Some(s), Some(w)) => (s, w),
        _ => return Ok(cfg.clone()),
    };
    let n = social.nrows();
    let mut w = DMatrix::zeros(n, n);
    let mut lambdas = vec![0.0; n];
    for i in 0..n {
        let d: f64 = social.row(i).sum();
        let own = match self_weights[i] {
            SelfWeight::Stubborn => None,
            SelfWeight::Finite(x) => Some(x),
        };
        match own {
            Some(x) if d + x <= 0.0 => {
                return Err(Error::invalid(format!(
                    "node {i} has neither neighbors nor a self weight"
                )))
            }
            Some(x) if d > 0.0 => {
                lambdas[i] = d / (x + d);
                for j in 0..n {
                    w[(i, j)] = social[(i, j)] / d;
                }
            }
            _ => w[(i, i)] = 1.0,
        }
    }
    let w = InfluenceMatrix::new(w)?;
    let lambdas = SusceptibilityProfile::explicit(lambdas.into_iter().map(|l| l.min(1.0)).collect())?;
    ModelConfig::gfj(w, lambdas)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Convergence {
    Converges,
    Unknown,
}

/// Bounds on the spectral radius of `ΛW`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConvergenceReport {
    pub verdict: Convergence,
    pub radius_upper: f64,
    pub radius_lower: f64,
}

/// Certifies `ρ(ΛW) < 1`. The row-sum bound `max λ_i` settles most cases; otherwise
/// power iteration on `(I + ΛW) / 2` supplies Collatz-Wielandt bounds
/// `min (Mx)_i / x_i <= ρ(M) <= max (Mx)_i / x_i`.
pub fn convergence_check(cfg: &ModelConfig) -> Result<ConvergenceReport> {
    let (w, lambdas) = cfg.generalized()?;
    Ok(radius_bounds(w.matrix(), &lambdas))
}

fn radius_bounds(w: &DMatrix<f64>, lambdas: &[f64]) -> ConvergenceReport {
    let n = lambdas.len();
    let threshold = 1.0 - RADIUS_MARGIN;
    let mut m = w.clone();
    for (i, &l) in lambdas.iter().enumerate() {
        m.row_mut(i).scale_mut(l);
    }
    let row_sums: Vec<f64> = m.row_iter().map(|r| r.sum()).collect();
    let mut upper = row_sums.iter().copied().fold(0.0, f64::max);
    let mut lower = row_sums.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    let verdict = |u: f64| if u < threshold { Convergence::Converges } else { Convergence::Unknown };
    if upper < threshold {
        return ConvergenceReport { verdict: Convergence::Converges, radius_upper: upper, radius_lower: lower };
    }

    let max_iter = (200_000_000 / (n * n).max(1)).clamp(50, 10_000);
    let mt = m.transpose();
    let mut x = vec![1.0; n];
    for _ in 0..max_iter {
        let mx = mat_vec_t(&mt, &x);
        let mut hi = 0.0f64;
        let mut lo = f64::INFINITY;
        for i in 0..n {
            let r = mx[i] / x[i];
            hi = hi.max(r);
            lo = lo.min(r);
        }
        upper = upper.min(hi);
        lower = lower.max(lo);
        if upper < threshold || lower >= threshold || hi - lo < 1e-15 {
            break;
        }
        let mut top = 0.0f64;
        for i in 0..n {
            x[i] = 0.5 * (x[i] + mx[i]);
            top = top.max(x[i]);
        }
        for xi in &mut x {
            *xi = (*xi / top).max(1e-290);
        }
    }
    ConvergenceReport { verdict: verdict(upper), radius_upper: upper, radius_lower: lower }
}

// `mt` holds Mᵀ, so each output entry reads a contiguous column.
fn mat_vec_t(mt: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    mt.column_iter().map(|c| c.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// `H` with `z = H s`, tagged with its variant and naive nodes.
#[derive(Clone, Debug)]
pub struct ResponseMatrix {
    h: DMatrix<f64>,
    variant: Variant,
    naive: Vec<usize>,
}

impl ResponseMatrix {
    /// Wraps a precomputed matrix after checking it is nonnegative and row-stochastic.
    pub fn from_matrix(h: DMatrix<f64>, variant: Variant) -> Result<Self> {
        check_stochastic(&h)?;
        let naive = (0..h.ncols()).filter(|&j| h.column(j).iter().all(|&x| x == 0.0)).collect();
        Ok(ResponseMatrix { h, variant, naive })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn naive_set(&self) -> &[usize] {
        &self.naive
    }

    pub fn n(&self) -> usize {
        self.h.nrows()
    }

    pub fn apply(&self, s: &[f64]) -> Vec<f64> {
        mat_vec(&self.h, s)
    }
}

fn check_stochastic(h: &DMatrix<f64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::invalid("response matrix is not square"));
    }
    if let Some(x) = h.iter().find(|&&x| !(x >= -1e-9)) {
        return Err(Error::Numerical(format!("response matrix has entry {x}")));
    }
    for (i, r) in h.row_iter().enumerate() {
        let s = r.sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("response row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// Builds `H` for any variant. Refuses when convergence cannot be certified.
/// vFJ without stubborn nodes uses `(D + Ã - A)⁻¹ Ã`, rFJ uses `(L + I)⁻¹`,
/// everything else goes through the generalized form.
pub fn build_response_matrix(cfg: &ModelConfig) -> Result<ResponseMatrix> {
    let (w, lambdas) = cfg.generalized()?;
    let report = radius_bounds(w.matrix(), &lambdas);
    if report.verdict != Convergence::Converges {
        return Err(Error::Numerical(format!(
            "cannot certify convergence: spectral radius of ΛW may reach 1 (bound {:.6})",
            report.radius_upper
        )));
    }
    let direct = match &cfg.params {
        Params::Variational { self_weights, .. } => {
            !self_weights.contains(&SelfWeight::Stubborn)
        }
        Params::Restricted { .. } => true,
        Params::Generalized { .. } => false,
    };
    let h = if direct {
        social_response(cfg)?
    } else {
        generalized_response(w.matrix(), &lambdas)?
    };
    let naive = naive_nodes(&lambdas);
    let mut h = h;
    for &j in &naive {
        h.column_mut(j).fill(0.0);
    }
    check_stochastic(&h)?;
    Ok(ResponseMatrix { h, variant: cfg.variant(), naive })
}

/// `H` through the generalized form, whatever the variant.
pub fn response_via_mapping(cfg: &ModelConfig) -> Result<ResponseMatrix> {
    let (w, lambdas) = cfg.generalized()?;
    let h = generalized_response(w.matrix(), &lambdas)?;
    check_stochastic(&h)?;
    Ok(ResponseMatrix { h, variant: cfg.variant(), naive: naive_nodes(&lambdas) })
}

fn generalized_response(w: &DMatrix<f64>, lambdas: &[f64]) -> Result<DMatrix<f64>> {
    let n = lambdas.len();
    let mut a = -w.clone();
    for i in 0..n {
        a.row_mut(i).scale_mut(lambdas[i]);
        a[(i, i)] += 1.0;
    }
    let rhs = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        lambdas.iter().map(|l| 1.0 - l),
    ));
    lu_solve(&a, &rhs)
}

fn social_response(cfg: &ModelConfig) -> Result<DMatrix<f64>> {
    let social = cfg.social().expect("variational or restricted");
    let own: Vec<f64> = cfg
        .self_weights()
        .expect("variational or restricted")
        .iter()
        .map(|w| match w {
            SelfWeight::Finite(x) => *x,
            SelfWeight::Stubborn => unreachable!("stubborn nodes take the mapped path"),
        })
        .collect();
    let n = social.nrows();
    let mut a = -social.clone();
    for i in 0..n {
        a[(i, i)] = social.row(i).sum() + own[i];
    }
    let rhs = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(own));
    lu_solve(&a, &rhs)
}

/// `z = H s`.
pub fn steady_state(h: &ResponseMatrix, s: &OpinionVector) -> Result<OpinionVector> {
    check_len(h.n(), s.len())?;
    OpinionVector::new(h.apply(s.values()))
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Result of running the update rule.
#[derive(Clone, Debug)]
pub struct Dynamics {
    pub opinions: OpinionVector,
    pub iterations: usize,
    /// Infinity-norm change of the final step.
    pub residual: f64,
    pub converged: bool,
}

/// Runs `z(k+1) = (I - Λ) s + Λ W z(k)` from `z(0) = s`, calling `observe` on every iterate,
/// until successive iterates differ by less than `tol` or `max_iter` steps have run.
pub fn simulate(
    cfg: &ModelConfig,
    s: &OpinionVector,
    tol: f64,
    max_iter: usize,
    mut observe: impl FnMut(usize, &[f64]),
) -> Result<Dynamics> {
    check_len(cfg.n(), s.len())?;
    let (w, lambdas) = cfg.generalized()?;
    let wt = w.matrix().transpose();
    let s = s.values();
    let mut z = s.to_vec();
    observe(0, &z);
    let mut residual = f64::INFINITY;
    for k in 1..=max_iter {
        let wz = mat_vec_t(&wt, &z);
        residual = 0.0f64;
        for i in 0..z.len() {
            let next = (1.0 - lambdas[i]) * s[i] + lambdas[i] * wz[i];
            residual = residual.max((next - z[i]).abs());
            z[i] = next;
        }
        observe(k, &z);
        if residual < tol {
            return Ok(Dynamics { opinions: OpinionVector::new(z)?, iterations: k, residual, converged: true });
        }
    }
    Ok(Dynamics { opinions: OpinionVector::new(z)?, iterations: max_iter, residual, converged: false })
}

/// Iterates the dynamics to a fixed point, returning it and the number of steps taken.
pub fn iterate_dynamics(
    cfg: &ModelConfig,
    s: &OpinionVector,
    tol: f64,
    max_iter: usize,
) -> Result<(OpinionVector, usize)> {
    let d = simulate(cfg, s, tol, max_iter, |_, _| {})?;
    if d.converged {
        Ok((d.opinions, d.iterations))
    } else {
        Err(Error::Convergence { what: "opinion dynamics", residual: d.residual })
    }
}
