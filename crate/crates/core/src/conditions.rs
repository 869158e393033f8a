//! Decides whether a model can raise each class of polarization index.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{OpinionVector, SelfWeight};
use crate::linalg::{column_sums, norm_1, norm_2};
use crate::metrics;
use crate::model::{build_response_matrix, steady_state, ModelConfig, ResponseMatrix, Variant, NAIVE_TOL};
use crate::spectral::{CoefficientVector, SpectralBasis};

/// Relative band around zero for the per-node residuals.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MetricClass {
    /// P2 and P3.
    Absolute,
    /// P4.
    Total,
    /// P1 and GDI.
    Dispersion,
    /// NDI.
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Polarizing,
    Depolarizing,
    SufficientHolds,
    Inconclusive,
}

/// A structural reason the verdict holds for every prejudice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Guarantee {
    /// Undirected ties with identical self weights.
    UndirectedEqualSelfWeights,
    /// Restricted model on undirected ties.
    UndirectedRestricted,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionVerdict {
    pub class: MetricClass,
    pub verdict: Verdict,
    pub witness: Option<usize>,
    pub residuals: Vec<f64>,
    pub guarantee: Option<Guarantee>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DoublyStochasticReport {
    pub doubly_stochastic: bool,
    pub max_column_deviation: f64,
    pub norm_1: f64,
    pub norm_2: f64,
}

/// Column sums of a row-stochastic `H` against 1; `‖H‖₁ = ‖H‖₂ = 1` exactly when they match.
pub fn doubly_stochastic_test(h: &ResponseMatrix, tol: f64) -> Result<DoublyStochasticReport> {
    let m = h.matrix();
    let dev = column_sums(m).iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max);
    Ok(DoublyStochasticReport {
        doubly_stochastic: dev <= tol,
        max_column_deviation: dev,
        norm_1: norm_1(m),
        norm_2: norm_2(m)?,
    })
}

fn absolute_and_total(verdict: Verdict, witness: Option<usize>, residuals: Vec<f64>, guarantee: Option<Guarantee>) -> Vec<ConditionVerdict> {
    [MetricClass::Absolute, MetricClass::Total]
        .into_iter()
        .map(|class| ConditionVerdict { class, verdict, witness, residuals: residuals.clone(), guarantee })
        .collect()
}

/// Scans `r_i = Σ_j λ_j w_ji / (1 - λ_j) - λ_i / (1 - λ_i)`; the model polarizes P2, P3
/// and P4 for some prejudice iff some `r_i` is nonzero. A naive node always polarizes.
pub fn gfj_condition_scan(cfg: &ModelConfig) -> Result<Vec<ConditionVerdict>> {
    let (w, lambdas) = cfg.generalized()?;
    let n = lambdas.len();
    if let Some(i) = lambdas.iter().position(|&l| l >= 1.0 - NAIVE_TOL) {
        return Ok(absolute_and_total(Verdict::Polarizing, Some(i), vec![f64::NAN; n], None));
    }
    let w = w.matrix();
    let ratio: Vec<f64> = lambdas.iter().map(|l| l / (1.0 - l)).collect();
    let mut residuals = vec![0.0; n];
    let mut witness = None;
    for i in 0..n {
        let inflow: f64 = (0..n).map(|j| ratio[j] * w[(j, i)]).sum();
        residuals[i] = inflow - ratio[i];
        let band = CONDITION_TOL * (1.0 + inflow.abs() + ratio[i].abs());
        if witness.is_none() && residuals[i].abs() > band {
            witness = Some(i);
        }
    }
    let verdict = if witness.is_some() { Verdict::Polarizing } else { Verdict::Depolarizing };
    Ok(absolute_and_total(verdict, witness, residuals, None))
}

/// Variational models: `r_i = Σ_{j≠i} ŵ_ij / ŵ_ii - Σ_{j≠i} ŵ_ji / ŵ_jj` (stubborn terms vanish).
/// Restricted models: `r_i = Σ_j ŵ_ij - Σ_j ŵ_ji`.
pub fn vfj_rfj_condition(cfg: &ModelConfig) -> Result<Vec<ConditionVerdict>> {
    let (social, own) = match (cfg.social(), cfg.self_weights()) {
        (Some(s), Some(w)) => (s, w),
        _ => return Err(Error::invalid("expected a variational or restricted model")),
    };
    let n = social.nrows();
    let guarantee = if !cfg.is_symmetric() {
        None
    } else if cfg.variant() == Variant::Rfj {
        Some(Guarantee::UndirectedRestricted)
    } else if own.windows(2).all(|p| p[0] == p[1]) && own[0] != SelfWeight::Finite(0.0) {
        Some(Guarantee::UndirectedEqualSelfWeights)
    } else {
        None
    };
    let inverse: Vec<Option<f64>> = own
        .iter()
        .map(|w| match *w {
            SelfWeight::Stubborn => Some(0.0),
            SelfWeight::Finite(x) if x > 0.0 => Some(1.0 / x),
            SelfWeight::Finite(_) => None,
        })
        .collect();
    if let Some(i) = inverse.iter().position(|x| x.is_none()) {
        // Zero self weight: the node is naive.
        return Ok(absolute_and_total(Verdict::Polarizing, Some(i), vec![f64::NAN; n], None));
    }
    let inv: Vec<f64> = inverse.into_iter().map(|x| x.expect("checked above")).collect();
    let mut residuals = vec![0.0; n];
    let mut witness = None;
    for i in 0..n {
        let out: f64 = social.row(i).sum() * inv[i];
        let inflow: f64 = (0..n).map(|j| social[(j, i)] * inv[j]).sum();
        residuals[i] = out - inflow;
        let band = CONDITION_TOL * (1.0 + out.abs() + inflow.abs());
        if witness.is_none() && residuals[i].abs() > band {
            witness = Some(i);
        }
    }
    let verdict = if witness.is_some() { Verdict::Polarizing } else { Verdict::Depolarizing };
    Ok(absolute_and_total(verdict, witness, residuals, guarantee))
}

/// Verdicts for all four classes. The dispersion class follows from the absolute one when
/// the model cannot polarize P2/P3; otherwise it depends on the prejudice.
pub fn condition_report(cfg: &ModelConfig) -> Result<Vec<ConditionVerdict>> {
    let mut out = match cfg.variant() {
        Variant::Gfj => gfj_condition_scan(cfg)?,
        Variant::Vfj | Variant::Rfj => vfj_rfj_condition(cfg)?,
    };
    let absolute = out[0].verdict;
    out.push(ConditionVerdict {
        class: MetricClass::Dispersion,
        verdict: if absolute == Verdict::Depolarizing { Verdict::Depolarizing } else { Verdict::Inconclusive },
        witness: None,
        residuals: Vec::new(),
        guarantee: out[0].guarantee,
    });
    out.push(ConditionVerdict {
        class: MetricClass::Local,
        verdict: Verdict::Depolarizing,
        witness: None,
        residuals: Vec::new(),
        guarantee: None,
    });
    Ok(out)
}

/// Outcome of the sufficient test for P1/GDI polarization at one prejudice.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DispersionTest {
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    /// `Δ_P1` evaluated directly at `s = Bα`.
    pub delta_p1: f64,
}

/// `Σ α_i² (σ_i² - 1) >= (1/n) [Σ |α_i| (σ_i² - 1) ⟨|v_i|, 1⟩] [Σ |α_i| (σ_i² + 1) ⟨|v_i|, 1⟩]`
pub fn p1_gdi_sufficient_test(basis: &SpectralBasis, alpha: &CoefficientVector) -> Result<DispersionTest> {
    let n = basis.n();
    crate::error::check_len(n, alpha.0.len())?;
    let mut lhs = 0.0;
    let mut a = 0.0;
    let mut b = 0.0;
    for (i, &ai) in alpha.0.iter().enumerate() {
        let s2 = basis.sigmas()[i].powi(2);
        let mass: f64 = basis.b().column(i).iter().map(|x| x.abs()).sum();
        lhs += ai * ai * (s2 - 1.0);
        a += ai.abs() * (s2 - 1.0) * mass;
        b += ai.abs() * (s2 + 1.0) * mass;
    }
    let rhs = a * b / n as f64;
    let s = basis.reconstruct(alpha);
    let z = crate::linalg::mat_vec(basis.response(), &s);
    let delta_p1 = metrics::p1(&z) - metrics::p1(&s);
    let verdict = if lhs > 0.0 && lhs >= rhs { Verdict::SufficientHolds } else { Verdict::Inconclusive };
    Ok(DispersionTest { verdict, lhs, rhs, delta_p1 })
}

/// Steady state when every non-naive node holds prejudice `tau`: consensus on `tau`.
#[derive(Clone, Debug)]
pub struct NaiveGroupLimit {
    pub predicted: OpinionVector,
    pub prejudice: OpinionVector,
    pub computed: OpinionVector,
}

/// `naive_prejudices` lists the prejudices of the naive nodes in index order.
pub fn naive_group_limit(cfg: &ModelConfig, tau: f64, naive_prejudices: &[f64]) -> Result<NaiveGroupLimit> {
    let lambdas = cfg.lambdas()?;
    let naive = crate::model::naive_nodes(&lambdas);
    if naive.len() != naive_prejudices.len() {
        return Err(Error::invalid(format!(
            "{} naive nodes but {} naive prejudices",
            naive.len(),
            naive_prejudices.len()
        )));
    }
    if naive.len() == lambdas.len() {
        return Err(Error::invalid("every node is naive; no group holds the prejudice"));
    }
    let mut s = vec![tau; lambdas.len()];
    for (&i, &p) in naive.iter().zip(naive_prejudices) {
        s[i] = p;
    }
    let prejudice = OpinionVector::new(s)?;
    let h = build_response_matrix(cfg)?;
    let computed = steady_state(&h, &prejudice)?;
    let predicted = OpinionVector::new(vec![tau; lambdas.len()])?;
    let gap = computed.values().iter().map(|z| (z - tau).abs()).fold(0.0, f64::max);
    if gap > 1e-9 {
        return Err(Error::Numerical(format!("steady state deviates from τ by {gap:.3e}")));
    }
    Ok(NaiveGroupLimit { predicted, prejudice, computed })
}
