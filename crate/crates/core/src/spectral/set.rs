use super::qp::subspace_qp_seeded;
use super::{
    candidate_b1_1, candidate_b2_1, candidate_b2_t, candidate_lp_p4, global_p23_search_seeded,
    heuristic_v_gt1, CandidateKind, CandidateResult, SpectralBasis, SubspaceMode,
};
use crate::model::ResponseMatrix;

#[derive(Clone, Debug)]
pub struct CandidateSetOptions {
    pub kinds: Vec<CandidateKind>,
    /// Random restarts for the global search on instances above `n_exact_limit`.
    pub budget: usize,
    pub n_exact_limit: usize,
}

impl Default for CandidateSetOptions {
    fn default() -> Self {
        CandidateSetOptions { kinds: CandidateKind::ALL.to_vec(), budget: 16, n_exact_limit: 12 }
    }
}

/// The requested candidates in canonical order.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    entries: Vec<(CandidateKind, CandidateResult)>,
}

impl CandidateSet {
    pub fn get(&self, kind: CandidateKind) -> Option<&CandidateResult> {
        self.entries.iter().find(|(k, _)| *k == kind).map(|(_, r)| r)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(CandidateKind, CandidateResult)> {
        self.entries.iter()
    }
}

/// Builds the requested candidates. Searches are seeded with the cheaper candidates
/// so each stronger construction is at least as good as the ones it subsumes.
pub fn candidate_set(basis: &SpectralBasis, h: &ResponseMatrix, opts: &CandidateSetOptions) -> CandidateSet {
    let wants = |k| opts.kinds.contains(&k);
    let mut entries: Vec<(CandidateKind, CandidateResult)> = Vec::new();
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    let mut push = |kind, r: CandidateResult, seeds: &mut Vec<Vec<f64>>| {
        if let Ok(c) = &r {
            seeds.push(c.s.values().to_vec());
        }
        entries.push((kind, r));
    };
    if wants(CandidateKind::B2One) {
        push(CandidateKind::B2One, candidate_b2_1(basis), &mut seeds);
    }
    if wants(CandidateKind::B2T) {
        push(CandidateKind::B2T, candidate_b2_t(basis), &mut seeds);
    }
    if wants(CandidateKind::VGt1Heu) {
        push(CandidateKind::VGt1Heu, heuristic_v_gt1(basis), &mut seeds);
    }
    if wants(CandidateKind::VGt1) {
        let r = subspace_qp_seeded(basis, SubspaceMode::StrictlyGreater, &seeds);
        push(CandidateKind::VGt1, r, &mut seeds);
    }
    if wants(CandidateKind::VGe1) {
        let r = subspace_qp_seeded(basis, SubspaceMode::GreaterOrEqual, &seeds);
        push(CandidateKind::VGe1, r, &mut seeds);
    }
    if wants(CandidateKind::MaxP23) {
        let r = global_p23_search_seeded(basis, opts.budget, opts.n_exact_limit, &seeds);
        push(CandidateKind::MaxP23, r, &mut seeds);
    }
    if wants(CandidateKind::B1One) {
        push(CandidateKind::B1One, candidate_b1_1(h), &mut seeds);
    }
    if wants(CandidateKind::MaxP4) {
        push(CandidateKind::MaxP4, candidate_lp_p4(basis), &mut seeds);
    }
    entries.sort_by_key(|(k, _)| CandidateKind::ALL.iter().position(|x| x == k));
    CandidateSet { entries }
}
