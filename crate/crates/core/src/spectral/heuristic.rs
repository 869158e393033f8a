//! Boundary walk inside the span of the eigenvectors with `σ > 1`.
//!
//! Starting from the scaled leading eigenvector, each round picks the lowest-index unused
//! eigenvector whose entries share a sign on the coordinates at 0 and share a sign on the
//! coordinates at 1, and moves `s ← s - βv` until another coordinate reaches the boundary.
//! The unused directions are orthogonal to `s`, so each move raises `Δ_P3` by `β²(σ² - 1)`.

use super::qp::step_range;
use super::{candidate, candidate_b2_t, CandidateKind, CandidateResult, Provenance, SpectralBasis};

const ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    NonNeg,
    NonPos,
    Zero,
    Mixed,
}

fn sign_on(v: &[f64], idx: &[usize]) -> Sign {
    let pos = idx.iter().any(|&i| v[i] > ZERO);
    let neg = idx.iter().any(|&i| v[i] < -ZERO);
    match (pos, neg) {
        (false, false) => Sign::Zero,
        (true, false) => Sign::NonNeg,
        (false, true) => Sign::NonPos,
        (true, true) => Sign::Mixed,
    }
}

pub fn heuristic_v_gt1(basis: &SpectralBasis) -> CandidateResult {
    let mut s = candidate_b2_t(basis)?.s.into_vec();
    let mut delta = basis.delta_p3(&s);
    let l = basis.count_above_one();
    let mut used = vec![false; l];
    used[0] = true;

    loop {
        let zeros: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= ZERO).collect();
        let ones: Vec<usize> = (0..s.len()).filter(|&i| s[i] >= 1.0 - ZERO).collect();
        let pick = (1..l).find(|&k| {
            !used[k] && {
                let v = basis.vector(k);
                sign_on(&v, &zeros) != Sign::Mixed && sign_on(&v, &ones) != Sign::Mixed
            }
        });
        let Some(k) = pick else { break };
        used[k] = true;

        // Orient v to be nonnegative on the coordinates at 1, so β > 0 lowers them.
        let mut v = basis.vector(k);
        if sign_on(&v, &ones) == Sign::NonPos {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        // The sign of v on the coordinates at 0 fixes the sign of β; with no constraint
        // there, both directions are tried. Each move runs to the nearest box face.
        let directions: &[f64] = match sign_on(&v, &zeros) {
            Sign::NonNeg => &[-1.0],
            Sign::NonPos => &[1.0],
            _ => &[1.0, -1.0],
        };
        let minus_v: Vec<f64> = v.iter().map(|x| -x).collect();
        let (lo, hi) = step_range(&s, &minus_v);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &dir in directions {
            let beta = if dir > 0.0 { hi } else { lo };
            if beta.abs() <= ZERO {
                continue;
            }
            let next: Vec<f64> = s.iter().zip(&v).map(|(x, y)| (x - beta * y).clamp(0.0, 1.0)).collect();
            let d = basis.delta_p3(&next);
            if best.as_ref().is_none_or(|b| d > b.0) {
                best = Some((d, next));
            }
        }
        if let Some((d, next)) = best {
            if d > delta {
                s = next;
                delta = d;
                // Rescale so the largest entry is 1 again; this multiplies Δ_P3 by top⁻².
                let top = s.iter().copied().fold(0.0, f64::max);
                if top < 1.0 - ZERO && top > 0.0 {
                    s.iter_mut().for_each(|x| *x /= top);
                    delta = basis.delta_p3(&s);
                }
            }
        }
    }
    candidate(CandidateKind::VGt1Heu, s, Provenance::Heuristic, false)
}
