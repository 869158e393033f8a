//! Exhaustive grid search, used as an oracle on small instances.

use super::{Unavailable, SIGMA_TOL};
use crate::graph::OpinionVector;
use crate::linalg::mat_vec;
use crate::metrics::{self, Metric};
use crate::model::ResponseMatrix;

const MAX_POINTS: f64 = 6e7;
const MAX_VERTEX_DIM: usize = 20;

/// Best `Δ_metric` over `{0, 1/g, ..., 1}^n` (vertices only when `grid == 0`).
/// Points are scanned in lexicographic order and only strict improvements replace the
/// incumbent, so ties resolve to the lexicographically smallest vector.
pub fn brute_force_max(
    h: &ResponseMatrix,
    metric: Metric,
    grid: usize,
) -> Result<(OpinionVector, f64), Unavailable> {
    let n = h.n();
    if metric == Metric::Ndi {
        return Err(Unavailable::SolverFailure("NDI needs the influence matrix".into()));
    }
    let steps = grid.max(1);
    if grid == 0 && n > MAX_VERTEX_DIM || ((steps + 1) as f64).powi(n as i32) > MAX_POINTS {
        return Err(Unavailable::SizeLimit);
    }
    let hm = h.matrix();
    let value = |x: &[f64]| metrics::evaluate(metric, x, None).expect("metric needs no weights");
    let mut level = vec![0usize; n];
    let mut s = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut best = (value(&z) - value(&s), s.clone());
    loop {
        // Odometer increment on the last coordinate, updating z = Hs column by column.
        let mut j = n;
        loop {
            if j == 0 {
                let s = OpinionVector::new(best.1).expect("grid points lie in the box");
                return Ok((s, best.0));
            }
            j -= 1;
            let old = s[j];
            if level[j] < steps {
                level[j] += 1;
                s[j] = level[j] as f64 / steps as f64;
            } else {
                level[j] = 0;
                s[j] = 0.0;
            }
            let d = s[j] - old;
            for (zi, hij) in z.iter_mut().zip(hm.column(j).iter()) {
                *zi += d * hij;
            }
            if level[j] != 0 {
                break;
            }
        }
        if j + 1 < n {
            z = mat_vec(hm, &s);
        }
        let delta = value(&z) - value(&s);
        if delta > best.0 + SIGMA_TOL * 1e-3 {
            best = (delta, s.clone());
        }
    }
}
