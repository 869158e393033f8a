//! Quadratic maximization of `sᵀ(HᵀH - I)s` over the unit box, globally or restricted to
//! the span of the eigenvectors with `σ > 1`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use super::{
    candidate, candidate_b2_t, heuristic_v_gt1, CandidateKind, CandidateResult, Provenance,
    SpectralBasis, Unavailable, SIGMA_TOL,
};
use crate::linalg::{column_sums, dotv, mat_vec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SubspaceMode {
    StrictlyGreater,
    GreaterOrEqual,
}

/// Vertex enumeration runs when `C(rows, l) * 2^l` stays below this.
const VERTEX_BUDGET: f64 = 4e6;
const MAX_EXACT_DIM: usize = 10;
const RESTARTS: usize = 24;
const SEED: u64 = 0x5eed_f00d;

/// Best point of `{Bα : 0 <= Bα <= 1}` restricted to the `σ > 1` (or `σ >= 1`) span,
/// maximizing `Σ α_i² (σ_i² - 1)`.
pub fn candidate_subspace_qp(basis: &SpectralBasis, mode: SubspaceMode) -> CandidateResult {
    subspace_qp_seeded(basis, mode, &[])
}

pub(crate) fn subspace_qp_seeded(
    basis: &SpectralBasis,
    mode: SubspaceMode,
    seeds: &[Vec<f64>],
) -> CandidateResult {
    let l = basis.count_above_one();
    if l == 0 {
        return Err(Unavailable::NotPolarizing);
    }
    match mode {
        SubspaceMode::StrictlyGreater => {
            if l < 2 {
                return Err(Unavailable::TooFewSingularValues);
            }
            strictly_greater(basis, seeds)
        }
        SubspaceMode::GreaterOrEqual => {
            let m = basis.count_equal_one();
            if l + m < 2 {
                return Err(Unavailable::TooFewSingularValues);
            }
            let base = if l >= 2 {
                strictly_greater(basis, seeds)?
            } else {
                candidate_b2_t(basis)?
            };
            let (s, moved) = augment(basis, base.s.into_vec(), l, m);
            let certified = base.certified && !moved;
            candidate(CandidateKind::VGe1, s, base.provenance, certified)
        }
    }
}

fn strictly_greater(basis: &SpectralBasis, seeds: &[Vec<f64>]) -> CandidateResult {
    let l = basis.count_above_one();
    let sub = Subspace::new(basis, l);
    let mut starts: Vec<Vec<f64>> = vec![candidate_b2_t(basis)?.s.into_vec()];
    if let Ok(h) = heuristic_v_gt1(basis) {
        starts.push(h.s.into_vec());
    }
    starts.extend(seeds.iter().cloned());

    let mut best = (f64::NEG_INFINITY, vec![0.0; l]);
    let mut consider = |alpha: Vec<f64>, sub: &Subspace| {
        let f = sub.objective(&alpha);
        if f > best.0 {
            best = (f, alpha);
        }
    };
    for s in &starts {
        let alpha = sub.project(&sub.coordinates(s));
        consider(alpha.clone(), &sub);
        consider(sub.to_vertex(alpha), &sub);
    }

    let exact = sub.vertex_count() <= VERTEX_BUDGET && l <= MAX_EXACT_DIM;
    if exact {
        if let Some(alpha) = sub.best_vertex() {
            consider(alpha, &sub);
        }
    } else {
        let mut rng = SplitMix64::seed_from_u64(SEED);
        for _ in 0..RESTARTS {
            let y: Vec<f64> = (0..basis.n()).map(|_| rng.random::<f64>()).collect();
            let alpha = sub.ascend(sub.project(&sub.coordinates(&y)));
            consider(sub.to_vertex(alpha), &sub);
        }
        for s in &starts {
            let alpha = sub.ascend(sub.project(&sub.coordinates(s)));
            consider(sub.to_vertex(alpha), &sub);
        }
    }
    let s = sub.point(&best.1);
    let provenance = if exact { Provenance::Exact } else { Provenance::Multistart };
    candidate(CandidateKind::VGt1, s, provenance, exact)
}

/// Moves along each `σ = 1` eigenvector as far as the box allows in the direction that
/// raises the 1-norm growth; the 2-norm growth is flat along these directions.
fn augment(basis: &SpectralBasis, mut s: Vec<f64>, l: usize, m: usize) -> (Vec<f64>, bool) {
    let g: Vec<f64> = column_sums(basis.response()).iter().map(|c| c - 1.0).collect();
    let mut moved = false;
    for k in l..l + m {
        let u = basis.vector(k);
        let (lo, hi) = step_range(&s, &u);
        let slope = dotv(&g, &u);
        let c = if slope > 1e-12 { hi } else if slope < -1e-12 { lo } else { 0.0 };
        if c == 0.0 {
            continue;
        }
        let next: Vec<f64> = s.iter().zip(&u).map(|(a, b)| (a + c * b).clamp(0.0, 1.0)).collect();
        let (before, after) = (basis.delta_p3(&s), basis.delta_p3(&next));
        if after >= before - 1e-10 * (1.0 + before.abs()) {
            s = next;
            moved = true;
        }
    }
    (s, moved)
}

/// Range of `c` keeping `s + c u` inside the unit box.
pub(super) fn step_range(s: &[f64], u: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (&x, &d) in s.iter().zip(u) {
        if d > 1e-15 {
            hi = hi.min((1.0 - x) / d);
            lo = lo.max(-x / d);
        } else if d < -1e-15 {
            hi = hi.min(-x / d);
            lo = lo.max((1.0 - x) / d);
        }
    }
    (lo.min(0.0), hi.max(0.0))
}

/// The polytope `{α ∈ R^l : 0 <= B̂α <= 1}` with objective `Σ d_i α_i²`.
struct Subspace {
    bhat: DMatrix<f64>,
    d: Vec<f64>,
    rows: Vec<usize>,
}

impl Subspace {
    fn new(basis: &SpectralBasis, l: usize) -> Self {
        let bhat = basis.b().columns(0, l).into_owned();
        let d = basis.sigmas()[..l].iter().map(|s| s * s - 1.0).collect();
        let rows = (0..bhat.nrows()).filter(|&i| bhat.row(i).amax() > 1e-14).collect();
        Subspace { bhat, d, rows }
    }

    fn dim(&self) -> usize {
        self.d.len()
    }

    fn objective(&self, alpha: &[f64]) -> f64 {
        alpha.iter().zip(&self.d).map(|(a, d)| d * a * a).sum()
    }

    fn point(&self, alpha: &[f64]) -> Vec<f64> {
        mat_vec(&self.bhat, alpha)
    }

    fn coordinates(&self, s: &[f64]) -> Vec<f64> {
        self.bhat.tr_mul(&DVector::from_column_slice(s)).as_slice().to_vec()
    }

    fn feasible(&self, alpha: &[f64], tol: f64) -> bool {
        let s = self.point(alpha);
        s.iter().all(|&x| x >= -tol && x <= 1.0 + tol)
    }

    fn vertex_count(&self) -> f64 {
        let (r, l) = (self.rows.len() as f64, self.dim());
        let mut c = 1.0;
        for k in 0..l {
            c *= (r - k as f64) / (k as f64 + 1.0);
        }
        c * 2f64.powi(l as i32)
    }

    /// Exhaustive search over vertices: `l` independent rows of `B̂` held at 0 or 1.
    fn best_vertex(&self) -> Option<Vec<f64>> {
        let l = self.dim();
        let r = self.rows.len();
        if r < l {
            return None;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut pick: Vec<usize> = (0..l).collect();
        loop {
            let a = DMatrix::from_fn(l, l, |i, j| self.bhat[(self.rows[pick[i]], j)]);
            let lu = a.lu();
            if lu.u().diagonal().amin() > 1e-10 {
                for bits in 0u32..(1 << l) {
                    let rhs = DVector::from_fn(l, |i, _| ((bits >> i) & 1) as f64);
                    if let Some(alpha) = lu.solve(&rhs) {
                        let alpha = alpha.as_slice().to_vec();
                        if self.feasible(&alpha, 1e-9) {
                            let f = self.objective(&alpha);
                            if best.as_ref().is_none_or(|b| f > b.0) {
                                best = Some((f, alpha));
                            }
                        }
                    }
                }
            }
            // Next combination in lexicographic order.
            let mut i = l;
            while i > 0 && pick[i - 1] == r - l + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            pick[i - 1] += 1;
            for j in i..l {
                pick[j] = pick[j - 1] + 1;
            }
        }
        best.map(|b| b.1)
    }

    /// Euclidean projection onto the polytope by Dykstra's alternating projections
    /// between the span of `B̂` and the unit box.
    fn project(&self, alpha: &[f64]) -> Vec<f64> {
        let n = self.bhat.nrows();
        let mut x = self.point(alpha);
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for _ in 0..5000 {
            let y: Vec<f64> = x.iter().zip(&p).map(|(a, b)| (a + b).clamp(0.0, 1.0)).collect();
            for i in 0..n {
                p[i] += x[i] - y[i];
            }
            let yq: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
            let next = self.point(&self.coordinates(&yq));
            for i in 0..n {
                q[i] = yq[i] - next[i];
            }
            let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            x = next;
            if change < 1e-13 {
                break;
            }
        }
        let mut alpha = self.coordinates(&x);
        // Shrink toward the origin (always feasible) to remove residual violations.
        let mut scale = 1.0;
        while !self.feasible(&alpha, 1e-12) && scale > 1e-6 {
            scale *= 0.999;
            alpha.iter_mut().for_each(|a| *a *= 0.999);
        }
        alpha
    }

    /// Projected gradient ascent; every step is monotone since the objective is convex.
    fn ascend(&self, mut alpha: Vec<f64>) -> Vec<f64> {
        let dmax = self.d.iter().copied().fold(0.0, f64::max);
        let eta = 1.0 / dmax;
        let mut f = self.objective(&alpha);
        for _ in 0..300 {
            let y: Vec<f64> = alpha.iter().zip(&self.d).map(|(a, d)| a + eta * 2.0 * d * a).collect();
            let next = self.project(&y);
            let g = self.objective(&next);
            if g <= f + 1e-14 {
                break;
            }
            alpha = next;
            f = g;
        }
        alpha
    }

    /// Walks from a feasible point to a vertex without lowering the objective: along any
    /// line the objective is convex, so the better endpoint is at least as good.
    fn to_vertex(&self, mut alpha: Vec<f64>) -> Vec<f64> {
        let l = self.dim();
        for _ in 0..=l {
            let s = self.point(&alpha);
            let mut span: Vec<DVector<f64>> = Vec::new();
            for &i in &self.rows {
                if s[i].abs() < 1e-9 || (s[i] - 1.0).abs() < 1e-9 {
                    let mut w = self.bhat.row(i).transpose();
                    for q in &span {
                        w -= q * q.dot(&w);
                    }
                    let len = w.norm();
                    if len > 1e-8 {
                        span.push(w / len);
                    }
                }
            }
            if span.len() >= l {
                return alpha;
            }
            let null_part = |mut w: DVector<f64>| {
                for q in &span {
                    w -= q * q.dot(&w);
                }
                w
            };
            let grad = DVector::from_fn(l, |i, _| 2.0 * self.d[i] * alpha[i]);
            let mut dir = null_part(grad);
            if dir.norm() < 1e-12 {
                dir = (0..l)
                    .map(|k| null_part(DVector::from_fn(l, |i, _| if i == k { 1.0 } else { 0.0 })))
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .expect("dimension is positive");
            }
            let dir = dir.normalize();
            let ds = self.point(dir.as_slice());
            let (lo, hi) = step_range(&s, &ds);
            let step = |t: f64| -> Vec<f64> { alpha.iter().zip(dir.iter()).map(|(a, d)| a + t * d).collect() };
            let (a, b) = (step(lo), step(hi));
            alpha = if self.objective(&b) >= self.objective(&a) { b } else { a };
        }
        alpha
    }
}

/// Global maximizer of `Δ_P3` over the unit box, seeded with the leading scaled
/// eigenvector and the heuristic.
pub fn global_p23_search(basis: &SpectralBasis, budget: usize, n_exact_limit: usize) -> CandidateResult {
    let mut seeds = Vec::new();
    if let Ok(h) = heuristic_v_gt1(basis) {
        seeds.push(h.s.into_vec());
    }
    global_p23_search_seeded(basis, budget, n_exact_limit, &seeds)
}

/// Exact for `n <= n_exact_limit`: every maximizer lies in the relative interior of a face
/// of the box, where it solves the stationarity system of the free coordinates with a
/// negative-definite block. Larger instances use `budget` projected-gradient restarts
/// plus the given seeds, polished by exact coordinate ascent.
pub fn global_p23_search_seeded(
    basis: &SpectralBasis,
    budget: usize,
    n_exact_limit: usize,
    seeds: &[Vec<f64>],
) -> CandidateResult {
    if budget == 0 {
        return Err(Unavailable::ZeroBudget);
    }
    if basis.sigmas().first().is_none_or(|&s| s <= 1.0 + SIGMA_TOL) {
        return Err(Unavailable::NotPolarizing);
    }
    let h = basis.response();
    let n = h.ncols();
    let mut q = h.tr_mul(h);
    for i in 0..n {
        q[(i, i)] -= 1.0;
    }
    let quad = |s: &[f64]| dotv(s, &mat_vec(&q, s));

    if n <= n_exact_limit {
        let s = face_enumeration(&q);
        let best = seeds
            .iter()
            .map(|x| x.iter().map(|v| v.clamp(0.0, 1.0)).collect::<Vec<_>>())
            .fold(s, |b, x| if quad(&x) > quad(&b) + 1e-12 { x } else { b });
        return candidate(CandidateKind::MaxP23, best, Provenance::Exact, true);
    }

    let mut starts: Vec<Vec<f64>> = vec![candidate_b2_t(basis)?.s.into_vec()];
    starts.extend(seeds.iter().cloned());
    let mut rng = SplitMix64::seed_from_u64(SEED);
    for _ in 0..budget {
        starts.push((0..n).map(|_| rng.random::<f64>()).collect());
    }
    let lipschitz = 2.0 * basis.sigmas().iter().map(|s| (s * s - 1.0).abs()).fold(0.0, f64::max);
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    for s0 in starts {
        let mut s: Vec<f64> = s0.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let mut f = quad(&s);
        for _ in 0..2000 {
            let g = mat_vec(&q, &s);
            let next: Vec<f64> = s.iter().zip(&g).map(|(x, gi)| (x + 2.0 * gi / lipschitz).clamp(0.0, 1.0)).collect();
            let fnext = quad(&next);
            if fnext <= f + 1e-14 {
                break;
            }
            s = next;
            f = fnext;
        }
        let s = coordinate_ascent(&q, s);
        let f = quad(&s);
        if f > best.0 {
            best = (f, s);
        }
    }
    candidate(CandidateKind::MaxP23, best.1, Provenance::Multistart, false)
}

/// Exact one-coordinate maximization sweeps of `sᵀQs` over the box.
fn coordinate_ascent(q: &DMatrix<f64>, mut s: Vec<f64>) -> Vec<f64> {
    let n = s.len();
    let mut g = mat_vec(q, &s);
    for _ in 0..200 {
        let mut improved = false;
        for i in 0..n {
            let qii = q[(i, i)];
            let gain = |d: f64| 2.0 * d * g[i] + d * d * qii;
            let mut options = vec![-s[i], 1.0 - s[i]];
            if qii < 0.0 {
                options.push((-g[i] / qii).clamp(-s[i], 1.0 - s[i]));
            }
            let d = options.into_iter().fold(0.0, |b, d| if gain(d) > gain(b) { d } else { b });
            if gain(d) > 1e-15 {
                s[i] += d;
                for (gk, qk) in g.iter_mut().zip(q.column(i).iter()) {
                    *gk += d * qk;
                }
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    s
}

/// Enumerates assignments of every coordinate to 0, 1 or free. A free set needs `-Q_FF`
/// positive definite, checked by growing its Cholesky factor one row at a time, which
/// prunes whole subtrees.
fn face_enumeration(q: &DMatrix<f64>) -> Vec<f64> {
    struct Search<'a> {
        q: &'a DMatrix<f64>,
        state: Vec<u8>,
        free: Vec<usize>,
        chol: Vec<Vec<f64>>,
        best: (f64, Vec<f64>),
    }

    const LOW: u8 = 0;
    const HIGH: u8 = 1;
    const FREE: u8 = 2;

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            let n = self.q.nrows();
            if i == n {
                self.leaf();
                return;
            }
            for choice in [LOW, HIGH] {
                self.state[i] = choice;
                self.run(i + 1);
            }
            // Try i as free: extend the Cholesky factor of -Q_FF.
            let k = self.free.len();
            let mut row = vec![0.0; k + 1];
            for a in 0..k {
                let mut v = -self.q[(self.free[a], i)];
                for b in 0..a {
                    v -= row[b] * self.chol[a][b];
                }
                row[a] = v / self.chol[a][a];
            }
            let pivot = -self.q[(i, i)] - row[..k].iter().map(|x| x * x).sum::<f64>();
            if pivot > 1e-12 * (1.0 + self.q[(i, i)].abs()) {
                row[k] = pivot.sqrt();
                self.state[i] = FREE;
                self.free.push(i);
                self.chol.push(row);
                self.run(i + 1);
                self.free.pop();
                self.chol.pop();
            }
        }

        fn leaf(&mut self) {
            let n = self.q.nrows();
            let k = self.free.len();
            // Solve (-Q_FF) x = Q_{F,H} 1.
            let rhs: Vec<f64> = self
                .free
                .iter()
                .map(|&f| (0..n).filter(|&j| self.state[j] == HIGH).map(|j| self.q[(f, j)]).sum())
                .collect();
            let mut y = vec![0.0; k];
            for a in 0..k {
                let mut v = rhs[a];
                for b in 0..a {
                    v -= self.chol[a][b] * y[b];
                }
                y[a] = v / self.chol[a][a];
            }
            let mut x = vec![0.0; k];
            for a in (0..k).rev() {
                let mut v = y[a];
                for b in a + 1..k {
                    v -= self.chol[b][a] * x[b];
                }
                x[a] = v / self.chol[a][a];
            }
            if x.iter().any(|&v| !(-1e-12..=1.0 + 1e-12).contains(&v)) {
                return;
            }
            let mut s: Vec<f64> = self.state.iter().map(|&c| if c == HIGH { 1.0 } else { 0.0 }).collect();
            for (a, &f) in self.free.iter().enumerate() {
                s[f] = x[a].clamp(0.0, 1.0);
            }
            let val = dotv(&s, &mat_vec(self.q, &s));
            if val > self.best.0 {
                self.best = (val, s);
            }
        }
    }

    let n = q.nrows();
    let mut search = Search {
        q,
        state: vec![LOW; n],
        free: Vec::new(),
        chol: Vec::new(),
        best: (0.0, vec![0.0; n]),
    };
    search.run(0);
    search.best.1
}
