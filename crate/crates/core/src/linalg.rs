//! Dense kernels: cyclic Jacobi for the eigenpairs of `HᵀH`, LU solves, norms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenpairs of `AᵀA`, eigenvalues descending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct GramEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

/// One-sided cyclic Jacobi: rotates column pairs of `A V` until they are mutually
/// orthogonal, which diagonalizes `AᵀA = V diag(‖a_i‖²) Vᵀ`. Sweeps stop once every
/// pair satisfies `|a_p·a_q| <= tol * ‖a_p‖‖a_q‖`.
pub fn gram_eigen(a: &DMatrix<f64>, tol: f64, max_sweeps: usize) -> Result<GramEigen> {
    let (m, n) = a.shape();
    let mut u = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut norms: Vec<f64> = (0..n).map(|j| u.column(j).norm_squared()).collect();
    // Columns this small relative to the largest are numerically zero.
    let negligible = 1e-32 * norms.iter().copied().fold(0.0, f64::max);
    let mut worst = f64::INFINITY;
    for _ in 0..max_sweeps {
        worst = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&u, p, q, m);
                let rel = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                worst = worst.max(rel);
                if rel <= tol {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
                norms[p] = u.column(p).norm_squared();
                norms[q] = u.column(q).norm_squared();
            }
        }
        if worst <= tol {
            return Ok(sorted(norms, v));
        }
    }
    Err(Error::Convergence { what: "jacobi eigensolver", residual: worst })
}

fn dot(u: &DMatrix<f64>, p: usize, q: usize, m: usize) -> f64 {
    let s = u.as_slice();
    s[p * m..(p + 1) * m].iter().zip(&s[q * m..(q + 1) * m]).map(|(x, y)| x * y).sum()
}

fn rotate(u: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let m = u.nrows();
    let data = u.as_mut_slice();
    let (head, tail) = data.split_at_mut(q * m);
    let cp = &mut head[p * m..(p + 1) * m];
    let cq = &mut tail[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

fn sorted(values: Vec<f64>, v: DMatrix<f64>) -> GramEigen {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let vectors = DMatrix::from_fn(v.nrows(), order.len(), |r, k| v[(r, order[k])]);
    GramEigen { values: order.iter().map(|&i| values[i]).collect(), vectors }
}

/// Solves `A X = B` by LU with partial pivoting; a pivot below `1e-14 * max|A|` is singular.
pub fn lu_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let lu = a.clone().lu();
    let min_pivot = lu.u().diagonal().amin();
    if min_pivot <= 1e-14 * scale {
        return Err(Error::Numerical(format!(
            "linear system is singular (smallest pivot {min_pivot:.3e})"
        )));
    }
    lu.solve(b).ok_or_else(|| Error::Numerical("LU solve failed".into()))
}

pub fn column_sums(h: &DMatrix<f64>) -> Vec<f64> {
    h.column_iter().map(|c| c.sum()).collect()
}

/// Largest absolute column sum.
pub fn norm_1(h: &DMatrix<f64>) -> f64 {
    h.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max)
}

/// Spectral norm via the Jacobi eigensolver.
pub fn norm_2(h: &DMatrix<f64>) -> Result<f64> {
    Ok(gram_eigen(h, 1e-13, 100)?.values[0].max(0.0).sqrt())
}

pub(crate) fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn mat_vec(h: &DMatrix<f64>, s: &[f64]) -> Vec<f64> {
    let mut z = vec![0.0; h.nrows()];
    for (j, col) in h.column_iter().enumerate() {
        let sj = s[j];
        if sj != 0.0 {
            for (zi, hij) in z.iter_mut().zip(col.iter()) {
                *zi += hij * sj;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_symmetric_eigen_oracle() {
        let a = DMatrix::from_fn(7, 7, |i, j| ((i * 7 + j * 3) % 5) as f64 / 4.0 - 0.3);
        let ours = gram_eigen(&a, 1e-14, 100).unwrap();
        let ata = a.transpose() * &a;
        let mut theirs: Vec<f64> = ata.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.values.iter().zip(&theirs) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
        for k in 0..7 {
            let v = ours.vectors.column(k);
            let r = &ata * v - v * ours.values[k];
            assert!(r.norm() < 1e-10);
        }
        let gram = ours.vectors.transpose() * &ours.vectors;
        assert!((gram - DMatrix::identity(7, 7)).amax() < 1e-12);
    }

    #[test]
    fn rank_deficient_input() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[1.0, 2.0, 0.0, 0.0, 3.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 2.0, 1.0, 1.0, 0.0, 5.0],
        );
        let e = gram_eigen(&a, 1e-14, 100).unwrap();
        assert_eq!(e.values[3], 0.0);
        assert!(e.vectors.column(3)[2].abs() > 0.99);
    }

    #[test]
    fn singular_lu_is_reported() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(lu_solve(&a, &DMatrix::identity(2, 2)).is_err());
    }
}
