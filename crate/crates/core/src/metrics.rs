//! Polarization indices and their shifts between prejudice `s` and outcome `z`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{check_len, Result};

/// Shifts above this count as polarizing.
pub const POLARIZING_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    Ndi,
    Gdi,
    P1,
    P2,
    P3,
    P4,
}

impl Metric {
    pub const ALL: [Metric; 6] = [Metric::P1, Metric::P2, Metric::P3, Metric::P4, Metric::Ndi, Metric::Gdi];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ndi => "NDI",
            Metric::Gdi => "GDI",
            Metric::P1 => "P1",
            Metric::P2 => "P2",
            Metric::P3 => "P3",
            Metric::P4 => "P4",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricsBundle {
    pub ndi: f64,
    pub gdi: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub total_opinion: f64,
}

impl MetricsBundle {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Ndi => self.ndi,
            Metric::Gdi => self.gdi,
            Metric::P1 => self.p1,
            Metric::P2 => self.p2,
            Metric::P3 => self.p3,
            Metric::P4 => self.p4,
        }
    }
}

/// Neighborhood disagreement `Σ w_ij (x_i - x_j)²` over the nonzero influence weights.
pub fn ndi(x: &[f64], w: &DMatrix<f64>) -> Result<f64> {
    check_len(w.nrows(), x.len())?;
    let mut total = 0.0;
    for (j, col) in w.column_iter().enumerate() {
        for (i, &wij) in col.iter().enumerate() {
            if wij != 0.0 {
                let d = x[i] - x[j];
                total += wij * d * d;
            }
        }
    }
    Ok(total)
}

/// Global disagreement `Σ_{i<j} (x_i - x_j)²` over all node pairs.
pub fn gdi(x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i] - x[j];
            total += d * d;
        }
    }
    total
}

/// `‖x - x̄‖²`
pub fn p1(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean) * (v - mean)).sum()
}

/// `‖x‖² / n`
pub fn p2(x: &[f64]) -> f64 {
    p3(x) / x.len() as f64
}

/// `‖x‖²`
pub fn p3(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `‖x‖₁`
pub fn p4(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Evaluates one index. NDI needs the influence matrix.
pub fn evaluate(m: Metric, x: &[f64], w: Option<&DMatrix<f64>>) -> Result<f64> {
    Ok(match m {
        Metric::Ndi => match w {
            Some(w) => ndi(x, w)?,
            None => return Err(crate::Error::invalid("NDI needs the influence matrix")),
        },
        Metric::Gdi => gdi(x),
        Metric::P1 => p1(x),
        Metric::P2 => p2(x),
        Metric::P3 => p3(x),
        Metric::P4 => p4(x),
    })
}

pub fn metrics_bundle(x: &[f64], w: &DMatrix<f64>) -> Result<MetricsBundle> {
    Ok(MetricsBundle {
        ndi: ndi(x, w)?,
        gdi: gdi(x),
        p1: p1(x),
        p2: p2(x),
        p3: p3(x),
        p4: p4(x),
        total_opinion: x.iter().sum(),
    })
}

/// `Φ(z) - Φ(s)` for every index, and the change of the opinion sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShiftReport {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub ndi: f64,
    pub gdi: f64,
    pub choice_shift: f64,
}

impl ShiftReport {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Ndi => self.ndi,
            Metric::Gdi => self.gdi,
            Metric::P1 => self.p1,
            Metric::P2 => self.p2,
            Metric::P3 => self.p3,
            Metric::P4 => self.p4,
        }
    }

    pub fn polarizing(&self, m: Metric) -> bool {
        self.get(m) > POLARIZING_EPS
    }

    /// Checks `Δ_GDI = n Δ_P1` and `Δ_P3 = n Δ_P2` to relative `tol`.
    pub fn consistent(&self, n: usize, tol: f64) -> bool {
        let n = n as f64;
        let rel = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));
        rel(self.gdi, n * self.p1) && rel(self.p3, n * self.p2)
    }
}

pub fn shift_report(s: &[f64], z: &[f64], w: &DMatrix<f64>) -> Result<ShiftReport> {
    check_len(s.len(), z.len())?;
    let a = metrics_bundle(s, w)?;
    let b = metrics_bundle(z, w)?;
    Ok(ShiftReport {
        p1: b.p1 - a.p1,
        p2: b.p2 - a.p2,
        p3: b.p3 - a.p3,
        p4: b.p4 - a.p4,
        ndi: b.ndi - a.ndi,
        gdi: b.gdi - a.gdi,
        choice_shift: b.total_opinion - a.total_opinion,
    })
}

/// `P1(x) - P3(x) + P4(x)² / n`, never negative and zero for sign-concordant `x`.
pub fn invariant_gap(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let l1 = p4(x);
    p1(x) - p3(x) + l1 * l1 / n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_node_indices() {
        let x = [0.0, 1.0, 1.0];
        assert_eq!(p3(&x), 2.0);
        assert_eq!(p4(&x), 2.0);
        assert!((p2(&x) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p1(&x) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(gdi(&x), 2.0);
    }

    #[test]
    fn constant_vector_has_no_disagreement() {
        let x = [0.4; 5];
        let w = DMatrix::from_element(5, 5, 0.2);
        let b = metrics_bundle(&x, &w).unwrap();
        assert!(b.p1.abs() < 1e-15 && b.gdi == 0.0 && b.ndi == 0.0);
    }

    #[test]
    fn two_node_ndi() {
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(ndi(&[1.0, -1.0], &w).unwrap(), 8.0);
        assert!(ndi(&[1.0], &w).is_err());
    }

    #[test]
    fn gap_values() {
        assert!(invariant_gap(&[0.2, 0.7, 1.0]).abs() < 1e-12);
        assert!((invariant_gap(&[1.0, -1.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_shift_is_zero() {
        let s = [0.1, -0.4, 0.9];
        let w = DMatrix::from_element(3, 3, 1.0 / 3.0);
        let r = shift_report(&s, &s, &w).unwrap();
        for m in Metric::ALL {
            assert_eq!(r.get(m), 0.0);
            assert!(!r.polarizing(m));
        }
        assert_eq!(r.choice_shift, 0.0);
    }
}
