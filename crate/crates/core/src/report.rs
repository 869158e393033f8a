//! CSV and JSON serialization of shift tables, candidates, verdicts and matrices.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::metrics::{shift_report, ShiftReport};
use crate::spectral::{CandidateSet, Unavailable};

pub const DELTA_HEADER: &str = "candidate,dP1,dP2,dP3,dP4,dNDI,dGDI,choice_shift";

/// One row of the shift table.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaRow {
    pub candidate: String,
    pub prejudice: Vec<f64>,
    pub shift: ShiftReport,
}

impl DeltaRow {
    pub fn new(candidate: impl Into<String>, s: &[f64], h: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<Self> {
        let z = crate::linalg::mat_vec(h, s);
        Ok(DeltaRow { candidate: candidate.into(), prejudice: s.to_vec(), shift: shift_report(s, &z, w)? })
    }
}

/// Formats `x` with six significant digits, switching to exponent form outside `[1e-5, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" { "0".into() } else { s }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

fn check_rows(rows: &[DeltaRow], n: usize) -> Result<()> {
    for r in rows {
        if !r.shift.consistent(n, 1e-9) {
            return Err(Error::Numerical(format!(
                "row {} breaks Δ_GDI = nΔ_P1 or Δ_P3 = nΔ_P2",
                r.candidate
            )));
        }
    }
    Ok(())
}

pub fn delta_table_csv(rows: &[DeltaRow], n: usize) -> Result<String> {
    check_rows(rows, n)?;
    let mut out = String::from(DELTA_HEADER);
    out.push('\n');
    for r in rows {
        let d = &r.shift;
        let cells = [d.p1, d.p2, d.p3, d.p4, d.ndi, d.gdi, d.choice_shift].map(sig6);
        out.push_str(&r.candidate);
        for c in cells {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn delta_table_json(rows: &[DeltaRow], n: usize) -> Result<Value> {
    check_rows(rows, n)?;
    Ok(Value::Array(
        rows.iter()
            .map(|r| {
                let d = &r.shift;
                json!({
                    "candidate": r.candidate,
                    "dP1": d.p1, "dP2": d.p2, "dP3": d.p3, "dP4": d.p4,
                    "dNDI": d.ndi, "dGDI": d.gdi, "choice_shift": d.choice_shift,
                })
            })
            .collect(),
    ))
}

/// Per candidate: the vector, its shifts, provenance and certification, or why it is missing.
pub fn candidate_set_json(set: &CandidateSet, h: &DMatrix<f64>, w: &DMatrix<f64>) -> Result<Value> {
    let mut out = serde_json::Map::new();
    for (kind, r) in set.iter() {
        let v = match r {
            Ok(c) => {
                let row = DeltaRow::new(kind.name(), c.s.values(), h, w)?;
                json!({
                    "vector": c.s,
                    "deltas": row.shift,
                    "provenance": c.provenance,
                    "certified": c.certified,
                })
            }
            Err(u) => json!({ "unavailable": unavailable_label(u) }),
        };
        out.insert(kind.name().to_string(), v);
    }
    Ok(Value::Object(out))
}

fn unavailable_label(u: &Unavailable) -> String {
    u.to_string()
}

pub fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Rows `(node, prejudice, final, lambda)` followed by the two mean rows.
pub fn arrows_csv(labels: &[u64], s: &[f64], z: &[f64], lambdas: &[f64]) -> String {
    let mut out = String::from("node,prejudice,final,lambda\n");
    for i in 0..s.len() {
        out.push_str(&format!("{},{},{},{}\n", labels[i], sig6(s[i]), sig6(z[i]), sig6(lambdas[i])));
    }
    let n = s.len() as f64;
    out.push_str(&format!("mean_initial,{},,\n", sig6(s.iter().sum::<f64>() / n)));
    out.push_str(&format!("mean_final,,{},\n", sig6(z.iter().sum::<f64>() / n)));
    out
}
