//! Translates of a set whose characteristic polynomials realize every Galois label.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use super::galois::{galois_label, GaloisLabelValue};
use super::psi::{char_poly, eval_psi_i64, InvariantMap, PsiValue};
use crate::bohr::{SetSource, Window};
use crate::error::{Error, Result};
use crate::matgroup::rep::traceless_coords;
use crate::matgroup::LatticeMatrix;

/// Companion matrix of the monic polynomial `[1, c_1, ..., c_d]`.
pub fn companion(poly: &[i64]) -> Result<LatticeMatrix> {
    let d = poly.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| Error::invalid("empty polynomial"))?;
    if poly[0] != 1 {
        return Err(Error::invalid("polynomial must be monic"));
    }
    let mut rows = vec![vec![0i64; d]; d];
    for i in 1..d {
        rows[i][i - 1] = 1;
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row[d - 1] = -poly[d - i];
    }
    LatticeMatrix::from_rows(&rows)
}

/// Traceless polynomials whose companion matrices realize each label for `d`.
pub fn label_realizers(d: usize) -> Result<Vec<Vec<i64>>> {
    match d {
        2 => Ok(vec![vec![1, 0, -1], vec![1, 0, -2]]),
        3 => Ok(vec![vec![1, 0, -1, 0], vec![1, 0, -2, 0], vec![1, 0, -3, 1], vec![1, 0, 0, -2]]),
        _ => Err(Error::invalid("Galois labels only for d = 2, 3")),
    }
}

/// Labels realized by traceless integer matrices, each with a companion
/// matrix (in `sl_d` coordinates) realizing it.
pub fn realized_labels(d: usize) -> Result<BTreeMap<GaloisLabelValue, Vec<BigInt>>> {
    let mut out = BTreeMap::new();
    for p in label_realizers(d)? {
        let m = companion(&p)?;
        let label = galois_label(&char_poly(&m))?;
        out.entry(label).or_insert(traceless_coords(&m)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaloisTranslateReport {
    pub d: usize,
    pub expected: Vec<GaloisLabelValue>,
    pub b: Option<Vec<i64>>,
    /// Label -> first `e` (lexicographic) with that label for `C(e - b)`.
    pub found: BTreeMap<String, Vec<i64>>,
    pub complete: bool,
    pub translates_tried: usize,
}

/// Looks for `b in E ∩ b_window` such that every realizable label occurs as
/// the Galois label of `C(e - b)` for some `e in E ∩ e_window`.
pub fn galois_translate_check(d: usize, source: &SetSource, b_window: &Window, e_window: &Window) -> Result<GaloisTranslateReport> {
    let psi = InvariantMap::GaloisLabel { d };
    psi.validate()?;
    if source.rank() != psi.domain_rank() {
        return Err(Error::DimensionMismatch { expected: psi.domain_rank(), got: source.rank() });
    }
    let expected: Vec<GaloisLabelValue> = realized_labels(d)?.into_keys().collect();
    let members = source.members(e_window)?;
    let mut best: Option<GaloisTranslateReport> = None;
    let mut tried = 0;
    for b in source.members(b_window)? {
        tried += 1;
        let mut found = BTreeMap::new();
        for e in &members {
            let diff: Vec<i64> = e.iter().zip(&b).map(|(x, y)| x - y).collect();
            if let PsiValue::Label(l) = eval_psi_i64(&psi, &diff)? {
                if expected.contains(&l) {
                    found.entry(l.to_string()).or_insert_with(|| e.clone());
                }
            }
            if found.len() == expected.len() {
                break;
            }
        }
        let complete = found.len() == expected.len();
        let report = GaloisTranslateReport {
            d,
            expected: expected.clone(),
            b: Some(b),
            found,
            complete,
            translates_tried: tried,
        };
        if complete {
            return Ok(report);
        }
        if best.as_ref().is_none_or(|r| report.found.len() > r.found.len()) {
            best = Some(report);
        }
    }
    let mut report = best.unwrap_or(GaloisTranslateReport {
        d,
        expected,
        b: None,
        found: BTreeMap::new(),
        complete: false,
        translates_tried: 0,
    });
    report.translates_tried = tried;
    Ok(report)
}
