//! Witness searches for `Psi(kF) ⊂ Psi(E - b)` and related patterns.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::finder::{sub, WitnessFinder};
use super::psi::{eval_psi_i64, InvariantMap, PsiValue};
use crate::bohr::{rational_spectrum_check, SetSource, SpectrumVerdict, Window};
use crate::error::{Error, Result};

/// Candidates for `b` are tried in batches of this size; the first success in
/// lexicographic order wins regardless of scheduling.
const B_BATCH: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub f: Vec<i64>,
    pub target: PsiValue,
    pub e: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub psi: InvariantMap,
    pub k: u64,
    pub b: Option<Vec<i64>>,
    pub witnesses: Vec<Witness>,
    pub success: bool,
    pub k_max: u64,
    pub b_window: Window,
    pub e_window: Window,
    /// Every `(k, b)` pair in the windows was tried without success.
    pub exhaustive: bool,
    pub pairs_tried: usize,
    /// How witnesses were located: solving for the last coordinate or a full scan.
    pub strategy: String,
}

impl WitnessReport {
    pub fn covered(&self) -> usize {
        self.witnesses.iter().filter(|w| w.e.is_some()).count()
    }

    /// Re-evaluates every witness from scratch.
    pub fn verify(&self, source: &SetSource) -> Result<bool> {
        let Some(b) = &self.b else { return Ok(self.witnesses.is_empty() && self.success) };
        if !source.contains(b)? {
            return Ok(false);
        }
        let k = BigInt::from(self.k);
        for w in &self.witnesses {
            let expected = self.psi.scale_value(&eval_psi_i64(&self.psi, &w.f)?, &k)?;
            let scaled: Vec<i64> = w.f.iter().map(|x| x * self.k as i64).collect();
            if expected != w.target || eval_psi_i64(&self.psi, &scaled)? != w.target {
                return Ok(false);
            }
            if let Some(e) = &w.e {
                if !source.contains(e)? || !self.e_window.contains(e) {
                    return Ok(false);
                }
                if eval_psi_i64(&self.psi, &sub(e, b))? != w.target {
                    return Ok(false);
                }
            } else if self.success {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Searches `k = 1..=k_max`, then `b in E ∩ b_window` lexicographically, for
/// witnesses `e in E ∩ e_window` with `Psi(e - b) = Psi(k f)` for all `f`.
/// Returns the first full success, otherwise the best partial cover.
pub fn twisted_pattern_search(
    psi: &InvariantMap,
    source: &SetSource,
    f: &[Vec<i64>],
    k_max: u64,
    b_window: &Window,
    e_window: &Window,
) -> Result<WitnessReport> {
    psi.validate()?;
    let n = psi.domain_rank();
    if source.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, got: source.rank() });
    }
    if let Some(bad) = f.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let bs = source.members(b_window)?;
    let finder = WitnessFinder::new(psi, source, e_window)?;
    let mut best: Option<WitnessReport> = None;
    let mut tried = 0;
    for k in 1..=k_max {
        let targets: Vec<PsiValue> = f
            .iter()
            .map(|v| eval_psi_i64(psi, &v.iter().map(|x| x * k as i64).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        let wanted: BTreeSet<PsiValue> = targets.iter().cloned().collect();
        for batch in bs.chunks(B_BATCH) {
            let results: Vec<BTreeMap<PsiValue, Vec<i64>>> =
                batch.par_iter().map(|b| finder.hits(b, &wanted)).collect::<Result<_>>()?;
            for (b, hits) in batch.iter().zip(results) {
                tried += 1;
                let witnesses: Vec<Witness> = f
                    .iter()
                    .zip(&targets)
                    .map(|(fv, t)| Witness { f: fv.clone(), target: t.clone(), e: hits.get(t).cloned() })
                    .collect();
                let report = WitnessReport {
                    psi: psi.clone(),
                    k,
                    b: Some(b.clone()),
                    success: witnesses.iter().all(|w| w.e.is_some()),
                    witnesses,
                    k_max,
                    b_window: b_window.clone(),
                    e_window: e_window.clone(),
                    exhaustive: false,
                    pairs_tried: tried,
                    strategy: finder.strategy().into(),
                };
                if report.success {
                    return Ok(report);
                }
                if best.as_ref().is_none_or(|r| report.covered() > r.covered()) {
                    best = Some(report);
                }
            }
        }
    }
    let mut report = match best {
        Some(r) => r,
        None => WitnessReport {
            psi: psi.clone(),
            k: 1,
            b: None,
            witnesses: f
                .iter()
                .map(|fv| Ok(Witness { f: fv.clone(), target: eval_psi_i64(psi, fv)?, e: None }))
                .collect::<Result<_>>()?,
            success: false,
            k_max,
            b_window: b_window.clone(),
            e_window: e_window.clone(),
            exhaustive: true,
            pairs_tried: 0,
            strategy: finder.strategy().into(),
        },
    };
    report.exhaustive = true;
    report.pairs_tried = tried;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetRow {
    pub target: PsiValue,
    pub witness: Option<Vec<i64>>,
    /// Window radius at which the witness was found.
    pub radius: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub psi: InvariantMap,
    pub spectrum: Option<SpectrumVerdict>,
    pub rows: Vec<TargetRow>,
    pub radii: Vec<i64>,
    pub strategy: String,
}

impl SurjectivityReport {
    pub fn unresolved(&self) -> Vec<&PsiValue> {
        self.rows.iter().filter(|r| r.witness.is_none()).map(|r| &r.target).collect()
    }

    pub fn all_resolved(&self) -> bool {
        self.rows.iter().all(|r| r.witness.is_some())
    }

    pub fn verify(&self, source: &SetSource) -> Result<bool> {
        for row in &self.rows {
            if let Some(v) = &row.witness {
                if !source.contains(v)? || eval_psi_i64(&self.psi, v)? != row.target {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// For each target value, a `v in E` with `Psi(v) = target`, searching the
/// windows `[-r, r]^N` for `r = r0, 2 r0, 4 r0, ...` (`doublings` times).
/// Targets still open at the last radius are reported unresolved.
pub fn bohr_surjectivity_check(
    psi: &InvariantMap,
    source: &SetSource,
    targets: &[PsiValue],
    r0: i64,
    doublings: u32,
    spectrum_bound: Option<u64>,
) -> Result<SurjectivityReport> {
    psi.validate()?;
    let n = psi.domain_rank();
    if source.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, got: source.rank() });
    }
    if r0 <= 0 {
        return Err(Error::invalid("initial radius must be positive"));
    }
    let spectrum = match source {
        SetSource::Bohr(spec) => {
            if !spec.contains_zero() {
                return Err(Error::invalid("surjectivity search needs a Bohr_o set (box containing 0)"));
            }
            spectrum_bound.map(|h| rational_spectrum_check(spec.system(), h)).transpose()?
        }
        _ => None,
    };
    let mut rows: Vec<TargetRow> =
        targets.iter().map(|t| TargetRow { target: t.clone(), witness: None, radius: None }).collect();
    let mut radii = Vec::new();
    let mut strategy = String::new();
    let origin = vec![0; n];
    for i in 0..=doublings {
        let open: BTreeSet<PsiValue> = rows.iter().filter(|r| r.witness.is_none()).map(|r| r.target.clone()).collect();
        if open.is_empty() {
            break;
        }
        let r = r0.checked_shl(i).ok_or_else(|| Error::invalid("window radius overflow"))?;
        radii.push(r);
        let finder = WitnessFinder::new(psi, source, &Window::cube(&origin, r))?;
        let hits = finder.hits(&origin, &open)?;
        strategy = finder.strategy().into();
        for row in rows.iter_mut().filter(|r| r.witness.is_none()) {
            if let Some(v) = hits.get(&row.target) {
                row.witness = Some(v.clone());
                row.radius = Some(r);
            }
        }
    }
    Ok(SurjectivityReport { psi: psi.clone(), spectrum, rows, radii, strategy })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferenceRow {
    pub a: Vec<i64>,
    pub target: PsiValue,
    pub pair: Option<(Vec<i64>, Vec<i64>)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceReport {
    pub psi: InvariantMap,
    pub k: u64,
    pub rows: Vec<DifferenceRow>,
}

impl DifferenceReport {
    pub fn all_covered(&self) -> bool {
        self.rows.iter().all(|r| r.pair.is_some())
    }

    pub fn verify(&self, source: &SetSource) -> Result<bool> {
        for row in &self.rows {
            let ka: Vec<i64> = row.a.iter().map(|x| x * self.k as i64).collect();
            if eval_psi_i64(&self.psi, &ka)? != row.target {
                return Ok(false);
            }
            if let Some((e1, e2)) = &row.pair {
                if !source.contains(e1)? || !source.contains(e2)? || eval_psi_i64(&self.psi, &sub(e1, e2))? != row.target {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Certifies `Psi(k a) in Psi(E - E)` for each `a` in `values`: anchors
/// `e2 in E ∩ anchors` are tried nearest to the origin first, and for each
/// one `e1 in E ∩ search` is sought with `Psi(e1 - e2) = Psi(k a)`.
pub fn difference_pattern_check(
    psi: &InvariantMap,
    source: &SetSource,
    k: u64,
    values: &Window,
    anchors: &Window,
    search: &Window,
) -> Result<DifferenceReport> {
    psi.validate()?;
    let n = psi.domain_rank();
    for dim in [source.rank(), values.dim(), anchors.dim(), search.dim()] {
        if dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: dim });
        }
    }
    let mut rows: Vec<DifferenceRow> = values
        .points()
        .map(|a| {
            let ka: Vec<i64> = a.iter().map(|x| x * k as i64).collect();
            Ok(DifferenceRow { target: eval_psi_i64(psi, &ka)?, a, pair: None })
        })
        .collect::<Result<_>>()?;
    let mut open: BTreeSet<PsiValue> = rows.iter().map(|r| r.target.clone()).collect();
    let mut found: BTreeMap<PsiValue, (Vec<i64>, Vec<i64>)> = BTreeMap::new();
    let finder = WitnessFinder::new(psi, source, search)?;
    let origin = vec![0; n];
    let mut anchor_list = source.members(anchors)?;
    anchor_list.sort_by_cached_key(|b| (sub(b, &origin).iter().map(|x| x.abs()).max().unwrap_or(0), b.clone()));
    for e2 in anchor_list {
        if open.is_empty() {
            break;
        }
        for (v, e1) in finder.hits(&e2, &open)? {
            open.remove(&v);
            found.insert(v, (e1, e2.clone()));
        }
    }
    for row in &mut rows {
        row.pair = found.get(&row.target).cloned();
    }
    Ok(DifferenceReport { psi: psi.clone(), k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrSetSpec;

    #[test]
    fn zero_pattern_is_trivial() {
        let e = SetSource::Bohr(BohrSetSpec::golden_cube());
        let r = twisted_pattern_search(
            &InvariantMap::q3(),
            &e,
            &[vec![0, 0, 0]],
            1,
            &Window::cube(&[0, 0, 0], 2),
            &Window::cube(&[0, 0, 0], 2),
        )
        .unwrap();
        assert!(r.success);
        assert_eq!(r.k, 1);
        assert_eq!(r.witnesses[0].e, r.b);
        assert!(r.verify(&e).unwrap());
    }

    #[test]
    fn even_lattice_forces_even_k() {
        // Q(e - b) is divisible by 4 on (2Z)^3 while Q(k (1,0,0)) = k^2.
        let e = SetSource::multiples(2, 3).unwrap();
        let r = twisted_pattern_search(
            &InvariantMap::q3(),
            &e,
            &[vec![1, 0, 0]],
            4,
            &Window::cube(&[0, 0, 0], 2),
            &Window::cube(&[0, 0, 0], 4),
        )
        .unwrap();
        assert!(r.success);
        assert_eq!(r.k, 2);
        assert!(r.verify(&e).unwrap());
    }

    #[test]
    fn failure_reports_best_partial_cover() {
        let e = SetSource::multiples(2, 3).unwrap();
        let r = twisted_pattern_search(
            &InvariantMap::q3(),
            &e,
            &[vec![1, 0, 0], vec![0, 0, 0]],
            1,
            &Window::cube(&[0, 0, 0], 1),
            &Window::cube(&[0, 0, 0], 2),
        )
        .unwrap();
        assert!(!r.success);
        assert!(r.exhaustive);
        assert_eq!(r.covered(), 1);
        assert!(r.verify(&e).unwrap());
    }

    #[test]
    fn surjectivity_small_targets() {
        let e = SetSource::Bohr(BohrSetSpec::golden_cube());
        let targets: Vec<PsiValue> = (-5..=5).map(|n: i64| PsiValue::Int(n.into())).collect();
        let r = bohr_surjectivity_check(&InvariantMap::q3(), &e, &targets, 8, 8, None).unwrap();
        assert!(r.all_resolved(), "{:?}", r.unresolved());
        assert_eq!(r.rows[5].witness, Some(vec![0, 0, 0]));
        assert!(r.verify(&e).unwrap());
    }

    #[test]
    fn differences_of_even_lattice() {
        let e = SetSource::multiples(2, 3).unwrap();
        let r = difference_pattern_check(
            &InvariantMap::q3(),
            &e,
            2,
            &Window::cube(&[0, 0, 0], 1),
            &Window::cube(&[0, 0, 0], 2),
            &Window::cube(&[0, 0, 0], 4),
        )
        .unwrap();
        assert!(r.all_covered());
        assert!(r.verify(&e).unwrap());
    }
}
