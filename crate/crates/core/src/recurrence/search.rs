use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::region::Region;
use crate::bohr::{rational_spectrum_check, KroneckerSystem, SpectrumVerdict};
use crate::error::{Error, Result};
use crate::exact::{format_rational, serde_rational};
use crate::matgroup::{ball, BallElement, GeneratorSystem, Word};

/// Twists to search for: vectors `a_j`, the group supplying `gamma_j`, the
/// word-length budget and the slack `eps`.
#[derive(Clone, Debug)]
pub struct TwistConfig {
    pub a_list: Vec<Vec<i64>>,
    pub gens: GeneratorSystem,
    pub max_length: usize,
    pub epsilon: BigRational,
    pub ball_cap: usize,
    /// Height bound for the rational spectrum precheck.
    pub spectrum_bound: u64,
}

impl TwistConfig {
    pub fn new(a_list: Vec<Vec<i64>>, gens: GeneratorSystem, max_length: usize, epsilon: BigRational) -> Result<Self> {
        if a_list.is_empty() {
            return Err(Error::invalid("need at least one vector a_j"));
        }
        if epsilon <= BigRational::zero() || epsilon >= BigRational::one() {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        if let Some(a) = a_list.iter().find(|a| a.len() != gens.dim()) {
            return Err(Error::DimensionMismatch { expected: gens.dim(), got: a.len() });
        }
        Ok(TwistConfig { a_list, gens, max_length, epsilon, ball_cap: 2_000_000, spectrum_bound: 50 })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthRow {
    pub length: usize,
    #[serde(with = "serde_rational")]
    pub measure: BigRational,
    /// Best measure over all lengths up to this one.
    #[serde(with = "serde_rational")]
    pub best: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub a_list: Vec<Vec<i64>>,
    pub words: Vec<String>,
    #[serde(skip)]
    pub word_indices: Vec<Word>,
    /// `gamma_j a_j`
    pub shifts: Vec<Vec<i64>>,
    #[serde(with = "serde_rational")]
    pub measure: BigRational,
    pub measure_error: f64,
    #[serde(with = "serde_rational")]
    pub base_measure: BigRational,
    #[serde(with = "serde_rational")]
    pub threshold: BigRational,
    pub success: bool,
    pub best_length: usize,
    pub per_length: Vec<LengthRow>,
    pub ball_size: usize,
    pub ball_truncated_at: Option<usize>,
    pub spectrum: SpectrumVerdict,
}

impl RecurrenceReport {
    pub fn measure_f64(&self) -> f64 {
        self.measure.to_f64().unwrap_or(f64::NAN)
    }

    /// Recomputes the intersection measure from the recorded shifts.
    pub fn verify(&self, system: &KroneckerSystem, u: &Region) -> Result<bool> {
        Ok(intersection_measure(system, u, &self.shifts)?.measure() == self.measure)
    }

    pub fn summary(&self) -> String {
        format!(
            "measure {} (~{:.6}) vs threshold {} at length {}: {}",
            format_rational(&self.measure),
            self.measure_f64(),
            format_rational(&self.threshold),
            self.best_length,
            if self.success { "ok" } else { "below threshold" }
        )
    }
}

/// `⋂_j b_j·U = ⋂_j (U - tau(b_j))`; the bare `U` when there are no shifts.
pub fn intersection_measure(system: &KroneckerSystem, u: &Region, shifts: &[Vec<i64>]) -> Result<Region> {
    if u.dim() != system.torus_dim() {
        return Err(Error::DimensionMismatch { expected: system.torus_dim(), got: u.dim() });
    }
    let mut acc: Option<Region> = None;
    for b in shifts {
        let neg: Vec<i64> = b.iter().map(|x| -x).collect();
        let moved = u.translate(&system.image(&neg)?)?;
        acc = Some(match acc {
            None => moved,
            Some(r) => r.intersect(&moved)?,
        });
    }
    Ok(acc.unwrap_or_else(|| u.clone()))
}

/// Circle distance of a 128-bit fixed point from 0.
fn circ(x: u128) -> u128 {
    x.min(x.wrapping_neg())
}

fn to_i64(v: Vec<BigInt>) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

/// For each `j` and each prefix length `l`, picks `gamma` in the ball of
/// radius `l` minimizing the sup distance of `tau(gamma a_j)` from 0, with
/// ties going to the shortlex-first word. Measures of the resulting
/// intersections are exact; the best over `l <= L` is reported.
pub fn twisted_recurrence_search(system: &KroneckerSystem, u: &Region, config: &TwistConfig) -> Result<RecurrenceReport> {
    if config.gens.dim() != system.rank() {
        return Err(Error::DimensionMismatch { expected: system.rank(), got: config.gens.dim() });
    }
    let origin = vec![BigRational::zero(); u.dim()];
    if !u.contains(&origin) {
        return Err(Error::invalid("U must contain the identity"));
    }
    let spectrum = rational_spectrum_check(system, config.spectrum_bound)?;
    if !spectrum.is_trivial() {
        return Err(Error::invalid("rational spectrum is not trivial; k = 1 twists are not guaranteed"));
    }
    let b = ball(&config.gens, config.max_length, config.ball_cap);
    let lengths = b.sizes.len();

    // best[j][l] = index of the chosen element among words of length <= l
    let mut best_idx: Vec<Vec<usize>> = Vec::with_capacity(config.a_list.len());
    for a in &config.a_list {
        let dists: Vec<(u128, usize)> = b
            .elements
            .par_iter()
            .enumerate()
            .map(|(i, e): (usize, &BallElement)| {
                let d = match to_i64(e.matrix.apply_i64(a)) {
                    Some(v) => system.fast_image(&v).0.into_iter().map(circ).max().unwrap_or(0),
                    None => u128::MAX,
                };
                (d, i)
            })
            .collect();
        let mut per_len = Vec::with_capacity(lengths);
        let mut cur = (u128::MAX, usize::MAX);
        let mut start = 0;
        for &end in &b.sizes {
            for &d in &dists[start..end] {
                cur = cur.min(d);
            }
            start = end;
            per_len.push(cur.1);
        }
        best_idx.push(per_len);
    }

    let shifts_at = |l: usize| -> Result<Vec<Vec<i64>>> {
        config
            .a_list
            .iter()
            .zip(&best_idx)
            .map(|(a, idx)| {
                to_i64(b.elements[idx[l]].matrix.apply_i64(a)).ok_or_else(|| Error::invalid("shift overflows i64"))
            })
            .collect()
    };

    let mut per_length = Vec::with_capacity(lengths);
    let mut best: Option<(usize, Region, Vec<Vec<i64>>)> = None;
    for l in 0..lengths {
        let shifts = shifts_at(l)?;
        let region = intersection_measure(system, u, &shifts)?;
        let m = region.measure();
        if best.as_ref().is_none_or(|(_, r, _)| m > r.measure()) {
            best = Some((l, region, shifts));
        }
        let best_m = best.as_ref().map(|(_, r, _)| r.measure()).unwrap_or_else(BigRational::zero);
        per_length.push(LengthRow { length: l, measure: m, best: best_m });
    }
    let (best_length, region, shifts) = best.expect("ball always contains the identity");
    let word_indices: Vec<Word> =
        best_idx.iter().map(|idx| b.elements[idx[best_length]].word.clone()).collect();
    let words = word_indices.iter().map(|w| config.gens.format_word(w)).collect();
    let base_measure = u.measure();
    let mut threshold = BigRational::one();
    for _ in 0..config.a_list.len() {
        threshold *= &base_measure;
    }
    threshold -= &config.epsilon;
    let measure = region.measure();
    Ok(RecurrenceReport {
        a_list: config.a_list.clone(),
        words,
        word_indices,
        shifts,
        success: (&measure - &threshold).to_f64().is_some_and(|gap| gap >= region.measure_error()),
        measure,
        measure_error: region.measure_error(),
        base_measure,
        threshold,
        best_length,
        per_length,
        ball_size: b.len(),
        ball_truncated_at: b.truncated.map(|t| t.at_length),
        spectrum,
    })
}
