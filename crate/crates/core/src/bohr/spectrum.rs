use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::kronecker::KroneckerSystem;
use crate::error::{Error, Result};
use crate::exact::{circle_norm, lcm_of_denominators, Coord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpectrumVerdict {
    /// No `eta` with `|eta|_inf <= H` and `m <= H` kills `tau^t eta`.
    Trivial { bound: u64 },
    /// `m * (tau^t eta) = 0 mod 1`.
    NontrivialWitness { eta: Vec<i64>, m: u64 },
}

impl SpectrumVerdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, SpectrumVerdict::Trivial { .. })
    }
}

/// Frequencies of sup-norm exactly `r` whose first nonzero entry is positive,
/// in lexicographic order.
fn shell(dim: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-r; dim];
    loop {
        let sup = cur.iter().map(|x| x.abs()).max().unwrap_or(0);
        let lead = cur.iter().find(|&&x| x != 0).copied().unwrap_or(0);
        if sup == r && lead > 0 {
            out.push(cur.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < r {
                cur[i] += 1;
                for c in cur.iter_mut().skip(i + 1) {
                    *c = -r;
                }
                break;
            }
        }
    }
}

enum Probe {
    Never,
    Killed(u64),
    Undecided,
}

fn probe(x: &[Coord], bound: u64) -> Probe {
    if x.iter().any(|c| matches!(c, Coord::Surd(_))) {
        return Probe::Never;
    }
    if let Some(qs) = x.iter().map(|c| c.as_exact()).collect::<Option<Vec<_>>>() {
        let m = lcm_of_denominators(qs);
        return match m.to_u64() {
            Some(m) if m <= bound => Probe::Killed(m),
            _ => Probe::Never,
        };
    }
    // Some coordinate is only known to finite precision: `m x` is certainly
    // nonzero once it is farther from 0 than `m` times the error.
    let mut undecided = false;
    for m in 1..=bound {
        let mb = BigInt::from(m);
        let mut all_zero = true;
        let mut certain = true;
        for c in x {
            match c {
                Coord::Exact(q) => {
                    if !(q * &mb).is_integer() {
                        all_zero = false;
                    }
                }
                _ => {
                    let f = c.to_fixed(256);
                    let dist = circle_norm(&(f.to_rational() * BigRational::from_integer(mb.clone())));
                    let err = f.err() * m as f64;
                    if dist.to_f64().unwrap_or(1.0) > err {
                        all_zero = false;
                    } else {
                        certain = false;
                    }
                }
            }
            if !all_zero {
                break;
            }
        }
        if all_zero {
            if certain {
                return Probe::Killed(m);
            }
            undecided = true;
        }
    }
    if undecided {
        Probe::Undecided
    } else {
        Probe::Never
    }
}

/// Searches for a rational character in the closure of `tau(Z^N)`: a nonzero
/// `eta in Z^M` with `|eta|_inf <= H` and `1 <= m <= H` such that
/// `m tau^t eta = 0 mod 1`. Frequencies are scanned by sup norm, then
/// lexicographically; the first hit is returned with its least `m`.
pub fn rational_spectrum_check(system: &KroneckerSystem, bound: u64) -> Result<SpectrumVerdict> {
    if bound == 0 {
        return Err(Error::invalid("denominator bound must be at least 1"));
    }
    let h = i64::try_from(bound).map_err(|_| Error::invalid("denominator bound too large"))?;
    for r in 1..=h {
        let candidates = shell(system.torus_dim(), r);
        let results: Vec<(usize, Probe)> = candidates
            .par_iter()
            .enumerate()
            .map(|(i, eta)| {
                let x = system.dual_point(eta).expect("dimension matches");
                (i, probe(x.coords(), bound))
            })
            .filter(|(_, p)| !matches!(p, Probe::Never))
            .collect();
        let undecided: Vec<String> = results
            .iter()
            .filter(|(_, p)| matches!(p, Probe::Undecided))
            .map(|(i, _)| format!("{:?}", candidates[*i]))
            .collect();
        if let Some((i, Probe::Killed(m))) = results.iter().find(|(_, p)| matches!(p, Probe::Killed(_))) {
            // Only trust the hit if nothing earlier in scan order is undecided.
            let earlier = results.iter().any(|(j, p)| j < i && matches!(p, Probe::Undecided));
            if !earlier {
                return Ok(SpectrumVerdict::NontrivialWitness { eta: candidates[*i].clone(), m: *m });
            }
        }
        if !undecided.is_empty() {
            return Err(Error::Undecidable(format!(
                "rationality of tau^t eta undecidable at current precision for eta in {}",
                undecided.join(", ")
            )));
        }
    }
    Ok(SpectrumVerdict::Trivial { bound })
}
