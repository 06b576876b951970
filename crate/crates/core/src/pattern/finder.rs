//! Locating `e in E ∩ window` with `Psi(e - b) = y` for many targets `y`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::galois::is_square;
use super::psi::{eval_psi_i64, InvariantMap, PsiValue};
use crate::bohr::{SetSource, Window};
use crate::error::Result;

pub(crate) fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn sup_dist(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0)
}

/// Preference order among witnesses: closest to the center in sup norm,
/// then lexicographically smallest.
fn key(e: &[i64], center: &[i64]) -> (i64, Vec<i64>) {
    (sup_dist(e, center), e.to_vec())
}

enum Mode {
    /// `Psi` is quadratic in the last coordinate and `E` splits off its last
    /// coordinate: enumerate the other coordinates and solve for the last.
    Solve { prefixes: Vec<Vec<i64>> },
    /// Enumerate `E ∩ window` outright.
    Scan { members: Vec<Vec<i64>> },
}

pub(crate) struct WitnessFinder<'a> {
    psi: &'a InvariantMap,
    source: &'a SetSource,
    window: Window,
    mode: Mode,
}

impl<'a> WitnessFinder<'a> {
    pub(crate) fn new(psi: &'a InvariantMap, source: &'a SetSource, window: &Window) -> Result<Self> {
        let integer_valued = matches!(psi, InvariantMap::QuadraticForm { .. } | InvariantMap::Determinant { .. });
        let projection = if integer_valued { source.project_last() } else { None };
        let mode = match projection {
            Some(prefix_set) => {
                let n = window.dim();
                let prefixes = if n == 1 {
                    vec![vec![]]
                } else {
                    prefix_set.members(&Window::new(window.lo[..n - 1].to_vec(), window.hi[..n - 1].to_vec())?)?
                };
                Mode::Solve { prefixes }
            }
            None => Mode::Scan { members: source.members(window)? },
        };
        Ok(WitnessFinder { psi, source, window: window.clone(), mode })
    }

    pub(crate) fn strategy(&self) -> &'static str {
        match self.mode {
            Mode::Solve { .. } => "solve-last-coordinate",
            Mode::Scan { .. } => "scan",
        }
    }

    /// For each target, the preferred `e` with `Psi(e - center) = target`.
    pub(crate) fn hits(&self, center: &[i64], targets: &BTreeSet<PsiValue>) -> Result<BTreeMap<PsiValue, Vec<i64>>> {
        if targets.is_empty() {
            return Ok(BTreeMap::new());
        }
        match &self.mode {
            Mode::Scan { members } => self.scan(members, center, targets),
            Mode::Solve { prefixes } => self.solve(prefixes, center, targets),
        }
    }

    fn scan(&self, members: &[Vec<i64>], center: &[i64], targets: &BTreeSet<PsiValue>) -> Result<BTreeMap<PsiValue, Vec<i64>>> {
        let mut order: Vec<&Vec<i64>> = members.iter().collect();
        order.sort_by_cached_key(|e| key(e, center));
        let mut hits = BTreeMap::new();
        for e in order {
            if hits.len() == targets.len() {
                break;
            }
            let v = eval_psi_i64(self.psi, &sub(e, center))?;
            if targets.contains(&v) && !hits.contains_key(&v) {
                hits.insert(v, e.clone());
            }
        }
        Ok(hits)
    }

    fn solve(&self, prefixes: &[Vec<i64>], center: &[i64], targets: &BTreeSet<PsiValue>) -> Result<BTreeMap<PsiValue, Vec<i64>>> {
        let ints: Vec<(&PsiValue, &BigInt)> = targets
            .iter()
            .filter_map(|t| match t {
                PsiValue::Int(y) => Some((t, y)),
                _ => None,
            })
            .collect();
        let n = center.len();
        let last = n - 1;
        let best = prefixes
            .par_iter()
            .map(|p| -> Result<BTreeMap<PsiValue, (i64, Vec<i64>)>> {
                let mut local: BTreeMap<PsiValue, (i64, Vec<i64>)> = BTreeMap::new();
                let xp = sub(p, &center[..last]);
                let small = small_coefficients(self.psi, &xp);
                let big = match small {
                    Some(_) => None,
                    None => Some(self.coefficients(&xp)?),
                };
                let (lo, hi) = (self.window.lo[last] - center[last], self.window.hi[last] - center[last]);
                for (target, y) in &ints {
                    let fast = small.and_then(|(a2, b2, c)| {
                        let y = y.to_i128()?;
                        integer_solutions_i128(a2, b2, c.checked_sub(y)?, lo, hi)
                    });
                    let roots = match fast {
                        Some(r) => r,
                        None => {
                            let (a2, b2, c) = match &big {
                                Some(b) => b.clone(),
                                None => {
                                    let (a2, b2, c) = small.expect("small or big");
                                    (BigInt::from(a2), BigInt::from(b2), BigInt::from(c))
                                }
                            };
                            integer_solutions(&a2, &b2, &(&c - *y), lo, hi)
                        }
                    };
                    for t in roots {
                        let mut e = p.clone();
                        e.push(t + center[last]);
                        if !self.source.contains(&e)? {
                            continue;
                        }
                        let k = key(&e, center);
                        match local.get(*target) {
                            Some(old) if *old <= k => {}
                            _ => {
                                local.insert((*target).clone(), k);
                            }
                        }
                    }
                }
                Ok(local)
            })
            .try_reduce(BTreeMap::new, |mut acc, other| {
                for (t, k) in other {
                    match acc.get(&t) {
                        Some(old) if *old <= k => {}
                        _ => {
                            acc.insert(t, k);
                        }
                    }
                }
                Ok(acc)
            })?;
        Ok(best.into_iter().map(|(t, (_, e))| (t, e)).collect())
    }
}

impl WitnessFinder<'_> {
    /// `(2A, 2B, C)` with `Psi(x, t) = A t^2 + B t + C`, by interpolation.
    fn coefficients(&self, prefix: &[i64]) -> Result<(BigInt, BigInt, BigInt)> {
        let mut x = prefix.to_vec();
        x.push(0);
        let mut at = |t: i64| -> Result<BigInt> {
            *x.last_mut().expect("nonempty") = t;
            match eval_psi_i64(self.psi, &x)? {
                PsiValue::Int(v) => Ok(v),
                _ => unreachable!("integer-valued map"),
            }
        };
        let (f0, f1, fm1, f2) = (at(0)?, at(1)?, at(-1)?, at(2)?);
        let b2 = &f1 - &fm1;
        let a2 = &f1 + &fm1 - &f0 * 2;
        debug_assert_eq!(&f2 * 2, &a2 * 4 + &b2 * 2 + &f0 * 2, "quadratic in the last coordinate");
        Ok((a2, b2, f0))
    }
}

/// Closed forms of the coefficients for the common maps, when they fit.
fn small_coefficients(psi: &InvariantMap, prefix: &[i64]) -> Option<(i128, i128, i128)> {
    match psi {
        InvariantMap::QuadraticForm { mu, lambda } => {
            let coeffs: Vec<i128> =
                mu.iter().map(|&c| c as i128).chain(lambda.iter().map(|&c| -(c as i128))).collect();
            let mut c = 0i128;
            for (k, x) in coeffs.iter().zip(prefix) {
                c = c.checked_add(k.checked_mul((*x as i128).checked_mul(*x as i128)?)?)?;
            }
            Some((2 * coeffs[coeffs.len() - 1], 0, c))
        }
        // [[x, z], [z, y]]: xy - z^2
        InvariantMap::Determinant { d: 2 } => Some((-2, 0, (prefix[0] as i128).checked_mul(prefix[1] as i128)?)),
        _ => None,
    }
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// As [`integer_solutions`] on machine integers; `None` on overflow or when
/// every `t` is a solution.
fn integer_solutions_i128(a2: i128, b2: i128, c: i128, lo: i64, hi: i64) -> Option<Vec<i64>> {
    let in_range = |t: i128| i64::try_from(t).ok().filter(|t| (lo..=hi).contains(t));
    if a2 == 0 {
        if b2 == 0 {
            return (c != 0).then(Vec::new);
        }
        let num = c.checked_mul(-2)?;
        return Some(if num % b2 == 0 { in_range(num / b2).into_iter().collect() } else { vec![] });
    }
    if c.unsigned_abs() > 1 << 100 || b2.unsigned_abs() > 1 << 50 || a2.unsigned_abs() > 1 << 20 {
        return None;
    }
    let disc = b2 * b2 - 8 * a2 * c;
    let Some(s) = isqrt_exact(disc) else { return Some(vec![]) };
    let den = 2 * a2;
    let mut out: Vec<i64> =
        [-b2 + s, -b2 - s].into_iter().filter(|num| num % den == 0).filter_map(|num| in_range(num / den)).collect();
    out.sort_unstable();
    out.dedup();
    Some(out)
}

/// Integers `t in [lo, hi]` with `(a2/2) t^2 + (b2/2) t + c = 0`.
fn integer_solutions(a2: &BigInt, b2: &BigInt, c: &BigInt, lo: i64, hi: i64) -> Vec<i64> {
    let in_range = |t: &BigInt| t.to_i64().filter(|t| (lo..=hi).contains(t));
    if a2.is_zero() {
        if b2.is_zero() {
            return if c.is_zero() { (lo..=hi).collect() } else { vec![] };
        }
        // (b2/2) t = -c
        let num: BigInt = -c * 2;
        return if num.is_multiple_of(b2) { in_range(&(num / b2)).into_iter().collect() } else { vec![] };
    }
    // a2 t^2 + b2 t + 2c = 0
    let disc: BigInt = b2 * b2 - a2 * c * 8;
    if disc.is_negative() || !is_square(&disc) {
        return vec![];
    }
    let s = disc.sqrt();
    let den = a2 * 2;
    let mut out: Vec<i64> = [-b2 + &s, -b2 - &s]
        .iter()
        .filter(|num| num.is_multiple_of(&den))
        .filter_map(|num| in_range(&(num / &den)))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrSetSpec;

    #[test]
    fn solver_finds_quadratic_roots() {
        let i = |x: i64| BigInt::from(x);
        // t^2 - 9 = 0
        assert_eq!(integer_solutions(&i(2), &i(0), &i(-9), -10, 10), vec![-3, 3]);
        assert_eq!(integer_solutions(&i(2), &i(0), &i(-9), 0, 10), vec![3]);
        // 2t + 4 = 0 with b2 = 4
        assert_eq!(integer_solutions(&i(0), &i(4), &i(4), -10, 10), vec![-2]);
        assert!(integer_solutions(&i(2), &i(0), &i(-8), -10, 10).is_empty());
        assert_eq!(integer_solutions_i128(2, 0, -9, -10, 10), Some(vec![-3, 3]));
        assert_eq!(integer_solutions_i128(-2, 0, 16, -10, 10), Some(vec![-4, 4]));
        assert_eq!(integer_solutions_i128(0, 4, 4, -10, 10), Some(vec![-2]));
        assert_eq!(integer_solutions_i128(0, 0, 0, -10, 10), None);
    }

    #[test]
    fn solve_and_scan_agree() {
        let psi = InvariantMap::q3();
        let cube = SetSource::Bohr(BohrSetSpec::golden_cube());
        let w = Window::cube(&[0, 0, 0], 30);
        let solve = WitnessFinder::new(&psi, &cube, &w).unwrap();
        assert_eq!(solve.strategy(), "solve-last-coordinate");
        let scan = WitnessFinder { psi: &psi, source: &cube, window: w.clone(), mode: Mode::Scan { members: cube.members(&w).unwrap() } };
        let targets: BTreeSet<PsiValue> = (-40..=40).map(|n: i64| PsiValue::Int(n.into())).collect();
        for center in [vec![0, 0, 0], vec![5, -3, 8]] {
            assert_eq!(solve.hits(&center, &targets).unwrap(), scan.hits(&center, &targets).unwrap());
        }
    }
}
