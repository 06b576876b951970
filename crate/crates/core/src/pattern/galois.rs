//! Galois groups of monic integer polynomials of degree 2 and 3.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "snake_case")]
pub enum GaloisLabelValue {
    /// Degrees of the irreducible factors, largest first.
    Reducible { pattern: Vec<usize> },
    C2,
    C3,
    S3,
}

impl GaloisLabelValue {
    /// The Galois group of the splitting field: `1` for a split polynomial.
    pub fn group(&self) -> &'static str {
        match self {
            GaloisLabelValue::Reducible { pattern } if pattern.iter().all(|&d| d == 1) => "1",
            GaloisLabelValue::Reducible { .. } | GaloisLabelValue::C2 => "C2",
            GaloisLabelValue::C3 => "C3",
            GaloisLabelValue::S3 => "S3",
        }
    }

    pub fn is_reducible(&self) -> bool {
        matches!(self, GaloisLabelValue::Reducible { .. })
    }
}

impl fmt::Display for GaloisLabelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaloisLabelValue::Reducible { pattern } => {
                let parts: Vec<String> = pattern.iter().map(usize::to_string).collect();
                write!(f, "reducible({})", parts.join("+"))
            }
            GaloisLabelValue::C2 => write!(f, "C2"),
            GaloisLabelValue::C3 => write!(f, "C3"),
            GaloisLabelValue::S3 => write!(f, "S3"),
        }
    }
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

fn eval(c: &[BigInt], t: &BigInt) -> BigInt {
    c.iter().fold(BigInt::zero(), |acc, ci| acc * t + ci)
}

/// An integer root of a monic polynomial that is monotone on `[lo, hi]`.
fn monotone_root(c: &[BigInt], lo: &BigInt, hi: &BigInt) -> Option<BigInt> {
    if lo > hi {
        return None;
    }
    let (mut l, mut h) = (lo.clone(), hi.clone());
    let fl = eval(c, &l);
    if fl.is_zero() {
        return Some(l);
    }
    let rising = eval(c, &h) > fl;
    while l <= h {
        let mid = (&l + &h).div_floor(&BigInt::from(2));
        let v = eval(c, &mid);
        if v.is_zero() {
            return Some(mid);
        }
        if (v > BigInt::zero()) == rising {
            h = mid - 1;
        } else {
            l = mid + 1;
        }
    }
    None
}

/// Some integer root of the monic cubic `t^3 + a t^2 + b t + c`, if any.
fn cubic_integer_root(c: &[BigInt]) -> Option<BigInt> {
    let (a, b) = (&c[1], &c[2]);
    // Cauchy bound on the roots.
    let bound = c.iter().skip(1).map(|x| x.abs()).max().unwrap_or_default() + 1;
    let three = BigInt::from(3);
    // f' = 3t^2 + 2at + b has roots (-a ± sqrt(a^2 - 3b)) / 3.
    let disc = a * a - &three * b;
    if disc.is_negative() {
        return monotone_root(c, &-&bound, &bound);
    }
    let s: BigInt = disc.sqrt();
    let one = BigInt::one();
    let lo1 = (-a - &s - &one).div_floor(&three);
    let hi1 = (-a - &s).div_ceil(&three);
    let lo2 = (-a + &s).div_floor(&three);
    let hi2 = (-a + &s + &one).div_ceil(&three);
    // Critical points lie in [lo1, hi1] and [lo2, hi2]; check those integers
    // directly and bisect the monotone stretches in between.
    let mut near = Vec::new();
    let mut t = lo1.clone();
    while t <= hi1 {
        near.push(t.clone());
        t += 1;
    }
    let mut t = lo2.clone();
    while t <= hi2 {
        near.push(t.clone());
        t += 1;
    }
    if let Some(r) = near.into_iter().find(|t| eval(c, t).is_zero()) {
        return Some(r);
    }
    monotone_root(c, &-&bound, &(&lo1 - 1))
        .or_else(|| monotone_root(c, &(&hi1 + 1), &(&lo2 - 1)))
        .or_else(|| monotone_root(c, &(&hi2 + 1), &bound))
}

/// Discriminant of `t^3 + a t^2 + b t + c`.
pub fn cubic_discriminant(c: &[BigInt]) -> BigInt {
    let (a, b, cc) = (&c[1], &c[2], &c[3]);
    a * a * b * b - 4 * b * b * b - 4 * a * a * a * cc - 27 * cc * cc + 18 * a * b * cc
}

/// Galois label of a monic integer polynomial, given leading coefficient first.
pub fn galois_label(poly: &[BigInt]) -> Result<GaloisLabelValue> {
    if poly.first().is_none_or(|c| !c.is_one()) {
        return Err(Error::invalid("polynomial must be monic"));
    }
    match poly.len() - 1 {
        2 => {
            let disc = &poly[1] * &poly[1] - 4 * &poly[2];
            Ok(if is_square(&disc) { GaloisLabelValue::Reducible { pattern: vec![1, 1] } } else { GaloisLabelValue::C2 })
        }
        3 => match cubic_integer_root(poly) {
            Some(r) => {
                // t^3 + a t^2 + b t + c = (t - r)(t^2 + (a + r) t + (b + r(a + r)))
                let p1 = &poly[1] + &r;
                let p2 = &poly[2] + &r * &p1;
                let disc = &p1 * &p1 - 4 * &p2;
                let pattern = if is_square(&disc) { vec![1, 1, 1] } else { vec![2, 1] };
                Ok(GaloisLabelValue::Reducible { pattern })
            }
            None => Ok(if is_square(&cubic_discriminant(poly)) { GaloisLabelValue::C3 } else { GaloisLabelValue::S3 }),
        },
        d => Err(Error::invalid(format!("Galois labels only for degree 2 and 3, got {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn shipped_examples() {
        assert_eq!(galois_label(&p(&[1, 0, -1])).unwrap(), GaloisLabelValue::Reducible { pattern: vec![1, 1] });
        assert_eq!(galois_label(&p(&[1, 0, -3, 1])).unwrap(), GaloisLabelValue::C3);
        assert_eq!(galois_label(&p(&[1, 0, 0, -2])).unwrap(), GaloisLabelValue::S3);
        assert_eq!(galois_label(&p(&[1, 0, -2])).unwrap(), GaloisLabelValue::C2);
        assert_eq!(cubic_discriminant(&p(&[1, 0, -3, 1])), BigInt::from(81));
        assert_eq!(cubic_discriminant(&p(&[1, 0, 0, -2])), BigInt::from(-108));
    }

    #[test]
    fn reducible_cubics() {
        assert_eq!(galois_label(&p(&[1, 0, -1, 0])).unwrap(), GaloisLabelValue::Reducible { pattern: vec![1, 1, 1] });
        assert_eq!(galois_label(&p(&[1, 0, -2, 0])).unwrap(), GaloisLabelValue::Reducible { pattern: vec![2, 1] });
        // (t - 7)(t^2 + 1)
        assert_eq!(galois_label(&p(&[1, -7, 1, -7])).unwrap(), GaloisLabelValue::Reducible { pattern: vec![2, 1] });
        // (t - 1000)(t + 3)(t - 5)
        let c = p(&[1, -(1000 - 3 + 5), (1000 * -3) + (1000 * 5) + (-3 * 5), -(1000 * -3 * 5)]);
        assert_eq!(galois_label(&c).unwrap(), GaloisLabelValue::Reducible { pattern: vec![1, 1, 1] });
    }

    #[test]
    fn integer_root_finder_matches_brute_force() {
        for a in -6..=6 {
            for b in -6..=6 {
                for c in -12..=12 {
                    let poly = p(&[1, a, b, c]);
                    let brute = (-20i64..=20).any(|t| t * t * t + a * t * t + b * t + c == 0);
                    assert_eq!(cubic_integer_root(&poly).is_some(), brute, "{a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn bad_degree() {
        assert!(galois_label(&p(&[1, 0, 0, 0, 1])).is_err());
        assert!(galois_label(&p(&[2, 0, 1])).is_err());
    }
}
