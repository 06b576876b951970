//! Numbers on the circle `T = R/Z`.
//!
//! Three representations coexist:
//!
//! * [`Coord::Exact`]: a reduced fraction in `[0, 1)`.
//! * [`Coord::Surd`]: `offset + sum c_d * sqrt(d)` with rational coefficients and
//!   distinct squarefree `d > 1`. Because `1, sqrt(2), sqrt(3), sqrt(5), ...` are
//!   linearly independent over `Q`, rationality of an integer combination of
//!   surds is decided exactly: it is rational iff every surd coefficient cancels.
//! * [`Coord::Real`]: a fixed-point binary fraction with a tracked absolute error
//!   bound and a *declared* irrationality tag. Nothing about rationality is ever
//!   inferred from digits.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 256;

/// Guard bits used when materializing surds as fixed-point numbers.
const GUARD_BITS: u32 = 64;

/// Fractional part, always in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    q - q.floor()
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Circular distance from `x` to the nearest integer, exact.
pub fn circle_norm(x: &BigRational) -> BigRational {
    let f = frac(x);
    let other = BigRational::one() - &f;
    if f < other {
        f
    } else {
        other
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.15"` or `"1e-9"`,
/// exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad())?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{whole}{fraction}");
    let mut value = BigInt::parse_bytes(all.as_bytes(), 10).unwrap_or_default();
    if negative {
        value = -value;
    }
    let scale = exponent - fraction.len() as i64;
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(value * power)
    } else {
        BigRational::new(value, power)
    })
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A point of `T` stored as `bits / 2^prec` with an absolute error bound `err`
/// (in turns) against the value it stands for.
#[derive(Clone, Debug)]
pub struct Fixed {
    bits: BigUint,
    prec: u32,
    err: f64,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn inflate(err: f64) -> f64 {
    // f64 accumulation of the bound itself rounds; keep it an upper bound.
    err * (1.0 + 1e-12)
}

impl Fixed {
    pub fn zero(prec: u32) -> Self {
        Fixed { bits: BigUint::zero(), prec, err: 0.0 }
    }

    fn from_scaled(value: BigInt, prec: u32, err: f64) -> Self {
        let reduced = value.mod_floor(&pow2(prec));
        Fixed {
            bits: reduced.to_biguint().expect("mod_floor is non-negative"),
            prec,
            err,
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = frac(q) * BigRational::from_integer(pow2(prec));
        let floor = scaled.floor();
        let err = if floor == scaled { 0.0 } else { 2f64.powi(-(prec as i32)) };
        Fixed::from_scaled(floor.to_integer(), prec, err)
    }

    pub fn with_error(mut self, extra: f64) -> Self {
        self.err = inflate(self.err + extra);
        self
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn bits(&self) -> &BigUint {
        &self.bits
    }

    /// The dyadic rational actually stored.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.bits.clone()), pow2(self.prec))
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.prec.saturating_sub(64);
        let top = (&self.bits >> shift as usize).to_f64().unwrap_or(0.0);
        top / 2f64.powi((self.prec - shift) as i32)
    }

    /// Top 128 bits, for the fast scanning kernels. The returned error includes
    /// the truncation.
    pub fn top_u128(&self) -> (u128, f64) {
        let value = if self.prec >= 128 {
            &self.bits >> (self.prec - 128) as usize
        } else {
            &self.bits << (128 - self.prec) as usize
        };
        let digits = value.to_u64_digits();
        let lo = digits.first().copied().unwrap_or(0) as u128;
        let hi = digits.get(1).copied().unwrap_or(0) as u128;
        (lo | (hi << 64), inflate(self.err + 2f64.powi(-128)))
    }

    /// `sum coeffs[i] * xs[i] mod 1`, exact on the stored dyadic values.
    pub fn lincomb(coeffs: &[BigInt], xs: &[&Fixed]) -> Fixed {
        assert_eq!(coeffs.len(), xs.len());
        let prec = xs.iter().map(|x| x.prec).max().unwrap_or(DEFAULT_PRECISION);
        let mut acc = BigInt::zero();
        let mut err = 0.0;
        for (c, x) in coeffs.iter().zip(xs) {
            if c.is_zero() {
                continue;
            }
            let b = BigInt::from(x.bits.clone()) << (prec - x.prec) as usize;
            acc += c * b;
            err += c.abs().to_f64().unwrap_or(f64::INFINITY) * x.err;
        }
        Fixed::from_scaled(acc, prec, inflate(err))
    }

    pub fn add(&self, other: &Fixed) -> Fixed {
        Fixed::lincomb(&[BigInt::one(), BigInt::one()], &[self, other])
    }

    /// Distance on the circle between the stored value and `q`, exact.
    pub fn circle_dist(&self, q: &BigRational) -> BigRational {
        circle_norm(&(self.to_rational() - q))
    }
}

/// `offset + sum coeff * sqrt(d)` modulo 1; `terms` is never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surd {
    offset: BigRational,
    terms: BTreeMap<u64, BigRational>,
}

fn squarefree_split(n: u64) -> (u64, u64) {
    // n = square^2 * free
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    (square, free * rest)
}

impl Surd {
    pub fn offset(&self) -> &BigRational {
        &self.offset
    }

    pub fn terms(&self) -> &BTreeMap<u64, BigRational> {
        &self.terms
    }

    /// Materializes the value as a fixed-point number with error `< 2^-prec`
    /// beyond the final truncation.
    pub fn to_fixed(&self, prec: u32) -> Fixed {
        let wide = prec + GUARD_BITS;
        let scale = pow2(wide);
        let mut acc = (&self.offset * BigRational::from_integer(scale.clone()))
            .floor()
            .to_integer();
        let mut slack = BigRational::one();
        for (d, c) in &self.terms {
            // floor(sqrt(d) * 2^wide), error < 1 unit
            let root = (BigInt::from(*d) * &scale * &scale).sqrt();
            let num = c.numer() * root;
            acc += num.div_floor(c.denom());
            slack += c.abs() + BigRational::one();
        }
        let unit = 2f64.powi(-(wide as i32));
        let err = slack.to_f64().unwrap_or(f64::INFINITY) * unit + 2f64.powi(-(prec as i32));
        Fixed::from_scaled(acc >> GUARD_BITS as usize, prec, inflate(err))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationality {
    Rational,
    Irrational,
    Unknown,
}

#[derive(Clone, Debug)]
pub enum Coord {
    Exact(BigRational),
    Surd(Surd),
    Real { value: Fixed, irrational: bool },
}

impl PartialEq for Coord {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Coord::Exact(a), Coord::Exact(b)) => a == b,
            (Coord::Surd(a), Coord::Surd(b)) => a == b,
            (Coord::Real { value: a, .. }, Coord::Real { value: b, .. }) => {
                a.prec == b.prec && a.bits == b.bits
            }
            _ => false,
        }
    }
}

impl Eq for Coord {}

impl Hash for Coord {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Coord::Exact(q) => {
                0u8.hash(state);
                q.hash(state);
            }
            Coord::Surd(s) => {
                1u8.hash(state);
                s.hash(state);
            }
            Coord::Real { value, .. } => {
                2u8.hash(state);
                value.prec.hash(state);
                value.bits.hash(state);
            }
        }
    }
}

impl Coord {
    pub fn zero() -> Self {
        Coord::Exact(BigRational::zero())
    }

    pub fn exact(q: BigRational) -> Self {
        Coord::Exact(frac(&q))
    }

    /// `frac(sqrt(n))`; exact when `n` is a perfect square.
    pub fn sqrt(n: u64) -> Self {
        let (square, free) = squarefree_split(n);
        if free == 1 {
            return Coord::zero();
        }
        Coord::from_surd(BigRational::zero(), [(free, int(square as i64))].into())
    }

    /// `(sqrt(5) - 1) / 2`.
    pub fn golden() -> Self {
        Coord::from_surd(rat(-1, 2), [(5, rat(1, 2))].into())
    }

    fn from_surd(offset: BigRational, mut terms: BTreeMap<u64, BigRational>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        if terms.is_empty() {
            Coord::Exact(frac(&offset))
        } else {
            Coord::Surd(Surd { offset: frac(&offset), terms })
        }
    }

    /// Parses a coordinate: `"p/q"` or an integer (exact), a named constant
    /// (`golden`, `sqrt2m1`, `sqrtN`), `irr:<decimal>` (declared irrational) or
    /// a bare decimal (precision-tracked, rationality unknown).
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        match lower.as_str() {
            "golden" => return Ok(Coord::golden()),
            "sqrt2m1" => return Ok(Coord::sqrt(2)),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("sqrt") {
            let rest = rest.trim_start_matches('(').trim_end_matches(')');
            let n: u64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad surd {t:?}")))?;
            return Ok(Coord::sqrt(n));
        }
        if let Some(rest) = lower.strip_prefix("irr:") {
            let q = parse_rational(rest)?;
            return Ok(Coord::Real { value: Fixed::from_rational(&q, prec), irrational: true });
        }
        let q = parse_rational(t)?;
        if t.contains('/') || !(t.contains('.') || lower.contains('e')) {
            Ok(Coord::exact(q))
        } else {
            Ok(Coord::Real { value: Fixed::from_rational(&q, prec), irrational: false })
        }
    }

    pub fn rationality(&self) -> Rationality {
        match self {
            Coord::Exact(_) => Rationality::Rational,
            Coord::Surd(_) => Rationality::Irrational,
            Coord::Real { irrational: true, .. } => Rationality::Irrational,
            Coord::Real { irrational: false, .. } => Rationality::Unknown,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, Coord::Real { .. })
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Coord::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn to_fixed(&self, prec: u32) -> Fixed {
        match self {
            Coord::Exact(q) => Fixed::from_rational(q, prec),
            Coord::Surd(s) => s.to_fixed(prec),
            Coord::Real { value, .. } => value.clone(),
        }
    }

    /// Value in turns, rounded to `f64`.
    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(q) => q.to_f64().unwrap_or(0.0),
            other => other.to_fixed(96).to_f64(),
        }
    }

    /// `sum coeffs[i] * xs[i] mod 1`. Stays symbolic when every input with a
    /// nonzero coefficient is symbolic; otherwise falls back to fixed point.
    pub fn lincomb(coeffs: &[BigInt], xs: &[&Coord], prec: u32) -> Coord {
        assert_eq!(coeffs.len(), xs.len());
        let live: Vec<usize> = (0..xs.len()).filter(|&i| !coeffs[i].is_zero()).collect();
        if live.iter().all(|&i| xs[i].is_symbolic()) {
            let mut offset = BigRational::zero();
            let mut terms: BTreeMap<u64, BigRational> = BTreeMap::new();
            for &i in &live {
                let c = BigRational::from_integer(coeffs[i].clone());
                match xs[i] {
                    Coord::Exact(q) => offset += &c * q,
                    Coord::Surd(s) => {
                        offset += &c * &s.offset;
                        for (d, t) in &s.terms {
                            *terms.entry(*d).or_insert_with(BigRational::zero) += &c * t;
                        }
                    }
                    Coord::Real { .. } => unreachable!(),
                }
            }
            return Coord::from_surd(offset, terms);
        }
        let fixed: Vec<Fixed> = live.iter().map(|&i| xs[i].to_fixed(prec)).collect();
        let refs: Vec<&Fixed> = fixed.iter().collect();
        let cs: Vec<BigInt> = live.iter().map(|&i| coeffs[i].clone()).collect();
        // A lone declared irrational plus rationals stays irrational.
        let non_exact: Vec<usize> = live
            .iter()
            .copied()
            .filter(|&i| !matches!(xs[i], Coord::Exact(_)))
            .collect();
        let irrational = non_exact.len() == 1
            && matches!(xs[non_exact[0]], Coord::Real { irrational: true, .. });
        Coord::Real { value: Fixed::lincomb(&cs, &refs), irrational }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::Exact(q) => write!(f, "{}", format_rational(q)),
            Coord::Surd(s) => {
                if *self == Coord::golden() {
                    return write!(f, "golden");
                }
                write!(f, "{}", format_rational(&s.offset))?;
                for (d, c) in &s.terms {
                    write!(f, "+({})*sqrt{}", format_rational(c), d)?;
                }
                write!(f, " mod 1")
            }
            Coord::Real { value, irrational } => {
                let tag = if *irrational { "irr:" } else { "" };
                write!(f, "{tag}{:.17}(±{:.1e})", value.to_f64(), value.err())
            }
        }
    }
}

/// A point of `T^N`; also a character of `Z^N` via `a -> e(<x, a>)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    coords: Vec<Coord>,
}

impl TorusPoint {
    pub fn new(coords: Vec<Coord>) -> Self {
        TorusPoint { coords }
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint { coords: vec![Coord::zero(); dim] }
    }

    pub fn from_rationals(qs: &[BigRational]) -> Self {
        TorusPoint { coords: qs.iter().map(|q| Coord::exact(q.clone())).collect() }
    }

    pub fn parse(items: &[impl AsRef<str>], prec: u32) -> Result<Self> {
        let coords = items
            .iter()
            .map(|s| Coord::parse(s.as_ref(), prec))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusPoint { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    /// A character is rational iff every coordinate is rational, and
    /// irrational as soon as one coordinate is.
    pub fn rationality(&self) -> Rationality {
        let tags: Vec<Rationality> = self.coords.iter().map(Coord::rationality).collect();
        if tags.iter().all(|t| *t == Rationality::Rational) {
            Rationality::Rational
        } else if tags.contains(&Rationality::Irrational) {
            Rationality::Irrational
        } else {
            Rationality::Unknown
        }
    }

    pub fn exact_coords(&self) -> Option<Vec<BigRational>> {
        self.coords.iter().map(|c| c.as_exact().cloned()).collect()
    }

    pub fn is_symbolic(&self) -> bool {
        self.coords.iter().all(Coord::is_symbolic)
    }

    pub fn to_fixed(&self, prec: u32) -> Vec<Fixed> {
        self.coords.iter().map(|c| c.to_fixed(prec)).collect()
    }

    /// `M x mod 1` for an integer matrix given by rows.
    pub fn apply_rows(&self, rows: &[Vec<BigInt>], prec: u32) -> TorusPoint {
        let xs: Vec<&Coord> = self.coords.iter().collect();
        TorusPoint {
            coords: rows.iter().map(|row| Coord::lincomb(row, &xs, prec)).collect(),
        }
    }

    /// `<x, v> mod 1`.
    pub fn pairing(&self, v: &[BigInt], prec: u32) -> Coord {
        let xs: Vec<&Coord> = self.coords.iter().collect();
        Coord::lincomb(v, &xs, prec)
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
