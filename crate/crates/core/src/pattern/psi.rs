use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::galois::{galois_label, GaloisLabelValue};
use crate::error::{Error, Result};
use crate::matgroup::rep::{sym_from_coords, traceless_from_coords};
use crate::matgroup::{LatticeMatrix, RepresentationSpec};

/// A function on `Z^N` invariant under a representation of the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantMap {
    /// `sum mu_i x_i^2 - sum lambda_j y_j^2`
    QuadraticForm { mu: Vec<i64>, lambda: Vec<i64> },
    /// `det(tI - a)` for traceless `a` in `sl_d` coordinates.
    CharPoly { d: usize },
    /// Galois group of `det(tI - a)` over `Q`, `d <= 3`.
    GaloisLabel { d: usize },
    /// `det A` for symmetric `A` in `Sym_d` coordinates.
    Determinant { d: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiValue {
    Int(BigInt),
    /// Monic coefficients, leading first: `[1, c_1, ..., c_d]`.
    Poly(Vec<BigInt>),
    Label(GaloisLabelValue),
}

impl fmt::Display for PsiValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiValue::Int(n) => write!(f, "{n}"),
            PsiValue::Poly(c) => write!(f, "{}", format_poly(c)),
            PsiValue::Label(l) => write!(f, "{l}"),
        }
    }
}

/// `t^2 - 7` style rendering of monic coefficients.
pub fn format_poly(c: &[BigInt]) -> String {
    let d = c.len().saturating_sub(1);
    let mut out = String::new();
    for (i, ci) in c.iter().enumerate() {
        let power = d - i;
        if ci.is_zero() && i > 0 {
            continue;
        }
        let mag = if ci < &BigInt::zero() { -ci.clone() } else { ci.clone() };
        if i > 0 {
            out.push_str(if ci < &BigInt::zero() { " - " } else { " + " });
        } else if ci < &BigInt::zero() {
            out.push('-');
        }
        let show_coeff = !mag.is_one() || power == 0;
        if show_coeff {
            out.push_str(&mag.to_string());
        }
        match power {
            0 => {}
            1 => out.push('t'),
            p => out.push_str(&format!("t^{p}")),
        }
    }
    out
}

impl InvariantMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            InvariantMap::QuadraticForm { mu, lambda } => {
                if mu.iter().chain(lambda).any(|&c| c <= 0) || mu.len() + lambda.len() == 0 {
                    return Err(Error::invalid("quadratic form coefficients must be positive"));
                }
            }
            InvariantMap::CharPoly { d } | InvariantMap::Determinant { d } => {
                if *d < 2 {
                    return Err(Error::invalid("matrix size must be at least 2"));
                }
            }
            InvariantMap::GaloisLabel { d } => {
                if !(2..=3).contains(d) {
                    return Err(Error::invalid("Galois labels are only computed for d = 2, 3"));
                }
            }
        }
        Ok(())
    }

    /// `u^2 + v^2 - w^2`
    pub fn q3() -> Self {
        InvariantMap::QuadraticForm { mu: vec![1, 1], lambda: vec![1] }
    }

    pub fn domain_rank(&self) -> usize {
        match self {
            InvariantMap::QuadraticForm { mu, lambda } => mu.len() + lambda.len(),
            InvariantMap::CharPoly { d } | InvariantMap::GaloisLabel { d } => d * d - 1,
            InvariantMap::Determinant { d } => d * (d + 1) / 2,
        }
    }

    /// The representation under which this map is invariant.
    pub fn representation(&self) -> RepresentationSpec {
        match self {
            InvariantMap::QuadraticForm { mu, lambda } => {
                RepresentationSpec::FormPreserving { mu: mu.clone(), lambda: lambda.clone() }
            }
            InvariantMap::CharPoly { d } | InvariantMap::GaloisLabel { d } => RepresentationSpec::Adjoint { d: *d },
            InvariantMap::Determinant { d } => RepresentationSpec::SymSquare { d: *d },
        }
    }

    /// Checks that `rep` is the action this map is invariant under.
    pub fn check_compatible(&self, rep: &RepresentationSpec) -> Result<()> {
        if *rep != self.representation() {
            return Err(Error::Incompatible(format!("{self:?} is not paired with {rep:?}")));
        }
        Ok(())
    }

    /// Predicted `Psi(k a)` from `Psi(a)`.
    pub fn scale_value(&self, value: &PsiValue, k: &BigInt) -> Result<PsiValue> {
        Ok(match (self, value) {
            (InvariantMap::QuadraticForm { .. }, PsiValue::Int(x)) => PsiValue::Int(x * k * k),
            (InvariantMap::Determinant { d }, PsiValue::Int(x)) => PsiValue::Int(x * num_traits::pow(k.clone(), *d)),
            (InvariantMap::CharPoly { .. }, PsiValue::Poly(c)) => {
                PsiValue::Poly(c.iter().enumerate().map(|(i, ci)| ci * num_traits::pow(k.clone(), i)).collect())
            }
            (InvariantMap::GaloisLabel { .. }, PsiValue::Label(l)) if !k.is_zero() => PsiValue::Label(l.clone()),
            _ => return Err(Error::invalid(format!("cannot scale {value} for {self:?}"))),
        })
    }
}

/// Evaluates the invariant map exactly.
pub fn eval_psi(psi: &InvariantMap, v: &[BigInt]) -> Result<PsiValue> {
    psi.validate()?;
    if v.len() != psi.domain_rank() {
        return Err(Error::DimensionMismatch { expected: psi.domain_rank(), got: v.len() });
    }
    Ok(match psi {
        InvariantMap::QuadraticForm { mu, lambda } => {
            let mut acc = BigInt::zero();
            for (c, x) in mu.iter().zip(v) {
                acc += BigInt::from(*c) * x * x;
            }
            for (c, y) in lambda.iter().zip(&v[mu.len()..]) {
                acc -= BigInt::from(*c) * y * y;
            }
            PsiValue::Int(acc)
        }
        InvariantMap::CharPoly { d } => PsiValue::Poly(char_poly(&traceless_from_coords(*d, v)?)),
        InvariantMap::GaloisLabel { d } => {
            PsiValue::Label(galois_label(&char_poly(&traceless_from_coords(*d, v)?))?)
        }
        InvariantMap::Determinant { d } => PsiValue::Int(sym_from_coords(*d, v)?.det()),
    })
}

pub fn eval_psi_i64(psi: &InvariantMap, v: &[i64]) -> Result<PsiValue> {
    let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    eval_psi(psi, &big)
}

/// `det(tI - a)` by Faddeev-LeVerrier; every division is exact over `Z`.
pub fn char_poly(a: &LatticeMatrix) -> Vec<BigInt> {
    let n = a.dim();
    let mut coeffs = vec![BigInt::one()];
    let mut m = LatticeMatrix::zero(n);
    let id = LatticeMatrix::identity(n);
    let mut c_prev = BigInt::one();
    for k in 1..=n {
        m = a.mul(&m).add(&id.scale(&c_prev));
        let c = -(a.mul(&m).trace()) / BigInt::from(k);
        coeffs.push(c.clone());
        c_prev = c;
    }
    coeffs
}
