use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::predict::{bq_limit_predict, Prediction};
use crate::bohr::KroneckerSystem;
use crate::error::{Error, Result};
use crate::exact::Rationality;
use crate::matgroup::GeneratorSystem;

/// `sum_eta c_eta e(<eta, x>)` on `T^M`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrigPolynomial {
    dim: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        TrigPolynomial { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        TrigPolynomial::zero(dim).with_term(vec![0; dim], c).expect("dimension matches")
    }

    pub fn with_term(mut self, eta: Vec<i64>, c: Complex64) -> Result<Self> {
        self.add_term(eta, c)?;
        Ok(self)
    }

    pub fn add_term(&mut self, eta: Vec<i64>, c: Complex64) -> Result<()> {
        if eta.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: eta.len() });
        }
        let slot = self.terms.entry(eta).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, eta: &[i64]) -> Complex64 {
        self.terms.get(eta).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Zero-frequency coefficient.
    pub fn mean(&self) -> Complex64 {
        self.coefficient(&vec![0; self.dim])
    }

    pub fn add(&self, other: &TrigPolynomial) -> Result<TrigPolynomial> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut out = self.clone();
        for (eta, c) in &other.terms {
            out.add_term(eta.clone(), *c)?;
        }
        Ok(out)
    }

    /// Drops zero coefficients.
    pub fn normalized(mut self) -> Self {
        self.terms.retain(|_, c| c.norm() != 0.0);
        self
    }
}

/// The limit operator `Q_a` on a Kronecker system, applied to `f`.
///
/// The frequency `eta` corresponds to the character `x_eta = tau^t eta` of
/// `Z^N`; its coefficient is multiplied by the predicted Cesàro limit of
/// `chi_eta(gamma a)`, so terms with an infinite dual orbit vanish.
pub fn qa_kronecker(
    f: &TrigPolynomial,
    a: &[i64],
    system: &KroneckerSystem,
    gens: &GeneratorSystem,
    orbit_cap: usize,
) -> Result<TrigPolynomial> {
    if f.dim != system.torus_dim() {
        return Err(Error::DimensionMismatch { expected: system.torus_dim(), got: f.dim });
    }
    if gens.dim() != system.rank() {
        return Err(Error::DimensionMismatch { expected: system.rank(), got: gens.dim() });
    }
    if a.iter().all(|&x| x == 0) {
        return Err(Error::invalid("Q_a needs a nonzero vector a"));
    }
    let mut out = TrigPolynomial::zero(f.dim);
    let mut unknown = Vec::new();
    for (eta, c) in &f.terms {
        let x = system.dual_point(eta)?;
        if x.rationality() == Rationality::Unknown {
            unknown.push(format!("{eta:?}"));
            continue;
        }
        match bq_limit_predict(&x, a, gens, orbit_cap)? {
            Prediction::Zero => {}
            p => out.add_term(eta.clone(), c * p.value())?,
        }
    }
    if !unknown.is_empty() {
        return Err(Error::RationalityUnknown(format!(
            "tau^t eta has undeclared rationality for eta in {}",
            unknown.join(", ")
        )));
    }
    Ok(out.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Coord, DEFAULT_PRECISION};
    use crate::matgroup::LatticeMatrix;
    use crate::walks::DEFAULT_ORBIT_CAP;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn golden_on_trivial_group() -> (KroneckerSystem, GeneratorSystem) {
        (KroneckerSystem::golden(), GeneratorSystem::trivial(1))
    }

    #[test]
    fn constants_are_fixed() {
        let (sys, gens) = golden_on_trivial_group();
        let f = TrigPolynomial::constant(1, c(2.5));
        assert_eq!(qa_kronecker(&f, &[1], &sys, &gens, DEFAULT_ORBIT_CAP).unwrap(), f);
    }

    #[test]
    fn irrational_frequency_is_killed() {
        let (sys, gens) = golden_on_trivial_group();
        let f = TrigPolynomial::zero(1).with_term(vec![1], c(1.0)).unwrap();
        let q = qa_kronecker(&f, &[1], &sys, &gens, DEFAULT_ORBIT_CAP).unwrap();
        assert!(q.terms().is_empty());
        assert_eq!(q.mean(), c(0.0));
        let g = f.add(&TrigPolynomial::constant(1, c(3.0))).unwrap();
        assert_eq!(qa_kronecker(&g, &[1], &sys, &gens, DEFAULT_ORBIT_CAP).unwrap(), TrigPolynomial::constant(1, c(3.0)));
    }

    #[test]
    fn rational_frequency_keeps_orbit_average() {
        // tau(a) = a_1 / 2 on Z^2 twisted by SL2(Z): x_eta = (1/2, 0), limit -1/3 at a = (1, 0)
        let sys = KroneckerSystem::new(vec![vec![Coord::exact(rat(1, 2)), Coord::zero()]], DEFAULT_PRECISION).unwrap();
        let f = TrigPolynomial::zero(1).with_term(vec![1], c(3.0)).unwrap();
        let q = qa_kronecker(&f, &[1, 0], &sys, &GeneratorSystem::sl2z(), DEFAULT_ORBIT_CAP).unwrap();
        assert!((q.coefficient(&[1]) - c(-1.0)).norm() < 1e-12);
    }

    #[test]
    fn unknown_rationality_lists_frequencies() {
        let sys = KroneckerSystem::new(vec![vec![Coord::parse("0.3", 128).unwrap()]], 128).unwrap();
        let f = TrigPolynomial::zero(1).with_term(vec![2], c(1.0)).unwrap();
        match qa_kronecker(&f, &[1], &sys, &GeneratorSystem::trivial(1), 10) {
            Err(Error::RationalityUnknown(msg)) => assert!(msg.contains("[2]")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_vector_rejected() {
        let (sys, _) = golden_on_trivial_group();
        let gens = GeneratorSystem::with_inverses("id", vec![("I", LatticeMatrix::identity(1))]).unwrap();
        assert!(qa_kronecker(&TrigPolynomial::constant(1, c(1.0)), &[0], &sys, &gens, 10).is_err());
    }
}
