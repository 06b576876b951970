use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::psi::{eval_psi, InvariantMap, PsiValue};
use crate::error::{Error, Result};
use crate::matgroup::{GeneratorSystem, RepresentationSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub v: Vec<BigInt>,
    pub word: String,
    pub before: PsiValue,
    pub after: PsiValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub psi: InvariantMap,
    pub representation: RepresentationSpec,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl InvarianceReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `Psi(rho(w) v) = Psi(v)` exactly on `samples` random pairs of a
/// vector with entries in `[-10, 10]` and a word of length `0..=max_len`.
pub fn psi_invariance_check(
    psi: &InvariantMap,
    gens: &GeneratorSystem,
    rep: &RepresentationSpec,
    samples: usize,
    max_len: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    psi.check_compatible(rep)?;
    if gens.dim() != rep.source_dim() {
        return Err(Error::DimensionMismatch { expected: rep.source_dim(), got: gens.dim() });
    }
    let images = rep.images(gens)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let v: Vec<BigInt> = (0..rep.dim()).map(|_| BigInt::from(rng.gen_range(-10i64..=10))).collect();
        let len = rng.gen_range(0..=max_len);
        let word = gens.random_word(len, &mut rng);
        let mut w = v.clone();
        for &g in word.iter().rev() {
            w = images[g].apply(&w);
        }
        let before = eval_psi(psi, &v)?;
        let after = eval_psi(psi, &w)?;
        if before != after {
            violations.push(Violation { v, word: gens.format_word(&word), before, after });
        }
    }
    Ok(InvarianceReport { psi: psi.clone(), representation: rep.clone(), checks: samples, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn berggren_preserves_q3() {
        let psi = InvariantMap::q3();
        let r = psi_invariance_check(&psi, &GeneratorSystem::berggren(), &psi.representation(), 50, 6, 1).unwrap();
        assert!(r.holds());
    }

    #[test]
    fn incompatible_pairing_is_rejected() {
        let psi = InvariantMap::q3();
        assert!(matches!(
            psi_invariance_check(&psi, &GeneratorSystem::sl2z(), &RepresentationSpec::Adjoint { d: 2 }, 1, 1, 0),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn char_poly_invariant_under_sl3_conjugation() {
        let psi = InvariantMap::CharPoly { d: 3 };
        let r = psi_invariance_check(&psi, &GeneratorSystem::sl_elementary(3), &psi.representation(), 30, 6, 2).unwrap();
        assert!(r.holds());
    }
}
