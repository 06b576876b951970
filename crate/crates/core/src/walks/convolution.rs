use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::measure::WalkMeasure;
use crate::error::{Error, Result};
use crate::exact::rat;
use crate::matgroup::{GeneratorSystem, LatticeMatrix};

#[derive(Clone, Debug)]
pub struct ConvolutionOptions {
    /// Atoms lighter than this are moved into `dropped_mass`.
    pub prune: BigRational,
    pub atom_cap: usize,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        ConvolutionOptions { prune: rat(1, 1_000_000_000), atom_cap: 1_000_000 }
    }
}

/// The measure `mu^{*j}` as exact weights on matrices, plus the mass pruned so
/// far. With a modulus, matrices are reduced mod `m` and the state is the
/// push-forward of `mu^{*j}` to `GL_N(Z/mZ)`.
#[derive(Clone, Debug)]
pub struct ConvolutionState {
    pub step: usize,
    pub atoms: BTreeMap<LatticeMatrix, BigRational>,
    pub dropped_mass: BigRational,
    pub modulus: Option<BigInt>,
}

impl ConvolutionState {
    /// Point mass at the identity (`j = 0`).
    pub fn initial(dim: usize, modulus: Option<BigInt>) -> Self {
        let mut id = LatticeMatrix::identity(dim);
        if let Some(m) = &modulus {
            id = id.reduce_mod(m);
        }
        ConvolutionState {
            step: 0,
            atoms: BTreeMap::from([(id, BigRational::one())]),
            dropped_mass: BigRational::zero(),
            modulus,
        }
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().fold(self.dropped_mass.clone(), |acc, w| acc + w)
    }
}

/// One convolution step: `atom(g) * mu(s)` is credited to `g * s`, so the
/// step-`j` atoms are the left-to-right products `gamma_1 ... gamma_j`.
pub fn convolve_step(
    state: &ConvolutionState,
    mu: &WalkMeasure,
    gens: &GeneratorSystem,
    opts: &ConvolutionOptions,
) -> Result<ConvolutionState> {
    let mut next: BTreeMap<LatticeMatrix, BigRational> = BTreeMap::new();
    for (g, w) in &state.atoms {
        for (s, p) in mu.weights() {
            let mut h = g.mul(gens.matrix(*s));
            if let Some(m) = &state.modulus {
                h = h.reduce_mod(m);
            }
            *next.entry(h).or_insert_with(BigRational::zero) += w * p;
        }
    }
    let mut dropped = state.dropped_mass.clone();
    next.retain(|_, w| {
        if *w < opts.prune {
            dropped += &*w;
            false
        } else {
            true
        }
    });
    if next.len() > opts.atom_cap {
        return Err(Error::AtomCapExceeded { cap: opts.atom_cap, step: state.step + 1 });
    }
    Ok(ConvolutionState { step: state.step + 1, atoms: next, dropped_mass: dropped, modulus: state.modulus.clone() })
}
