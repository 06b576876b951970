use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::generators::GeneratorSystem;
use super::lattice::LatticeMatrix;
use super::rep::RepresentationSpec;
use crate::error::{Error, Result};

/// Reduced row-echelon basis over `Q`; the pivot of each row is its first
/// nonzero column, normalized to 1 and cleared from every other row.
#[derive(Clone, Debug, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<BigRational>) -> Vec<BigRational> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v
    }

    /// Inserts `v` if independent; returns whether it was.
    fn insert(&mut self, v: Vec<BigRational>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = BigRational::one() / &v[p];
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        self.rows.push((p, v));
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanClosure {
    pub dimension: usize,
    #[serde(skip)]
    pub basis: Vec<Vec<BigRational>>,
}

fn span_with_images(images: &[LatticeMatrix], v: Vec<BigRational>) -> Result<SpanClosure> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::invalid("span closure of the zero vector"));
    }
    let mut echelon = Echelon::default();
    let mut queue = vec![v.clone()];
    echelon.insert(v);
    while let Some(w) = queue.pop() {
        for m in images {
            let image = m.apply_rational(&w);
            if echelon.insert(image.clone()) {
                queue.push(image);
            }
        }
    }
    let basis = echelon.rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>();
    Ok(SpanClosure { dimension: basis.len(), basis })
}

/// Dimension of the smallest `rep(Gamma)`-invariant subspace containing `v`,
/// by closing under generator images with exact elimination.
pub fn span_closure(
    rep: &RepresentationSpec,
    gens: &GeneratorSystem,
    v: &[BigRational],
) -> Result<SpanClosure> {
    if v.len() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), got: v.len() });
    }
    let images = rep.images(gens)?;
    span_with_images(&images, v.to_vec())
}

#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub vector: Vec<i64>,
    pub dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityReport {
    pub representation: RepresentationSpec,
    pub group: String,
    pub full_dimension: usize,
    pub trials: Vec<Trial>,
    /// True iff every sampled vector generated the whole space.
    pub certified_on_samples: bool,
}

fn trial_vector(dim: usize, seed: u64, index: u64) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-5..=5)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Samples `trials` nonzero integer vectors and records the span-closure
/// dimension of each. A deficient trial is a finding, not an error.
pub fn irreducibility_certificate(
    rep: &RepresentationSpec,
    gens: &GeneratorSystem,
    trials: usize,
    seed: u64,
) -> Result<IrreducibilityReport> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let images = rep.images(gens)?;
    let dim = rep.dim();
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let vector = trial_vector(dim, seed, i);
            let v = vector.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
            span_with_images(&images, v).map(|s| Trial { vector, dimension: s.dimension })
        })
        .collect::<Result<Vec<_>>>()?;
    let certified = results.iter().all(|t| t.dimension == dim);
    Ok(IrreducibilityReport {
        representation: rep.clone(),
        group: gens.name().to_string(),
        full_dimension: dim,
        trials: results,
        certified_on_samples: certified,
    })
}
