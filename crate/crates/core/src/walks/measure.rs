use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{lcm_of_denominators, parse_rational};
use crate::matgroup::{GeneratorSystem, LatticeMatrix};

/// Finitely supported probability measure on the generators of a system.
#[derive(Clone, Debug)]
pub struct WalkMeasure {
    /// `(generator index, weight)`, positive weights summing to exactly one.
    weights: Vec<(usize, BigRational)>,
}

impl WalkMeasure {
    pub fn new(gens: &GeneratorSystem, weights: Vec<(usize, BigRational)>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("walk measure needs support"));
        }
        let mut total = BigRational::zero();
        for (g, w) in &weights {
            if *g >= gens.len() {
                return Err(Error::invalid(format!("generator index {g} out of range")));
            }
            if *w <= BigRational::zero() {
                return Err(Error::invalid("walk weights must be positive"));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::invalid(format!("walk weights sum to {total}, not 1")));
        }
        // Support must be inverse-closed as a set of matrices.
        let support: Vec<&LatticeMatrix> = weights.iter().map(|(g, _)| gens.matrix(*g)).collect();
        for (g, _) in &weights {
            let inv = gens.matrix(gens.inverse_of(*g));
            if !support.contains(&inv) {
                return Err(Error::invalid(format!(
                    "support is not inverse-closed: {} lacks its inverse",
                    gens.labels()[*g]
                )));
            }
        }
        Ok(WalkMeasure { weights })
    }

    pub fn uniform(gens: &GeneratorSystem) -> Self {
        let w = BigRational::new(BigInt::one(), BigInt::from(gens.len()));
        WalkMeasure::new(gens, (0..gens.len()).map(|g| (g, w.clone())).collect())
            .expect("a generator system is inverse-closed")
    }

    /// Weights keyed by generator label, each `"p/q"`.
    pub fn from_labels(gens: &GeneratorSystem, weights: &BTreeMap<String, String>) -> Result<Self> {
        let mut ws = Vec::new();
        for (label, w) in weights {
            let g = gens
                .index_of(label)
                .ok_or_else(|| Error::invalid(format!("unknown generator label {label}")))?;
            ws.push((g, parse_rational(w)?));
        }
        WalkMeasure::new(gens, ws)
    }

    pub fn weights(&self) -> &[(usize, BigRational)] {
        &self.weights
    }

    /// Integer weights over a common denominator, for exact sampling.
    pub fn integer_weights(&self) -> (Vec<(usize, BigInt)>, BigInt) {
        let denom = lcm_of_denominators(self.weights.iter().map(|(_, w)| w));
        let ints = self
            .weights
            .iter()
            .map(|(g, w)| (*g, (w * BigRational::from_integer(denom.clone())).to_integer()))
            .collect();
        (ints, denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn uniform_sums_to_one() {
        let g = GeneratorSystem::sl2z();
        let mu = WalkMeasure::uniform(&g);
        let (ints, d) = mu.integer_weights();
        assert_eq!(d, BigInt::from(4));
        assert!(ints.iter().all(|(_, w)| *w == BigInt::one()));
    }

    #[test]
    fn rejects_bad_measures() {
        let g = GeneratorSystem::sl2z();
        assert!(WalkMeasure::new(&g, vec![(0, rat(1, 2)), (1, rat(1, 4))]).is_err());
        // T without T^-1
        assert!(WalkMeasure::new(&g, vec![(2, rat(1, 1))]).is_err());
        assert!(WalkMeasure::new(&g, vec![(2, rat(1, 2)), (3, rat(1, 2))]).is_ok());
    }
}
