use std::collections::HashSet;

use serde::Serialize;

use super::generators::{GeneratorSystem, Word};
use super::lattice::LatticeMatrix;

#[derive(Clone, Debug)]
pub struct BallElement {
    pub matrix: LatticeMatrix,
    /// Shortlex-minimal word reaching `matrix`; its length is the word length.
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub cap: usize,
    /// Word length at which the cap was hit; lengths below it are complete.
    pub at_length: usize,
}

/// All distinct products of at most `radius` generators.
#[derive(Clone, Debug)]
pub struct Ball {
    pub radius: usize,
    /// Elements in shortlex order of their words; `sizes[l]` counts lengths `<= l`.
    pub elements: Vec<BallElement>,
    pub sizes: Vec<usize>,
    pub truncated: Option<Truncation>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Prefix of elements of word length at most `l`.
    pub fn within(&self, l: usize) -> &[BallElement] {
        let n = self.sizes.get(l).copied().unwrap_or(self.elements.len());
        &self.elements[..n]
    }
}

/// Breadth-first enumeration. Extending the frontier in order with generators
/// in index order yields shortlex-minimal words. Elements are deduplicated by
/// exact matrix equality, so `-I` and `I` are distinct.
pub fn ball(gens: &GeneratorSystem, radius: usize, cap: usize) -> Ball {
    let identity = LatticeMatrix::identity(gens.dim());
    let mut seen: HashSet<LatticeMatrix> = HashSet::from([identity.clone()]);
    let mut elements = vec![BallElement { matrix: identity, word: vec![] }];
    let mut sizes = vec![1];
    let mut frontier = 0..1;
    let mut truncated = None;
    'grow: for length in 1..=radius {
        let start = elements.len();
        for idx in frontier.clone() {
            for g in 0..gens.len() {
                let m = elements[idx].matrix.mul(gens.matrix(g));
                if seen.contains(&m) {
                    continue;
                }
                if elements.len() >= cap {
                    truncated = Some(Truncation { cap, at_length: length });
                    sizes.push(elements.len());
                    break 'grow;
                }
                let mut word = elements[idx].word.clone();
                word.push(g);
                seen.insert(m.clone());
                elements.push(BallElement { matrix: m, word });
            }
        }
        sizes.push(elements.len());
        frontier = start..elements.len();
        if frontier.is_empty() {
            // finite group exhausted; remaining lengths add nothing
            while sizes.len() <= radius {
                sizes.push(elements.len());
            }
            break;
        }
    }
    Ball { radius, elements, sizes, truncated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_identity() {
        let b = ball(&GeneratorSystem::sl2z(), 0, 100);
        assert_eq!(b.len(), 1);
        assert!(b.elements[0].matrix.is_identity());
    }

    #[test]
    fn sl2_radius_one_has_five() {
        assert_eq!(ball(&GeneratorSystem::sl2z(), 1, 100).len(), 5);
    }

    #[test]
    fn sizes_are_monotone_and_words_evaluate() {
        let g = GeneratorSystem::sl2z();
        let b = ball(&g, 6, 100_000);
        assert!(b.sizes.windows(2).all(|w| w[0] <= w[1]));
        for e in &b.elements {
            assert_eq!(g.evaluate(&e.word), e.matrix);
        }
        // S^2 = -I appears at length 2 and differs from I
        assert!(b.within(2).iter().any(|e| e.matrix == LatticeMatrix::identity(2).scale(&(-1).into())));
    }

    #[test]
    fn cap_reports_truncation() {
        let b = ball(&GeneratorSystem::sl2z(), 10, 20);
        assert_eq!(b.len(), 20);
        assert!(b.truncated.is_some());
    }

    #[test]
    fn finite_group_saturates() {
        let b = ball(&GeneratorSystem::trivial(2), 5, 100);
        assert_eq!(b.len(), 1);
        assert_eq!(b.sizes.len(), 6);
    }
}
