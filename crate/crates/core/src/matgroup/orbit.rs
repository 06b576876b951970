use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::generators::{GeneratorSystem, Word};
use super::lattice::LatticeMatrix;
use crate::error::{Error, Result};
use crate::exact::{format_rational, frac, parse_rational, TorusPoint, DEFAULT_PRECISION};

/// Rational point of `T^N`, coordinates reduced into `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    coords: Vec<BigRational>,
}

impl RationalPoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        RationalPoint { coords: coords.iter().map(frac).collect() }
    }

    pub fn parse(items: &[impl AsRef<str>]) -> Result<Self> {
        let coords = items.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(RationalPoint::new(coords))
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn to_torus(&self) -> TorusPoint {
        TorusPoint::from_rationals(&self.coords)
    }

    pub fn from_torus(x: &TorusPoint) -> Option<Self> {
        x.exact_coords().map(RationalPoint::new)
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        RationalPoint::parse(&parts).map_err(serde::de::Error::custom)
    }
}

/// `(g^-1)^t`, the matrix of the dual action on torus coordinates.
pub fn dual_matrix(g: &LatticeMatrix) -> Result<LatticeMatrix> {
    Ok(g.inverse()?.transpose())
}

/// `g* x = (g^-1)^t x mod 1`, so that the character of the image evaluates at
/// `a` as the character of `x` evaluates at `g^-1 a`.
pub fn dual_apply(g: &LatticeMatrix, x: &TorusPoint) -> Result<TorusPoint> {
    if g.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: x.dim() });
    }
    Ok(x.apply_rows(&dual_matrix(g)?.rows(), DEFAULT_PRECISION))
}

#[derive(Clone, Debug)]
pub enum OrbitOutcome {
    Closed { points: Vec<TorusPoint>, words: Vec<Word> },
    CapHit { explored: usize },
}

/// Breadth-first exploration of the dual-action orbit of a symbolic point.
/// The word recorded for a point is the group element carrying `x` to it.
pub fn orbit_bfs(gens: &GeneratorSystem, x: &TorusPoint, cap: usize) -> Result<OrbitOutcome> {
    if !x.is_symbolic() {
        return Err(Error::Undecidable(format!(
            "orbit equality of {x} needs exact or surd coordinates"
        )));
    }
    if x.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), got: x.dim() });
    }
    let duals: Vec<Vec<Vec<BigInt>>> = gens
        .matrices()
        .iter()
        .map(|g| dual_matrix(g).map(|m| m.rows()))
        .collect::<Result<_>>()?;
    let mut index: HashMap<TorusPoint, usize> = HashMap::from([(x.clone(), 0)]);
    let mut points = vec![x.clone()];
    let mut words: Vec<Word> = vec![vec![]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (g, rows) in duals.iter().enumerate() {
            let y = points[i].apply_rows(rows, DEFAULT_PRECISION);
            if index.contains_key(&y) {
                continue;
            }
            if points.len() >= cap {
                return Ok(OrbitOutcome::CapHit { explored: points.len() });
            }
            let mut w = vec![g];
            w.extend_from_slice(&words[i]);
            index.insert(y.clone(), points.len());
            queue.push_back(points.len());
            points.push(y);
            words.push(w);
        }
    }
    Ok(OrbitOutcome::Closed { points, words })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitTable {
    pub points: Vec<RationalPoint>,
    /// `[Gamma : Gamma_chi]`, equal to the orbit size.
    pub index: usize,
    #[serde(skip)]
    pub coset_reps: Vec<Word>,
}

impl OrbitTable {
    /// Re-checks closure under every generator, post hoc.
    pub fn is_closed(&self, gens: &GeneratorSystem) -> Result<bool> {
        let set: std::collections::HashSet<&RationalPoint> = self.points.iter().collect();
        for p in &self.points {
            for g in gens.matrices() {
                let y = dual_apply(g, &p.to_torus())?;
                let y = RationalPoint::from_torus(&y).expect("rational stays rational");
                if !set.contains(&y) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Finite orbit of a rational character, whose size is the index of its
/// stabilizer. For denominator `m` the orbit lies in `(1/m)Z^N / Z^N`, so the
/// cap can only be hit when it is smaller than `m^N`.
pub fn character_stabilizer_index(
    gens: &GeneratorSystem,
    chi: &RationalPoint,
    cap: usize,
) -> Result<OrbitTable> {
    match orbit_bfs(gens, &chi.to_torus(), cap)? {
        OrbitOutcome::Closed { points, words } => {
            let points: Vec<RationalPoint> = points
                .iter()
                .map(|p| RationalPoint::from_torus(p).expect("rational stays rational"))
                .collect();
            Ok(OrbitTable { index: points.len(), points, coset_reps: words })
        }
        OrbitOutcome::CapHit { .. } => Err(Error::OrbitCapExceeded { cap }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn dual_apply_t() {
        let t = LatticeMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let x = TorusPoint::from_rationals(&[rat(1, 2), rat(0, 1)]);
        let y = dual_apply(&t, &x).unwrap();
        assert_eq!(y, TorusPoint::from_rationals(&[rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn dual_apply_identity_and_composition() {
        let g = GeneratorSystem::sl2z();
        let x = TorusPoint::from_rationals(&[rat(1, 3), rat(2, 5)]);
        assert_eq!(dual_apply(&LatticeMatrix::identity(2), &x).unwrap(), x);
        let (a, b) = (g.matrix(0), g.matrix(2));
        let lhs = dual_apply(&a.mul(b), &x).unwrap();
        let rhs = dual_apply(a, &dual_apply(b, &x).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn half_zero_orbit_has_three_points() {
        let g = GeneratorSystem::sl2z();
        let chi = RationalPoint::parse(&["1/2", "0"]).unwrap();
        let t = character_stabilizer_index(&g, &chi, 1000).unwrap();
        assert_eq!(t.index, 3);
        let mut pts: Vec<String> = t.points.iter().map(|p| p.to_string()).collect();
        pts.sort();
        assert_eq!(pts, vec!["(0, 1/2)", "(1/2, 0)", "(1/2, 1/2)"]);
        assert!(t.is_closed(&g).unwrap());
        for (p, w) in t.points.iter().zip(&t.coset_reps) {
            let y = dual_apply(&g.evaluate(w), &chi.to_torus()).unwrap();
            assert_eq!(RationalPoint::from_torus(&y).unwrap(), *p);
        }
    }

    #[test]
    fn zero_is_fixed() {
        let t = character_stabilizer_index(
            &GeneratorSystem::sl2z(),
            &RationalPoint::parse(&["0", "0"]).unwrap(),
            10,
        )
        .unwrap();
        assert_eq!(t.index, 1);
    }

    #[test]
    fn cap_is_an_error() {
        let chi = RationalPoint::parse(&["1/7", "0"]).unwrap();
        let r = character_stabilizer_index(&GeneratorSystem::sl2z(), &chi, 5);
        assert!(matches!(r, Err(Error::OrbitCapExceeded { cap: 5 })));
    }
}
