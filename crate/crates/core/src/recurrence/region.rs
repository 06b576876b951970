//! Finite unions of boxes on `T^M` with exact measure.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::bohr::Arc;
use crate::error::{Error, Result};
use crate::exact::{format_rational, frac, Coord, TorusPoint, DEFAULT_PRECISION};

/// `[lo, hi)` with `0 <= lo < hi <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn len(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Intersection, if nonempty.
    fn meet(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// The arc `[lo + s, hi + s)` mod 1 as one or two intervals.
    fn shifted(&self, s: &BigRational) -> Vec<Interval> {
        if self.lo.is_zero() && self.hi.is_one() {
            return vec![self.clone()];
        }
        let lo = frac(&(&self.lo + s));
        let hi = &lo + self.len();
        if hi <= BigRational::one() {
            vec![Interval { lo, hi }]
        } else {
            let one = BigRational::one();
            vec![Interval { lo: BigRational::zero(), hi: hi - &one }, Interval { lo, hi: one }]
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

/// A finite disjoint union of boxes (products of intervals) in `T^M`.
///
/// Endpoints are exact rationals. Shifts by irrational amounts are applied at
/// `DEFAULT_PRECISION` bits; `endpoint_error` bounds how far any endpoint is
/// from the value it stands for.
#[derive(Clone, Debug, Serialize)]
pub struct Region {
    dim: usize,
    boxes: Vec<Vec<Interval>>,
    endpoint_error: f64,
}

impl Region {
    pub fn full(dim: usize) -> Self {
        let unit = Interval { lo: BigRational::zero(), hi: BigRational::one() };
        Region { dim, boxes: vec![vec![unit; dim]], endpoint_error: 0.0 }
    }

    pub fn empty(dim: usize) -> Self {
        Region { dim, boxes: vec![], endpoint_error: 0.0 }
    }

    /// Product of open arcs, one per coordinate.
    pub fn from_arcs(arcs: &[Arc]) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::invalid("region needs at least one coordinate"));
        }
        let mut region = Region::full(arcs.len());
        for (m, arc) in arcs.iter().enumerate() {
            let base = Interval { lo: BigRational::zero(), hi: arc.measure() };
            let start = &arc.center - &arc.radius;
            let pieces = base.shifted(&start);
            region = region.restrict(m, &pieces);
        }
        Ok(region)
    }

    /// Box from explicit `[lo, hi)` pairs (each with `0 <= lo < hi <= 1`).
    pub fn from_box(intervals: Vec<(BigRational, BigRational)>) -> Result<Self> {
        let dim = intervals.len();
        let mut b = Vec::with_capacity(dim);
        for (lo, hi) in intervals {
            if lo < BigRational::zero() || hi > BigRational::one() || lo >= hi {
                return Err(Error::invalid(format!("bad interval [{lo}, {hi})")));
            }
            b.push(Interval { lo, hi });
        }
        Ok(Region { dim, boxes: vec![b], endpoint_error: 0.0 })
    }

    fn restrict(&self, m: usize, pieces: &[Interval]) -> Region {
        let mut boxes = Vec::new();
        for b in &self.boxes {
            for p in pieces {
                if let Some(i) = b[m].meet(p) {
                    let mut nb = b.clone();
                    nb[m] = i;
                    boxes.push(nb);
                }
            }
        }
        Region { dim: self.dim, boxes, endpoint_error: self.endpoint_error }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Vec<Interval>] {
        &self.boxes
    }

    pub fn endpoint_error(&self) -> f64 {
        self.endpoint_error
    }

    /// `R + t` mod 1; wrapping intervals are split.
    pub fn translate(&self, t: &TorusPoint) -> Result<Region> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: t.dim() });
        }
        let mut err: f64 = 0.0;
        let shifts: Vec<BigRational> = t
            .coords()
            .iter()
            .map(|c| match c {
                Coord::Exact(q) => q.clone(),
                other => {
                    let f = other.to_fixed(DEFAULT_PRECISION);
                    err = err.max(f.err());
                    f.to_rational()
                }
            })
            .collect();
        let mut boxes = Vec::new();
        for b in &self.boxes {
            let mut partial: Vec<Vec<Interval>> = vec![vec![]];
            for (iv, s) in b.iter().zip(&shifts) {
                let pieces = iv.shifted(s);
                partial = partial
                    .into_iter()
                    .flat_map(|pre| {
                        pieces.iter().map(move |p| {
                            let mut v = pre.clone();
                            v.push(p.clone());
                            v
                        })
                    })
                    .collect();
            }
            boxes.extend(partial);
        }
        Ok(Region { dim: self.dim, boxes, endpoint_error: self.endpoint_error + err })
    }

    pub fn intersect(&self, other: &Region) -> Result<Region> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let mut boxes = Vec::new();
        for a in &self.boxes {
            for b in &other.boxes {
                let meet: Option<Vec<Interval>> = a.iter().zip(b).map(|(x, y)| x.meet(y)).collect();
                if let Some(m) = meet {
                    boxes.push(m);
                }
            }
        }
        boxes.sort();
        Ok(Region { dim: self.dim, boxes, endpoint_error: self.endpoint_error.max(other.endpoint_error) })
    }

    /// Haar measure, exact on the stored endpoints.
    pub fn measure(&self) -> BigRational {
        self.boxes
            .iter()
            .map(|b| b.iter().fold(BigRational::one(), |acc, i| acc * i.len()))
            .fold(BigRational::zero(), |acc, v| acc + v)
    }

    /// Bound on `|measure() - true measure|` caused by approximated endpoints.
    pub fn measure_error(&self) -> f64 {
        2.0 * self.dim as f64 * self.boxes.len() as f64 * self.endpoint_error
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.boxes.iter().any(|b| b.iter().zip(x).all(|(i, v)| {
            let v = frac(v);
            i.lo <= v && v < i.hi
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn arc_box(lo: (i64, i64), hi: (i64, i64)) -> Region {
        Region::from_box(vec![(rat(lo.0, lo.1), rat(hi.0, hi.1))]).unwrap()
    }

    #[test]
    fn wrap_around_shift() {
        let r = arc_box((8, 10), (9, 10));
        let t = r.translate(&TorusPoint::from_rationals(&[rat(3, 10)])).unwrap();
        assert_eq!(t.boxes(), &[vec![Interval { lo: rat(1, 10), hi: rat(2, 10) }]]);
        assert_eq!(t.measure(), rat(1, 10));
        let split = r.translate(&TorusPoint::from_rationals(&[rat(15, 100)])).unwrap();
        assert_eq!(split.boxes().len(), 2);
        assert_eq!(split.measure(), rat(1, 10));
    }

    #[test]
    fn intersections() {
        let a = arc_box((0, 1), (3, 10));
        let b = arc_box((2, 10), (5, 10));
        assert_eq!(a.intersect(&b).unwrap().measure(), rat(1, 10));
        assert_eq!(a.intersect(&a).unwrap().measure(), a.measure());
        let c = arc_box((5, 10), (6, 10));
        assert_eq!(a.intersect(&c).unwrap().measure(), rat(0, 1));
    }

    #[test]
    fn centered_arc_wraps() {
        let r = Region::from_arcs(&[Arc::centered(rat(3, 20)).unwrap()]).unwrap();
        assert_eq!(r.boxes().len(), 2);
        assert_eq!(r.measure(), rat(3, 10));
        assert!(r.contains(&[rat(-1, 10)]));
        assert!(!r.contains(&[rat(3, 20)]));
    }

    #[test]
    fn irrational_shift_tracks_error() {
        let r = Region::from_arcs(&[Arc::centered(rat(3, 20)).unwrap()]).unwrap();
        let t = r.translate(&TorusPoint::new(vec![Coord::golden()])).unwrap();
        assert_eq!(t.measure(), rat(3, 10));
        assert!(t.endpoint_error() > 0.0 && t.endpoint_error() < 1e-70);
    }
}
