use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kronecker::KroneckerSystem;
use super::set::{BohrSetSpec, Membership, Window};
use crate::error::{Error, Result};

/// A subset `E ⊂ Z^N` with a finite description.
#[derive(Clone, Debug)]
pub enum SetSource {
    Bohr(BohrSetSpec),
    /// `a in E` iff `(a_i mod moduli_i)_i` is one of `residues`.
    Periodic { moduli: Vec<i64>, residues: BTreeSet<Vec<i64>> },
    Explicit { rank: usize, points: BTreeSet<Vec<i64>> },
    /// Each point of `window` is kept independently with probability `p`; the
    /// coin for a point is drawn from the stream given by its index in the window.
    Bernoulli { p: f64, seed: u64, window: Window },
    Full { rank: usize },
}

impl SetSource {
    pub fn periodic(moduli: Vec<i64>, residues: Vec<Vec<i64>>) -> Result<Self> {
        if moduli.is_empty() || moduli.iter().any(|&m| m <= 0) {
            return Err(Error::invalid("moduli must be positive"));
        }
        let mut set = BTreeSet::new();
        for r in residues {
            if r.len() != moduli.len() {
                return Err(Error::DimensionMismatch { expected: moduli.len(), got: r.len() });
            }
            set.insert(r.iter().zip(&moduli).map(|(x, m)| x.rem_euclid(*m)).collect());
        }
        Ok(SetSource::Periodic { moduli, residues: set })
    }

    /// `(m Z)^rank`.
    pub fn multiples(m: i64, rank: usize) -> Result<Self> {
        SetSource::periodic(vec![m; rank], vec![vec![0; rank]])
    }

    pub fn explicit(points: Vec<Vec<i64>>) -> Result<Self> {
        let rank = points.first().map(Vec::len).ok_or_else(|| Error::invalid("explicit set is empty"))?;
        if let Some(p) = points.iter().find(|p| p.len() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, got: p.len() });
        }
        Ok(SetSource::Explicit { rank, points: points.into_iter().collect() })
    }

    pub fn bernoulli(p: f64, seed: u64, window: Window) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("Bernoulli parameter {p} outside [0, 1]")));
        }
        Ok(SetSource::Bernoulli { p, seed, window })
    }

    pub fn rank(&self) -> usize {
        match self {
            SetSource::Bohr(s) => s.rank(),
            SetSource::Periodic { moduli, .. } => moduli.len(),
            SetSource::Explicit { rank, .. } | SetSource::Full { rank } => *rank,
            SetSource::Bernoulli { window, .. } => window.dim(),
        }
    }

    /// Density of `E` when it is known in closed form.
    pub fn limit_density(&self) -> Option<BigRational> {
        match self {
            SetSource::Bohr(s) => Some(s.measure()),
            SetSource::Periodic { moduli, residues } => {
                let period: i64 = moduli.iter().product();
                Some(BigRational::new((residues.len() as i64).into(), period.into()))
            }
            SetSource::Full { .. } => Some(BigRational::one()),
            _ => None,
        }
    }

    pub fn member(&self, a: &[i64]) -> Result<Membership> {
        if a.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: a.len() });
        }
        let yes = |b: bool| if b { Membership::In } else { Membership::Out };
        Ok(match self {
            SetSource::Bohr(s) => s.member(a)?,
            SetSource::Periodic { moduli, residues } => {
                let r: Vec<i64> = a.iter().zip(moduli).map(|(x, m)| x.rem_euclid(*m)).collect();
                yes(residues.contains(&r))
            }
            SetSource::Explicit { points, .. } => yes(points.contains(a)),
            SetSource::Bernoulli { p, seed, window } => yes(bernoulli_coin(*p, *seed, window, a)),
            SetSource::Full { .. } => Membership::In,
        })
    }

    /// Boundary points count as non-members.
    pub fn contains(&self, a: &[i64]) -> Result<bool> {
        Ok(self.member(a)? == Membership::In)
    }

    /// Members of the window in lexicographic order.
    pub fn members(&self, window: &Window) -> Result<Vec<Vec<i64>>> {
        if window.dim() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: window.dim() });
        }
        if let SetSource::Bohr(s) = self {
            return Ok(s.enumerate(window)?.members);
        }
        let mut out = Vec::new();
        for a in window.points() {
            if self.contains(&a)? {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// `(in, boundary)` counts of `window ∩ ⋂_c (E - c)`; no shifts means `E`.
    pub fn count(&self, window: &Window, shifts: &[Vec<i64>]) -> Result<(u64, u64)> {
        if window.dim() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: window.dim() });
        }
        if let SetSource::Bohr(s) = self {
            return s.count_intersection(window, shifts);
        }
        let zero = vec![vec![0; self.rank()]];
        let shifts = if shifts.is_empty() { &zero[..] } else { shifts };
        let counts: Vec<Result<u64>> = window
            .slices()
            .par_iter()
            .map(|w| {
                let mut c = 0;
                for a in w.points() {
                    let mut all = true;
                    for s in shifts {
                        let p: Vec<i64> = a.iter().zip(s).map(|(x, y)| x + y).collect();
                        if !self.contains(&p)? {
                            all = false;
                            break;
                        }
                    }
                    c += all as u64;
                }
                Ok(c)
            })
            .collect();
        let mut total = 0;
        for c in counts {
            total += c?;
        }
        Ok((total, 0))
    }
}

impl SetSource {
    /// The image of `E` under forgetting the last coordinate, when `E` splits
    /// as that image times a set of last coordinates. For Bohr sets this holds
    /// when the last generator only moves torus coordinates no other
    /// generator touches.
    pub fn project_last(&self) -> Option<SetSource> {
        let rank = self.rank();
        if rank == 0 {
            return None;
        }
        match self {
            SetSource::Bohr(spec) => {
                let tau = spec.system().tau();
                let last = rank - 1;
                let zero = |c: &crate::exact::Coord| c.as_exact().is_some_and(|q| q.is_zero());
                let mut rows = Vec::new();
                let mut arcs = Vec::new();
                for (row, arc) in tau.iter().zip(spec.arcs()) {
                    let others = row[..last].iter().all(zero);
                    if zero(&row[last]) {
                        rows.push(row[..last].to_vec());
                        arcs.push(arc.clone());
                    } else if !others {
                        return None;
                    }
                }
                if rows.is_empty() {
                    return Some(SetSource::Full { rank: last });
                }
                let system = KroneckerSystem::new(rows, spec.system().prec()).ok()?;
                Some(SetSource::Bohr(BohrSetSpec::new(system, arcs).ok()?))
            }
            SetSource::Periodic { moduli, residues } => Some(SetSource::Periodic {
                moduli: moduli[..rank - 1].to_vec(),
                residues: residues.iter().map(|r| r[..rank - 1].to_vec()).collect(),
            }),
            SetSource::Explicit { points, .. } => Some(SetSource::Explicit {
                rank: rank - 1,
                points: points.iter().map(|p| p[..rank - 1].to_vec()).collect(),
            }),
            SetSource::Full { .. } => Some(SetSource::Full { rank: rank - 1 }),
            SetSource::Bernoulli { .. } => None,
        }
    }
}

fn bernoulli_coin(p: f64, seed: u64, window: &Window, a: &[i64]) -> bool {
    if !window.contains(a) {
        return false;
    }
    let mut index: u64 = 0;
    for ((x, lo), hi) in a.iter().zip(&window.lo).zip(&window.hi) {
        index = index * (hi - lo + 1) as u64 + (x - lo) as u64;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.gen::<f64>() < p
}
