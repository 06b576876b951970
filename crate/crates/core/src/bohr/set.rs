use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kronecker::KroneckerSystem;
use crate::error::{Error, Result};
use crate::exact::{circle_norm, frac, rat, Coord};

/// Open arc `{x : |x - center| < radius}` on the circle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    #[serde(with = "crate::exact::serde_rational")]
    pub center: BigRational,
    #[serde(with = "crate::exact::serde_rational")]
    pub radius: BigRational,
}

impl Arc {
    pub fn new(center: BigRational, radius: BigRational) -> Result<Self> {
        if radius <= BigRational::zero() || radius >= rat(1, 2) {
            return Err(Error::invalid(format!("arc radius {radius} must lie in (0, 1/2)")));
        }
        Ok(Arc { center: frac(&center), radius })
    }

    pub fn centered(radius: BigRational) -> Result<Self> {
        Arc::new(BigRational::zero(), radius)
    }

    pub fn contains_zero(&self) -> bool {
        circle_norm(&self.center) < self.radius
    }

    pub fn measure(&self) -> BigRational {
        &self.radius * BigRational::from_integer(2.into())
    }

    fn fast(&self) -> (u128, u128) {
        (to_u128(&self.center), to_u128(&self.radius))
    }
}

fn to_u128(q: &BigRational) -> u128 {
    let scaled = (frac(q) * BigRational::from_integer(BigInt::one() << 128)).floor().to_integer();
    scaled.to_u128().unwrap_or(u128::MAX)
}

fn slack_units(err: f64) -> u128 {
    // absolute error in turns -> units of 2^-128, rounded up, plus endpoint truncation
    (err * 2f64.powi(128)) as u128 + 4
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "delta", rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    /// Within the numeric error `delta` of an arc endpoint.
    Boundary(f64),
}

/// `E = tau^{-1}(U)` for a box `U` of open arcs.
#[derive(Clone, Debug)]
pub struct BohrSetSpec {
    system: KroneckerSystem,
    arcs: Vec<Arc>,
    fast_arcs: Vec<(u128, u128)>,
}

/// Lattice box `lo <= a <= hi` (inclusive, coordinatewise).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl Window {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        Ok(Window { lo, hi })
    }

    /// `[-r, r]^dim + center`.
    pub fn cube(center: &[i64], r: i64) -> Self {
        Window {
            lo: center.iter().map(|c| c - r).collect(),
            hi: center.iter().map(|c| c + r).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn size(&self) -> u128 {
        if self.is_empty() {
            return 0;
        }
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l + 1) as u128).product()
    }

    pub fn contains(&self, a: &[i64]) -> bool {
        a.len() == self.dim() && a.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (l, h))| l <= x && x <= h)
    }

    /// Points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let mut cur = if self.is_empty() || self.dim() == 0 { None } else { Some(self.lo.clone()) };
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let mut next = out.clone();
            let mut i = next.len();
            loop {
                if i == 0 {
                    cur = None;
                    break;
                }
                i -= 1;
                if next[i] < self.hi[i] {
                    next[i] += 1;
                    for j in i + 1..next.len() {
                        next[j] = self.lo[j];
                    }
                    cur = Some(next);
                    break;
                }
            }
            Some(out)
        })
    }

    /// Split along the first coordinate, for parallel scans.
    pub(crate) fn slices(&self) -> Vec<Window> {
        if self.is_empty() {
            return vec![];
        }
        (self.lo[0]..=self.hi[0])
            .map(|x| {
                let mut w = self.clone();
                w.lo[0] = x;
                w.hi[0] = x;
                w
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Enumeration {
    pub members: Vec<Vec<i64>>,
    pub boundary: Vec<(Vec<i64>, f64)>,
}

impl BohrSetSpec {
    pub fn new(system: KroneckerSystem, arcs: Vec<Arc>) -> Result<Self> {
        if arcs.len() != system.torus_dim() {
            return Err(Error::DimensionMismatch { expected: system.torus_dim(), got: arcs.len() });
        }
        let fast_arcs = arcs.iter().map(Arc::fast).collect();
        Ok(BohrSetSpec { system, arcs, fast_arcs })
    }

    /// Golden rotation with the arc `(-0.15, 0.15)`, Haar measure `3/10`.
    pub fn golden_arc() -> Self {
        BohrSetSpec::new(KroneckerSystem::golden(), vec![Arc::centered(rat(3, 20)).unwrap()]).unwrap()
    }

    /// `E_o^3` for the golden arc set `E_o`.
    pub fn golden_cube() -> Self {
        let g = BohrSetSpec::golden_arc();
        product_bohr(&[&g, &g, &g]).unwrap()
    }

    pub fn system(&self) -> &KroneckerSystem {
        &self.system
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn rank(&self) -> usize {
        self.system.rank()
    }

    pub fn contains_zero(&self) -> bool {
        self.arcs.iter().all(Arc::contains_zero)
    }

    /// Haar measure of the box.
    pub fn measure(&self) -> BigRational {
        self.arcs.iter().fold(BigRational::one(), |acc, a| acc * a.measure())
    }

    pub fn member(&self, a: &[i64]) -> Result<Membership> {
        if a.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: a.len() });
        }
        let (x, e) = self.system.fast_image(a);
        Ok(self.classify(a, &x, &e))
    }

    /// Classifies a point from its fast image; ambiguous coordinates are
    /// re-evaluated at full precision.
    pub(crate) fn classify(&self, a: &[i64], x: &[u128], err: &[f64]) -> Membership {
        let mut ambiguous = Vec::new();
        for (m, ((c, r), (xm, em))) in self.fast_arcs.iter().zip(x.iter().zip(err)).enumerate() {
            let d = xm.wrapping_sub(*c);
            let d = d.min(d.wrapping_neg());
            let s = slack_units(*em);
            if d.saturating_add(s) < *r {
                continue;
            }
            if d > r.saturating_add(s) {
                return Membership::Out;
            }
            ambiguous.push(m);
        }
        if ambiguous.is_empty() {
            return Membership::In;
        }
        let mut delta: f64 = 0.0;
        let point = self.system.image(a).expect("rank checked");
        for m in ambiguous {
            let arc = &self.arcs[m];
            match &point.coords()[m] {
                Coord::Exact(q) => {
                    if circle_norm(&(q - &arc.center)) >= arc.radius {
                        return Membership::Out;
                    }
                }
                c => {
                    let f = c.to_fixed(self.system.prec());
                    let dist = f.circle_dist(&arc.center);
                    let err = BigRational::from_float(f.err()).unwrap_or_else(BigRational::one);
                    if &dist + &err < arc.radius {
                        continue;
                    }
                    if &dist - &err > arc.radius {
                        return Membership::Out;
                    }
                    delta = delta.max(f.err());
                }
            }
        }
        if delta > 0.0 {
            Membership::Boundary(delta)
        } else {
            Membership::In
        }
    }

    /// In-points of the window in lexicographic order; boundary points are
    /// listed separately and never counted as members.
    pub fn enumerate(&self, window: &Window) -> Result<Enumeration> {
        let zero = vec![vec![0; self.rank()]];
        let parts: Vec<Enumeration> = self.sweep(window, &zero, |slice, scan| {
            let mut out = Enumeration::default();
            scan(slice, &mut |a: &[i64], m: Membership| match m {
                Membership::In => out.members.push(a.to_vec()),
                Membership::Boundary(d) => out.boundary.push((a.to_vec(), d)),
                Membership::Out => {}
            });
            out
        })?;
        let mut out = Enumeration::default();
        for p in parts {
            out.members.extend(p.members);
            out.boundary.extend(p.boundary);
        }
        Ok(out)
    }

    /// Counts `a` in the window with `a + c in E` for every shift `c`, i.e. the
    /// points of `window ∩ ⋂_c (E - c)`. Returns `(in, boundary)`; boundary
    /// points are excluded from `in`.
    pub fn count_intersection(&self, window: &Window, shifts: &[Vec<i64>]) -> Result<(u64, u64)> {
        let zero = vec![vec![0; self.rank()]];
        let shifts = if shifts.is_empty() { &zero[..] } else { shifts };
        let parts = self.sweep(window, shifts, |slice, scan| {
            let (mut inside, mut boundary) = (0u64, 0u64);
            scan(slice, &mut |_: &[i64], m: Membership| match m {
                Membership::In => inside += 1,
                Membership::Boundary(_) => boundary += 1,
                Membership::Out => {}
            });
            (inside, boundary)
        })?;
        Ok(parts.into_iter().fold((0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1)))
    }

    /// Classifies every point of the window against `⋂_c (E - c)`, slice by
    /// slice along the first coordinate, sweeping the last coordinate with
    /// incremental 128-bit updates. `per_slice` receives each slice and a
    /// scanner to run on it; results come back in slice order.
    fn sweep<T, F>(&self, window: &Window, shifts: &[Vec<i64>], per_slice: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&Window, &mut dyn FnMut(&Window, &mut dyn FnMut(&[i64], Membership))) -> T + Sync,
    {
        if window.dim() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: window.dim() });
        }
        if let Some(c) = shifts.iter().find(|c| c.len() != self.rank()) {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: c.len() });
        }
        if window.is_empty() {
            return Ok(vec![]);
        }
        let fast = self.system.fast();
        let n = self.rank();
        let last = n - 1;
        let dims = self.system.torus_dim();
        // Uniform error bound over the window: sum_i max|a_i + c_i| err_i.
        let bound = |c: &[i64]| -> Vec<f64> {
            (0..dims)
                .map(|m| {
                    (0..n)
                        .map(|i| {
                            let reach = (window.lo[i] + c[i]).unsigned_abs().max((window.hi[i] + c[i]).unsigned_abs());
                            reach as f64 * fast.errs[i][m]
                        })
                        .sum::<f64>()
                })
                .collect()
        };
        let slacks: Vec<Vec<u128>> = shifts.iter().map(|c| bound(c).into_iter().map(slack_units).collect()).collect();
        let step = &fast.cols[last];

        let scan = |slice: &Window, visit: &mut dyn FnMut(&[i64], Membership)| {
            // Iterate all but the last coordinate, then sweep the last one.
            let mut head = slice.clone();
            head.hi[last] = slice.lo[last];
            for start in head.points() {
                let mut xs: Vec<Vec<u128>> = shifts
                    .iter()
                    .map(|c| {
                        let p: Vec<i64> = start.iter().zip(c).map(|(a, b)| a + b).collect();
                        self.system.fast_image(&p).0
                    })
                    .collect();
                let mut a = start.clone();
                for t in slice.lo[last]..=slice.hi[last] {
                    a[last] = t;
                    let mut verdict = Membership::In;
                    for (j, x) in xs.iter().enumerate() {
                        let mut clear = true;
                        let mut out = false;
                        for m in 0..dims {
                            let (c, r) = self.fast_arcs[m];
                            let d = x[m].wrapping_sub(c);
                            let d = d.min(d.wrapping_neg());
                            let s = slacks[j][m];
                            if d.saturating_add(s) < r {
                                continue;
                            }
                            clear = false;
                            if d > r.saturating_add(s) {
                                out = true;
                                break;
                            }
                        }
                        if out {
                            verdict = Membership::Out;
                            break;
                        }
                        if !clear {
                            let p: Vec<i64> = a.iter().zip(&shifts[j]).map(|(u, v)| u + v).collect();
                            match self.member(&p).expect("rank checked") {
                                Membership::Out => {
                                    verdict = Membership::Out;
                                    break;
                                }
                                Membership::Boundary(d) => verdict = Membership::Boundary(d),
                                Membership::In => {}
                            }
                        }
                    }
                    visit(&a, verdict);
                    for x in xs.iter_mut() {
                        for m in 0..dims {
                            x[m] = x[m].wrapping_add(step[m]);
                        }
                    }
                }
            }
        };
        Ok(window
            .slices()
            .par_iter()
            .map(|slice| per_slice(slice, &mut |w: &Window, v: &mut dyn FnMut(&[i64], Membership)| scan(w, v)))
            .collect())
    }
}

/// Block-diagonal product of Bohr sets; the arcs are concatenated.
pub fn product_bohr(specs: &[&BohrSetSpec]) -> Result<BohrSetSpec> {
    if specs.is_empty() {
        return Err(Error::invalid("product of zero Bohr sets"));
    }
    let systems: Vec<&KroneckerSystem> = specs.iter().map(|s| &s.system).collect();
    let system = KroneckerSystem::product(&systems)?;
    let arcs = specs.iter().flat_map(|s| s.arcs.iter().cloned()).collect();
    BohrSetSpec::new(system, arcs)
}

/// A Bohr_o set `C` with `C - C ⊂ B`: every arc is recentered at 0 with half
/// the distance from 0 to the nearest endpoint of the original arc.
pub fn difference_inclusion_witness(spec: &BohrSetSpec) -> Result<BohrSetSpec> {
    if !spec.contains_zero() {
        return Err(Error::invalid("difference witness needs a Bohr set whose box contains 0"));
    }
    let arcs = spec
        .arcs
        .iter()
        .map(|a| {
            let room = &a.radius - circle_norm(&a.center);
            Arc::centered(room / BigRational::from_integer(2.into()))
        })
        .collect::<Result<Vec<_>>>()?;
    BohrSetSpec::new(spec.system.clone(), arcs)
}
