use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::set::Window;
use super::source::SetSource;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub n: i64,
    pub best_offset: Vec<i64>,
    pub count: u64,
    /// Points within numeric error of the boundary; not counted.
    pub boundary: u64,
    /// `(2n+1)^N`
    pub window_size: u128,
    #[serde(with = "crate::exact::serde_rational")]
    pub ratio: BigRational,
    #[serde(serialize_with = "serialize_opt_rational")]
    pub limit_claim: Option<BigRational>,
}

fn serialize_opt_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => crate::exact::serde_rational::serialize(q, s),
        None => s.serialize_none(),
    }
}

/// `max_offset |E ∩ (F_n + offset)| / |F_n|` with `F_n = [-n, n]^N`. The
/// origin is used when no offsets are given; ties keep the earliest offset.
pub fn banach_density_estimate(source: &SetSource, n: i64, offsets: &[Vec<i64>]) -> Result<DensityReport> {
    if n <= 0 {
        return Err(Error::invalid(format!("window radius must be positive, got {n}")));
    }
    let rank = source.rank();
    let origin = vec![vec![0; rank]];
    let offsets = if offsets.is_empty() { &origin[..] } else { offsets };
    let mut best: Option<DensityReport> = None;
    for off in offsets {
        if off.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, got: off.len() });
        }
        let window = Window::cube(off, n);
        let (count, boundary) = source.count(&window, &[])?;
        let size = window.size();
        let ratio = BigRational::new(BigInt::from(count), BigInt::from(size));
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(DensityReport {
                n,
                best_offset: off.clone(),
                count,
                boundary,
                window_size: size,
                ratio,
                limit_claim: source.limit_density(),
            });
        }
    }
    Ok(best.expect("at least one offset"))
}

impl DensityReport {
    pub fn ratio_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.ratio.to_f64().unwrap_or(0.0)
    }

    /// `|ratio - limit_claim|`, when a limit is claimed.
    pub fn deviation(&self) -> Option<BigRational> {
        self.limit_claim.as_ref().map(|l| {
            let d = &self.ratio - l;
            if d < BigRational::zero() {
                -d
            } else {
                d
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrSetSpec;
    use crate::exact::rat;

    #[test]
    fn even_integers_ratio() {
        let e = SetSource::multiples(2, 1).unwrap();
        for n in [1, 2, 7, 100] {
            let r = banach_density_estimate(&e, n, &[]).unwrap();
            let evens = (-n..=n).filter(|x| x % 2 == 0).count() as i64;
            assert_eq!(r.ratio, BigRational::new(BigInt::from(evens), BigInt::from(2 * n + 1)));
            if n % 2 == 0 {
                assert_eq!(r.ratio, BigRational::new(BigInt::from(n + 1), BigInt::from(2 * n + 1)));
            }
        }
        assert!(banach_density_estimate(&e, 0, &[]).is_err());
    }

    #[test]
    fn full_set_has_ratio_one() {
        let r = banach_density_estimate(&SetSource::Full { rank: 2 }, 5, &[]).unwrap();
        assert_eq!(r.ratio, rat(1, 1));
        assert_eq!(r.window_size, 121);
    }

    #[test]
    fn adding_offsets_never_lowers_the_estimate() {
        let e = SetSource::Bohr(BohrSetSpec::golden_arc());
        let one = banach_density_estimate(&e, 50, &[vec![0]]).unwrap();
        let more = banach_density_estimate(&e, 50, &[vec![0], vec![17], vec![-300]]).unwrap();
        assert!(more.ratio >= one.ratio);
        assert_eq!(one.limit_claim, Some(rat(3, 10)));
    }
}
