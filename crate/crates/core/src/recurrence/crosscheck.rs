use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::region::Region;
use super::search::intersection_measure;
use crate::bohr::{BohrSetSpec, Window};
use crate::error::{Error, Result};
use crate::exact::serde_rational;

/// Below this window radius the slack is widened and a warning is attached.
const MIN_RADIUS: i64 = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub n: i64,
    pub shifts: Vec<Vec<i64>>,
    pub count: u64,
    pub boundary: u64,
    pub window_size: u128,
    pub ratio: f64,
    #[serde(with = "serde_rational")]
    pub exact_measure: BigRational,
    pub measure_error: f64,
    pub slack: f64,
    /// `ratio >= exact - slack`
    pub lower_bound_holds: bool,
    /// `|ratio - exact| <= slack`
    pub within_slack: bool,
    pub warning: Option<String>,
}

impl CrosscheckReport {
    pub fn deviation(&self) -> f64 {
        (self.ratio - self.exact_measure.to_f64().unwrap_or(f64::NAN)).abs()
    }
}

/// Allowed gap between window density on `[-n, n]^N` and the limit measure.
pub fn slack(n: i64) -> f64 {
    0.02 * (10_000.0 / n as f64).max(1.0)
}

/// Density of `⋂_j (E - b_j)` on `[-n, n]^N` against `ν(⋂_j (U - tau(b_j)))`,
/// where `E = tau^{-1}(U)` is the Bohr set of `spec`.
pub fn correspondence_crosscheck(spec: &BohrSetSpec, shifts: &[Vec<i64>], n: i64) -> Result<CrosscheckReport> {
    if n <= 0 {
        return Err(Error::invalid("window radius must be positive"));
    }
    let u = Region::from_arcs(spec.arcs())?;
    let region = intersection_measure(spec.system(), &u, shifts)?;
    let window = Window::cube(&vec![0; spec.rank()], n);
    let (count, boundary) = spec.count_intersection(&window, shifts)?;
    let window_size = window.size();
    let ratio = count as f64 / window_size as f64;
    let exact = region.measure();
    let exact_f = exact.to_f64().unwrap_or(f64::NAN);
    let slack = slack(n);
    let warning = (n < MIN_RADIUS).then(|| format!("window radius {n} < {MIN_RADIUS}: slack widened to {slack:.4}"));
    Ok(CrosscheckReport {
        n,
        shifts: shifts.to_vec(),
        count,
        boundary,
        window_size,
        ratio,
        measure_error: region.measure_error(),
        lower_bound_holds: ratio >= exact_f - slack,
        within_slack: (ratio - exact_f).abs() <= slack,
        exact_measure: exact,
        slack,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::{banach_density_estimate, SetSource};

    #[test]
    fn no_shifts_is_plain_density() {
        let spec = BohrSetSpec::golden_arc();
        let r = correspondence_crosscheck(&spec, &[], 2000).unwrap();
        let d = banach_density_estimate(&SetSource::Bohr(spec.clone()), 2000, &[]).unwrap();
        assert_eq!(r.count, d.count);
        assert_eq!(r.exact_measure, spec.measure());
        let zero = correspondence_crosscheck(&spec, &[vec![0]], 2000).unwrap();
        assert_eq!(zero.count, r.count);
        assert!(r.within_slack && r.warning.is_none());
    }

    #[test]
    fn small_windows_warn() {
        let r = correspondence_crosscheck(&BohrSetSpec::golden_arc(), &[vec![1], vec![-2]], 50).unwrap();
        assert!(r.warning.is_some());
        assert!(r.slack > 0.02);
    }
}
