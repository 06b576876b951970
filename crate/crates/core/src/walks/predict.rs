use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{lcm_of_denominators, Rationality, TorusPoint};
use crate::matgroup::{character_stabilizer_index, GeneratorSystem, RationalPoint};

/// Predicted Cesàro limit of the random walk average.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    /// Infinite orbit: the averages tend to zero.
    Zero,
    /// Finite orbit of size `index`: the limit is the orbit average of `chi(a)`.
    OrbitAverage { value: Complex64, index: usize },
}

impl Prediction {
    pub fn value(&self) -> Complex64 {
        match self {
            Prediction::Zero => Complex64::new(0.0, 0.0),
            Prediction::OrbitAverage { value, .. } => *value,
        }
    }
}

pub const DEFAULT_ORBIT_CAP: usize = 1_000_000;

/// Zero for an irrational character; for a rational one, the average of
/// `e(<y, a>)` over the finite dual orbit of `x`.
pub fn bq_limit_predict(
    x: &TorusPoint,
    a: &[i64],
    gens: &GeneratorSystem,
    orbit_cap: usize,
) -> Result<Prediction> {
    if a.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), got: a.len() });
    }
    match x.rationality() {
        Rationality::Irrational => Ok(Prediction::Zero),
        Rationality::Unknown => Err(Error::RationalityUnknown(x.to_string())),
        Rationality::Rational => {
            let chi = RationalPoint::from_torus(x).expect("rational point");
            let table = character_stabilizer_index(gens, &chi, orbit_cap)?;
            let a_big: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
            let sum = table
                .points
                .iter()
                .map(|p| {
                    let phase = p.to_torus().pairing(&a_big, 64);
                    let t = phase.as_exact().expect("rational pairing").to_f64().unwrap_or(0.0);
                    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
                })
                .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z);
            Ok(Prediction::OrbitAverage { value: sum / table.index as f64, index: table.index })
        }
    }
}

/// Least `k` with `chi(k a) = 1` for every listed rational character and all
/// `a`: the lcm of all coordinate denominators (1 for an empty set).
pub fn choose_k(points: &[RationalPoint]) -> BigInt {
    lcm_of_denominators(points.iter().flat_map(|p| p.coords()))
}
