//! Cesàro averages `S_n(chi, a) = (1/n) sum_{j<=n} sum_gamma mu^{*j}(gamma) chi(gamma a)`.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::convolution::{convolve_step, ConvolutionOptions, ConvolutionState};
use super::measure::WalkMeasure;
use crate::error::{Error, Result};
use crate::exact::{lcm_of_denominators, TorusPoint};
use crate::matgroup::GeneratorSystem;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CesaroMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64, stderr: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct CesaroEstimate {
    pub n: usize,
    pub value: Complex64,
    pub mode: CesaroMode,
    /// Exact mode: Cesàro average of the pruned mass plus rounding, a rigorous
    /// bound on `|value - S_n|`. Monte Carlo mode: fixed-point phase error only.
    pub error_bound: f64,
    pub dropped_mass: f64,
}

impl CesaroEstimate {
    pub fn stderr(&self) -> f64 {
        match self.mode {
            CesaroMode::Exact => 0.0,
            CesaroMode::MonteCarlo { stderr, .. } => stderr,
        }
    }
}

/// Integer representation of a character: `x = y / modulus` coordinatewise.
/// Rational points use the lcm of their denominators; others are truncated to
/// `prec` binary digits with a per-coordinate error bound.
#[derive(Clone, Debug)]
pub(crate) struct ScaledCharacter {
    y: Vec<BigInt>,
    modulus: BigInt,
    err: Vec<f64>,
}

impl ScaledCharacter {
    pub(crate) fn new(x: &TorusPoint, prec: u32) -> Self {
        if let Some(qs) = x.exact_coords() {
            let m = lcm_of_denominators(&qs);
            let y = qs
                .iter()
                .map(|q| q.numer() * (&m / q.denom()))
                .collect();
            return ScaledCharacter { y, modulus: m, err: vec![0.0; x.dim()] };
        }
        let fixed = x.to_fixed(prec);
        ScaledCharacter {
            y: fixed.iter().map(|f| BigInt::from(f.bits().clone())).collect(),
            modulus: BigInt::one() << prec as usize,
            err: fixed.iter().map(|f| f.err()).collect(),
        }
    }

    pub(crate) fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// `<x, v>` in turns, with its error bound.
    pub(crate) fn phase(&self, v: &[BigInt]) -> (f64, f64) {
        let mut acc = BigInt::zero();
        let mut err = 0.0;
        for ((y, e), c) in self.y.iter().zip(&self.err).zip(v) {
            acc += y * c;
            err += e * c.abs().to_f64().unwrap_or(f64::INFINITY);
        }
        (turns(&acc.mod_floor(&self.modulus), &self.modulus), err)
    }

    /// `y <- rows * y mod modulus`, tracking the error.
    fn transform(&mut self, rows: &[Vec<BigInt>]) {
        let mut y = Vec::with_capacity(rows.len());
        let mut err = Vec::with_capacity(rows.len());
        for row in rows {
            let mut acc = BigInt::zero();
            let mut e = 0.0;
            for ((c, yi), ei) in row.iter().zip(&self.y).zip(&self.err) {
                if c.is_zero() {
                    continue;
                }
                acc += c * yi;
                e += c.abs().to_f64().unwrap_or(f64::INFINITY) * ei;
            }
            y.push(acc.mod_floor(&self.modulus));
            err.push(e);
        }
        self.y = y;
        self.err = err;
    }
}

fn turns(r: &BigInt, m: &BigInt) -> f64 {
    // keep 64 significant bits of the ratio
    let bits = m.bits();
    let shift = bits.saturating_sub(64) as usize;
    let num = (r >> shift).to_f64().unwrap_or(0.0);
    let den = (m >> shift).to_f64().unwrap_or(1.0);
    num / den
}

fn e(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * turns)
}

fn check_inputs(x: &TorusPoint, a: &[i64], gens: &GeneratorSystem) -> Result<()> {
    if x.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), got: x.dim() });
    }
    if a.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), got: a.len() });
    }
    Ok(())
}

/// Exact Cesàro averages for `n = 1..=n_max`.
///
/// For a rational character with denominator `m`, `chi(gamma a)` only depends
/// on `gamma mod m`, so the convolution runs on the finite quotient and
/// nothing is pruned. Otherwise atoms are integer matrices and pruned mass is
/// carried into the error bound.
pub fn exact_cesaro_series(
    x: &TorusPoint,
    a: &[i64],
    mu: &WalkMeasure,
    gens: &GeneratorSystem,
    n_max: usize,
    opts: &ConvolutionOptions,
    prec: u32,
) -> Result<Vec<CesaroEstimate>> {
    check_inputs(x, a, gens)?;
    if n_max == 0 {
        return Err(Error::invalid("averaging length must be positive"));
    }
    let chi = ScaledCharacter::new(x, prec);
    let modulus = x.exact_coords().map(|_| chi.modulus().clone());
    let a_big: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
    let mut state = ConvolutionState::initial(gens.dim(), modulus);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dropped_sum = 0.0;
    let mut rounding = 0.0;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        state = convolve_step(&state, mu, gens, opts)?;
        let mut s = Complex64::new(0.0, 0.0);
        let mut phase_err: f64 = 0.0;
        for (g, w) in &state.atoms {
            let (t, err) = chi.phase(&g.apply(&a_big));
            s += e(t) * w.to_f64().unwrap_or(0.0);
            phase_err = phase_err.max(err);
        }
        sum += s;
        let dropped = state.dropped_mass.to_f64().unwrap_or(1.0);
        dropped_sum += dropped;
        rounding += TAU * phase_err + 1e-14 * state.atoms.len() as f64;
        out.push(CesaroEstimate {
            n,
            value: sum / n as f64,
            mode: CesaroMode::Exact,
            error_bound: (dropped_sum + rounding) / n as f64,
            dropped_mass: dropped,
        });
    }
    Ok(out)
}

pub fn exact_cesaro(
    x: &TorusPoint,
    a: &[i64],
    mu: &WalkMeasure,
    gens: &GeneratorSystem,
    n: usize,
    opts: &ConvolutionOptions,
    prec: u32,
) -> Result<CesaroEstimate> {
    Ok(exact_cesaro_series(x, a, mu, gens, n, opts, prec)?
        .pop()
        .expect("series has n entries"))
}

/// Per-sample derived stream: `(seed, sample index)`.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Monte Carlo estimate: each sample draws one path `gamma_1..gamma_n` and
/// averages `chi(gamma_1 ... gamma_j a)` over `j`. The character is pushed
/// along the dual path `y_j = gamma_j^t y_{j-1}`, since
/// `<x, gamma_1 ... gamma_j a> = <gamma_j^t ... gamma_1^t x, a>`.
#[allow(clippy::too_many_arguments)]
pub fn mc_cesaro(
    x: &TorusPoint,
    a: &[i64],
    mu: &WalkMeasure,
    gens: &GeneratorSystem,
    n: usize,
    samples: usize,
    seed: u64,
    prec: u32,
) -> Result<CesaroEstimate> {
    check_inputs(x, a, gens)?;
    if samples == 0 || n == 0 {
        return Err(Error::invalid("need n >= 1 and samples >= 1"));
    }
    let chi = ScaledCharacter::new(x, prec);
    let a_big: Vec<BigInt> = a.iter().map(|&v| BigInt::from(v)).collect();
    let (weights, denom) = mu.integer_weights();
    let denom = denom
        .to_u64()
        .ok_or_else(|| Error::invalid("walk weight denominators exceed 64 bits"))?;
    let thresholds: Vec<(u64, usize)> = weights
        .iter()
        .scan(0u64, |acc, (g, w)| {
            *acc += w.to_u64().expect("weight below denominator");
            Some((*acc, *g))
        })
        .collect();
    let transposed: Vec<Vec<Vec<BigInt>>> =
        gens.matrices().iter().map(|m| m.transpose().rows()).collect();

    let per_sample: Vec<(Complex64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let mut y = chi.clone();
            let mut acc = Complex64::new(0.0, 0.0);
            let mut worst: f64 = 0.0;
            for _ in 0..n {
                let r = rng.gen_range(0..denom);
                let g = thresholds.iter().find(|(t, _)| r < *t).expect("r < denom").1;
                y.transform(&transposed[g]);
                let (t, err) = y.phase(&a_big);
                acc += e(t);
                worst = worst.max(err);
            }
            (acc / n as f64, worst)
        })
        .collect();

    let s = samples as f64;
    let mean = per_sample.iter().fold(Complex64::new(0.0, 0.0), |acc, (z, _)| acc + z) / s;
    let stderr = if samples > 1 {
        let var = per_sample.iter().map(|(z, _)| (z - mean).norm_sqr()).sum::<f64>() / (s - 1.0);
        (var / s).sqrt()
    } else {
        0.0
    };
    let phase_err = per_sample.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    Ok(CesaroEstimate {
        n,
        value: mean,
        mode: CesaroMode::MonteCarlo { samples, seed, stderr },
        error_bound: TAU * phase_err,
        dropped_mass: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, Coord, DEFAULT_PRECISION};
    use crate::matgroup::LatticeMatrix;

    fn sl2() -> (GeneratorSystem, WalkMeasure) {
        let g = GeneratorSystem::sl2z();
        let mu = WalkMeasure::uniform(&g);
        (g, mu)
    }

    #[test]
    fn trivial_character_is_one() {
        let (g, mu) = sl2();
        let x = TorusPoint::zero(2);
        let est = exact_cesaro(&x, &[1, 0], &mu, &g, 5, &Default::default(), DEFAULT_PRECISION).unwrap();
        assert!((est.value - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let mc = mc_cesaro(&x, &[1, 0], &mu, &g, 7, 50, 1, DEFAULT_PRECISION).unwrap();
        assert_eq!(mc.value, Complex64::new(1.0, 0.0));
        assert_eq!(mc.stderr(), 0.0);
    }

    #[test]
    fn character_fixed_by_support_gives_chi_a() {
        // (0, 1/2) is fixed by the dual action of T, so every term equals chi(a)
        let t = LatticeMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let g = GeneratorSystem::with_inverses("T", vec![("T", t)]).unwrap();
        let mu = WalkMeasure::uniform(&g);
        let x = TorusPoint::from_rationals(&[rat(0, 1), rat(1, 2)]);
        let est = exact_cesaro(&x, &[1, 1], &mu, &g, 4, &Default::default(), DEFAULT_PRECISION).unwrap();
        assert!((est.value - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn quotient_path_has_no_dropped_mass() {
        let (g, mu) = sl2();
        let x = TorusPoint::from_rationals(&[rat(1, 2), rat(0, 1)]);
        let est = exact_cesaro(&x, &[1, 0], &mu, &g, 30, &Default::default(), DEFAULT_PRECISION).unwrap();
        assert_eq!(est.dropped_mass, 0.0);
        assert!((est.value.re + 1.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn mc_is_reproducible() {
        let (g, mu) = sl2();
        let x = TorusPoint::new(vec![Coord::sqrt(2), Coord::sqrt(3)]);
        let a = mc_cesaro(&x, &[1, 0], &mu, &g, 20, 64, 9, DEFAULT_PRECISION).unwrap();
        let b = mc_cesaro(&x, &[1, 0], &mu, &g, 20, 64, 9, DEFAULT_PRECISION).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.stderr(), b.stderr());
    }

    #[test]
    fn lattice_path_tracks_pruned_mass() {
        let (g, mu) = sl2();
        let x = TorusPoint::new(vec![Coord::sqrt(2), Coord::zero()]);
        let opts = ConvolutionOptions { prune: rat(1, 1000), atom_cap: 100_000 };
        let est = exact_cesaro(&x, &[1, 0], &mu, &g, 8, &opts, DEFAULT_PRECISION).unwrap();
        assert!(est.dropped_mass > 0.0);
        assert!(est.value.norm() <= 1.0 + est.error_bound);
    }
}
