use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{Coord, TorusPoint, DEFAULT_PRECISION};

/// Homomorphism `tau: Z^N -> T^M` given by the images of the unit vectors.
///
/// `tau[m][i]` is coordinate `m` of `tau(e_i)`; `tau(a) = sum a_i tau(e_i) mod 1`.
#[derive(Clone, Debug)]
pub struct KroneckerSystem {
    rank: usize,
    torus_dim: usize,
    tau: Vec<Vec<Coord>>,
    prec: u32,
    fast: FastTau,
}

/// 128-bit truncations of the entries of `tau`, for scanning kernels.
/// Wrapping `u128` arithmetic is exact arithmetic mod 1 on the truncations.
#[derive(Clone, Debug)]
pub(crate) struct FastTau {
    /// `cols[i][m]`
    pub cols: Vec<Vec<u128>>,
    pub errs: Vec<Vec<f64>>,
}

impl KroneckerSystem {
    pub fn new(tau: Vec<Vec<Coord>>, prec: u32) -> Result<Self> {
        let torus_dim = tau.len();
        if torus_dim == 0 {
            return Err(Error::invalid("torus dimension must be positive"));
        }
        let rank = tau[0].len();
        if rank == 0 {
            return Err(Error::invalid("domain rank must be positive"));
        }
        if let Some(row) = tau.iter().find(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch { expected: rank, got: row.len() });
        }
        let mut cols = vec![vec![0u128; torus_dim]; rank];
        let mut errs = vec![vec![0f64; torus_dim]; rank];
        for (m, row) in tau.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                let (v, e) = c.to_fixed(prec.max(128)).top_u128();
                cols[i][m] = v;
                errs[i][m] = e;
            }
        }
        Ok(KroneckerSystem { rank, torus_dim, tau, prec, fast: FastTau { cols, errs } })
    }

    /// `tau(a) = a * alpha` with `alpha = (sqrt(5) - 1) / 2`.
    pub fn golden() -> Self {
        KroneckerSystem::new(vec![vec![Coord::golden()]], DEFAULT_PRECISION).unwrap()
    }

    /// `tau(a) = a_1 alpha + a_2 beta` with `alpha` golden and `beta = sqrt(2) - 1`.
    pub fn two_frequency() -> Self {
        KroneckerSystem::new(vec![vec![Coord::golden(), Coord::sqrt(2)]], DEFAULT_PRECISION).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn tau(&self) -> &[Vec<Coord>] {
        &self.tau
    }

    pub(crate) fn fast(&self) -> &FastTau {
        &self.fast
    }

    fn check(&self, a: &[i64]) -> Result<()> {
        if a.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, got: a.len() });
        }
        Ok(())
    }

    /// `tau(a)`, symbolic whenever the entries are.
    pub fn image(&self, a: &[i64]) -> Result<TorusPoint> {
        self.check(a)?;
        let coeffs: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        Ok(self.image_big(&coeffs))
    }

    pub fn image_big(&self, a: &[BigInt]) -> TorusPoint {
        let coords = self
            .tau
            .iter()
            .map(|row| Coord::lincomb(a, &row.iter().collect::<Vec<_>>(), self.prec))
            .collect();
        TorusPoint::new(coords)
    }

    /// `tau^t eta`, the character of `Z^N` obtained by composing the torus
    /// character with frequency `eta` with `tau`.
    pub fn dual_point(&self, eta: &[i64]) -> Result<TorusPoint> {
        if eta.len() != self.torus_dim {
            return Err(Error::DimensionMismatch { expected: self.torus_dim, got: eta.len() });
        }
        let coeffs: Vec<BigInt> = eta.iter().map(|&x| BigInt::from(x)).collect();
        let coords = (0..self.rank)
            .map(|i| {
                let col: Vec<&Coord> = self.tau.iter().map(|row| &row[i]).collect();
                Coord::lincomb(&coeffs, &col, self.prec)
            })
            .collect();
        Ok(TorusPoint::new(coords))
    }

    /// Fast `tau(a)` on 128-bit truncations, with per-coordinate error bounds.
    pub(crate) fn fast_image(&self, a: &[i64]) -> (Vec<u128>, Vec<f64>) {
        let mut x = vec![0u128; self.torus_dim];
        let mut e = vec![0f64; self.torus_dim];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let k = ai as i128 as u128;
            for m in 0..self.torus_dim {
                x[m] = x[m].wrapping_add(self.fast.cols[i][m].wrapping_mul(k));
                e[m] += ai.unsigned_abs() as f64 * self.fast.errs[i][m];
            }
        }
        (x, e)
    }

    /// Block-diagonal product system on `Z^{sum N_i} -> T^{sum M_i}`.
    pub fn product(systems: &[&KroneckerSystem]) -> Result<Self> {
        let rank: usize = systems.iter().map(|s| s.rank).sum();
        let mut tau = Vec::new();
        let mut col0 = 0;
        for s in systems {
            for row in &s.tau {
                let mut full = vec![Coord::zero(); rank];
                full[col0..col0 + s.rank].clone_from_slice(row);
                tau.push(full);
            }
            col0 += s.rank;
        }
        let prec = systems.iter().map(|s| s.prec).max().unwrap_or(DEFAULT_PRECISION);
        KroneckerSystem::new(tau, prec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_image_agrees_with_symbolic() {
        let s = KroneckerSystem::two_frequency();
        for a in [[5i64, -3], [-1000, 77], [0, 0], [123456, -654321]] {
            let exact = s.image(&a).unwrap().coords()[0].to_f64();
            let (x, e) = s.fast_image(&a);
            let fast = x[0] as f64 / 2f64.powi(128);
            let diff = (exact - fast).abs().min(1.0 - (exact - fast).abs());
            assert!(diff < 1e-12, "{a:?}");
            assert!(e[0] < 1e-25);
        }
    }

    #[test]
    fn dual_point_of_golden() {
        let s = KroneckerSystem::golden();
        assert_eq!(s.dual_point(&[1]).unwrap().coords()[0], Coord::golden());
    }
}
