use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square integer matrix with arbitrary-precision entries, row-major.
///
/// Ordering is lexicographic on `(dim, entries)`, which gives deterministic
/// iteration over maps keyed by matrices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl LatticeMatrix {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        Ok(LatticeMatrix { dim, entries })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            entries.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        LatticeMatrix::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        LatticeMatrix { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        LatticeMatrix { dim, entries: vec![BigInt::zero(); dim * dim] }
    }

    /// `e_{ij}` with a single 1.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = LatticeMatrix::zero(dim);
        m.entries[i * dim + j] = BigInt::one();
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == LatticeMatrix::identity(self.dim)
    }

    pub fn mul(&self, other: &LatticeMatrix) -> LatticeMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        LatticeMatrix { dim: n, entries }
    }

    pub fn transpose(&self) -> LatticeMatrix {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                entries.push(self.entries[i * n + j].clone());
            }
        }
        LatticeMatrix { dim: n, entries }
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn scale(&self, k: &BigInt) -> LatticeMatrix {
        LatticeMatrix { dim: self.dim, entries: self.entries.iter().map(|x| x * k).collect() }
    }

    pub fn add(&self, other: &LatticeMatrix) -> LatticeMatrix {
        assert_eq!(self.dim, other.dim);
        LatticeMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim);
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.apply(&v)
    }

    pub fn apply_rational(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.dim);
        self.entries
            .chunks(self.dim)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .map(|(a, b)| b * BigRational::from_integer(a.clone()))
                    .fold(BigRational::zero(), |acc, x| acc + x)
            })
            .collect()
    }

    /// Fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        let n = self.dim;
        let mut m: Vec<BigInt> = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n.saturating_sub(1) {
            if m[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !m[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    m.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v.div_floor(&prev);
                }
            }
            prev = m[k * n + k].clone();
        }
        sign * &m[n * n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exact inverse over the integers; fails unless `det = ±1`.
    pub fn inverse(&self) -> Result<LatticeMatrix> {
        if !self.is_unimodular() {
            return Err(Error::NotInvertible);
        }
        let n = self.dim;
        let mut a: Vec<BigRational> = self
            .entries
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let mut inv: Vec<BigRational> = LatticeMatrix::identity(n)
            .entries
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or(Error::NotInvertible)?;
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] = &a[col * n + j] / &p;
                inv[col * n + j] = &inv[col * n + j] / &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let da = &f * &a[col * n + j];
                    let di = &f * &inv[col * n + j];
                    a[r * n + j] -= da;
                    inv[r * n + j] -= di;
                }
            }
        }
        let entries = inv
            .into_iter()
            .map(|q| if q.is_integer() { Ok(q.to_integer()) } else { Err(Error::NotInvertible) })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticeMatrix { dim: n, entries })
    }

    /// Entries reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: &BigInt) -> LatticeMatrix {
        LatticeMatrix { dim: self.dim, entries: self.entries.iter().map(|x| x.mod_floor(m)).collect() }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for LatticeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}
