//! Linear representations of integer matrix groups.
//!
//! Coordinates on `sl_d` (traceless matrices): first the `d - 1` diagonal
//! differences `h_k = e_11 - e_{k+1,k+1}`, then the off-diagonal units `e_ij`
//! in row-major order. Coordinates on `Sym_d`: the diagonal entries, then the
//! upper-triangle entries row-major, each off-diagonal coordinate being the
//! entry itself.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::generators::{DiagonalForm, GeneratorSystem};
use super::lattice::LatticeMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepresentationSpec {
    Standard { n: usize },
    Adjoint { d: usize },
    SymSquare { d: usize },
    FormPreserving { mu: Vec<i64>, lambda: Vec<i64> },
}

impl RepresentationSpec {
    /// Dimension of the group's matrices this representation consumes.
    pub fn source_dim(&self) -> usize {
        match self {
            RepresentationSpec::Standard { n } => *n,
            RepresentationSpec::Adjoint { d } | RepresentationSpec::SymSquare { d } => *d,
            RepresentationSpec::FormPreserving { mu, lambda } => mu.len() + lambda.len(),
        }
    }

    /// Dimension of the target space.
    pub fn dim(&self) -> usize {
        match self {
            RepresentationSpec::Standard { n } => *n,
            RepresentationSpec::Adjoint { d } => d * d - 1,
            RepresentationSpec::SymSquare { d } => d * (d + 1) / 2,
            RepresentationSpec::FormPreserving { mu, lambda } => mu.len() + lambda.len(),
        }
    }

    pub fn image(&self, g: &LatticeMatrix) -> Result<LatticeMatrix> {
        if g.dim() != self.source_dim() {
            return Err(Error::DimensionMismatch { expected: self.source_dim(), got: g.dim() });
        }
        match self {
            RepresentationSpec::Standard { .. } => Ok(g.clone()),
            RepresentationSpec::Adjoint { .. } => adjoint_matrix(g),
            RepresentationSpec::SymSquare { .. } => symsquare_matrix(g),
            RepresentationSpec::FormPreserving { mu, lambda } => {
                let form = DiagonalForm::new(mu.clone(), lambda.clone())?;
                if check_form_preserved(g, &form)? {
                    Ok(g.clone())
                } else {
                    Err(Error::invalid(format!("{g} does not preserve the form")))
                }
            }
        }
    }

    /// Images of every generator, in generator order.
    pub fn images(&self, gens: &GeneratorSystem) -> Result<Vec<LatticeMatrix>> {
        gens.matrices().iter().map(|g| self.image(g)).collect()
    }
}

/// Coordinates of a traceless matrix.
pub fn traceless_coords(v: &LatticeMatrix) -> Result<Vec<BigInt>> {
    if !v.trace().is_zero() {
        return Err(Error::invalid("matrix is not traceless"));
    }
    let d = v.dim();
    let mut c: Vec<BigInt> = (1..d).map(|k| -v.get(k, k)).collect();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                c.push(v.get(i, j).clone());
            }
        }
    }
    Ok(c)
}

/// Inverse of [`traceless_coords`].
pub fn traceless_from_coords(d: usize, c: &[BigInt]) -> Result<LatticeMatrix> {
    if c.len() != d * d - 1 {
        return Err(Error::DimensionMismatch { expected: d * d - 1, got: c.len() });
    }
    let mut m = LatticeMatrix::zero(d);
    let diag_sum: BigInt = c[..d - 1].iter().sum();
    m.set(0, 0, diag_sum);
    for k in 1..d {
        m.set(k, k, -c[k - 1].clone());
    }
    let mut idx = d - 1;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                m.set(i, j, c[idx].clone());
                idx += 1;
            }
        }
    }
    Ok(m)
}

pub fn sym_coords(a: &LatticeMatrix) -> Result<Vec<BigInt>> {
    let d = a.dim();
    if *a != a.transpose() {
        return Err(Error::invalid("matrix is not symmetric"));
    }
    let mut c: Vec<BigInt> = (0..d).map(|i| a.get(i, i).clone()).collect();
    for i in 0..d {
        for j in i + 1..d {
            c.push(a.get(i, j).clone());
        }
    }
    Ok(c)
}

pub fn sym_from_coords(d: usize, c: &[BigInt]) -> Result<LatticeMatrix> {
    if c.len() != d * (d + 1) / 2 {
        return Err(Error::DimensionMismatch { expected: d * (d + 1) / 2, got: c.len() });
    }
    let mut m = LatticeMatrix::zero(d);
    for i in 0..d {
        m.set(i, i, c[i].clone());
    }
    let mut idx = d;
    for i in 0..d {
        for j in i + 1..d {
            m.set(i, j, c[idx].clone());
            m.set(j, i, c[idx].clone());
            idx += 1;
        }
    }
    Ok(m)
}

fn traceless_basis(d: usize) -> Vec<LatticeMatrix> {
    let mut basis = Vec::with_capacity(d * d - 1);
    for k in 1..d {
        let mut h = LatticeMatrix::unit(d, 0, 0);
        h.set(k, k, BigInt::from(-1));
        basis.push(h);
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                basis.push(LatticeMatrix::unit(d, i, j));
            }
        }
    }
    basis
}

fn sym_basis(d: usize) -> Vec<LatticeMatrix> {
    let mut basis: Vec<LatticeMatrix> = (0..d).map(|i| LatticeMatrix::unit(d, i, i)).collect();
    for i in 0..d {
        for j in i + 1..d {
            basis.push(LatticeMatrix::unit(d, i, j).add(&LatticeMatrix::unit(d, j, i)));
        }
    }
    basis
}

fn from_columns(cols: Vec<Vec<BigInt>>) -> LatticeMatrix {
    let n = cols.len();
    let mut m = LatticeMatrix::zero(n);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, x) in col.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    m
}

/// Matrix of `v -> g v g^-1` on `sl_d` coordinates.
pub fn adjoint_matrix(g: &LatticeMatrix) -> Result<LatticeMatrix> {
    let g_inv = g.inverse()?;
    let cols = traceless_basis(g.dim())
        .iter()
        .map(|b| traceless_coords(&g.mul(b).mul(&g_inv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(from_columns(cols))
}

/// Matrix of `A -> g A g^t` on `Sym_d` coordinates.
pub fn symsquare_matrix(g: &LatticeMatrix) -> Result<LatticeMatrix> {
    if !g.is_unimodular() {
        return Err(Error::NotInvertible);
    }
    let gt = g.transpose();
    let cols = sym_basis(g.dim())
        .iter()
        .map(|b| sym_coords(&g.mul(b).mul(&gt)))
        .collect::<Result<Vec<_>>>()?;
    Ok(from_columns(cols))
}

/// Whether `g^t G g = G` for the diagonal Gram matrix `G` of `form`.
pub fn check_form_preserved(g: &LatticeMatrix, form: &DiagonalForm) -> Result<bool> {
    if g.dim() != form.dim() {
        return Err(Error::DimensionMismatch { expected: form.dim(), got: g.dim() });
    }
    let gram = form.gram();
    Ok(g.transpose().mul(&gram).mul(g) == gram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(rows: [[i64; 2]; 2]) -> LatticeMatrix {
        LatticeMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn adjoint_of_t_on_h() {
        // Ad(T) h = h - 2e: first column (h, e, f) = (1, -2, 0)
        let ad = adjoint_matrix(&m2([[1, 1], [0, 1]])).unwrap();
        let col: Vec<i64> = (0..3).map(|i| i64::try_from(ad.get(i, 0)).unwrap()).collect();
        assert_eq!(col, vec![1, -2, 0]);
    }

    #[test]
    fn adjoint_identity() {
        for d in 2..=4 {
            assert!(adjoint_matrix(&LatticeMatrix::identity(d)).unwrap().is_identity());
            assert!(symsquare_matrix(&LatticeMatrix::identity(d)).unwrap().is_identity());
        }
    }

    #[test]
    fn adjoint_is_multiplicative_on_st() {
        let s = m2([[0, -1], [1, 0]]);
        let t = m2([[1, 1], [0, 1]]);
        let lhs = adjoint_matrix(&s.mul(&t)).unwrap();
        let rhs = adjoint_matrix(&s).unwrap().mul(&adjoint_matrix(&t).unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn symsquare_swaps_diagonal() {
        let g = m2([[0, 1], [-1, 0]]);
        let sq = symsquare_matrix(&g).unwrap();
        let a = vec![BigInt::from(5), BigInt::from(7), BigInt::from(0)];
        let out = sq.apply(&a);
        assert_eq!(out, vec![BigInt::from(7), BigInt::from(5), BigInt::from(0)]);
    }

    #[test]
    fn adjoint_rejects_singular() {
        assert!(adjoint_matrix(&m2([[2, 0], [0, 1]])).is_err());
    }

    #[test]
    fn form_checks() {
        let lorentz = DiagonalForm::new(vec![1, 1], vec![1]).unwrap();
        let b2 = LatticeMatrix::from_rows(&[[1, 2, 2], [2, 1, 2], [2, 2, 3]]).unwrap();
        assert!(check_form_preserved(&b2, &lorentz).unwrap());
        assert!(check_form_preserved(&LatticeMatrix::identity(3), &lorentz).unwrap());
        let hyp = DiagonalForm::new(vec![1], vec![1]).unwrap();
        assert!(!check_form_preserved(&m2([[1, 1], [0, 1]]), &hyp).unwrap());
        assert!(check_form_preserved(&b2, &hyp).is_err());
    }

    #[test]
    fn coordinate_maps_invert() {
        let a = LatticeMatrix::from_rows(&[[1, 2, 0], [3, 4, -1], [5, 6, -5]]).unwrap();
        let c = traceless_coords(&a).unwrap();
        assert_eq!(traceless_from_coords(3, &c).unwrap(), a);
        let s = LatticeMatrix::from_rows(&[[1, 2], [2, 3]]).unwrap();
        assert_eq!(sym_from_coords(2, &sym_coords(&s).unwrap()).unwrap(), s);
    }
}
