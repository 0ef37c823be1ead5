use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::group::{cokernel, FgAbGroup};
use super::matrix::IntMatrix;
use super::normal_form::{hermite_normal_form, hnf_rank};
use crate::error::{Error, Result};

/// Subgroup of `Z^n` with a basis in column Hermite normal form.
///
/// The basis is canonical, so two lattices are equal exactly when their basis
/// matrices are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl Lattice {
    /// Lattice spanned by the columns of `generators`.
    pub fn from_generators(generators: &IntMatrix) -> Self {
        let (h, _) = hermite_normal_form(generators);
        let rank = hnf_rank(&h);
        Self {
            ambient_rank: generators.rows(),
            basis: h.submatrix(0..h.rows(), 0..rank),
        }
    }

    pub fn from_vectors(ambient_rank: usize, vectors: &[Vec<BigInt>]) -> Self {
        Self::from_generators(&IntMatrix::from_columns(ambient_rank, vectors))
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self {
            ambient_rank,
            basis: IntMatrix::zeros(ambient_rank, 0),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Self {
            ambient_rank,
            basis: IntMatrix::identity(ambient_rank),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        self.basis.columns()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if self.ambient_rank != n {
            return Err(Error::Dimension(format!(
                "lattice lives in Z^{}, got ambient rank {}",
                self.ambient_rank, n
            )));
        }
        Ok(())
    }

    /// Coordinates of `x` in the canonical basis, if `x` lies in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
        self.check_ambient(x.len())?;
        Ok(echelon_solve(&self.basis, x))
    }

    pub fn contains(&self, x: &[BigInt]) -> Result<bool> {
        Ok(self.coordinates(x)?.is_some())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> Result<bool> {
        self.check_ambient(other.ambient_rank)?;
        for v in other.basis_vectors() {
            if !self.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_ambient(other.ambient_rank)?;
        let g = IntMatrix::hstack(&[&self.basis, &other.basis])?;
        Ok(Lattice::from_generators(&g))
    }

    pub fn intersection(&self, other: &Lattice) -> Result<Lattice> {
        self.check_ambient(other.ambient_rank)?;
        // x = B1·a = B2·b  <=>  [B1 | -B2] (a, b) = 0
        let k = kernel_basis(&IntMatrix::hstack(&[&self.basis, &-&other.basis])?);
        let a = k.basis.submatrix(0..self.rank(), 0..k.rank());
        Ok(Lattice::from_generators(&(&self.basis * &a)))
    }

    /// Image of the lattice under `m`.
    pub fn image(&self, m: &IntMatrix) -> Result<Lattice> {
        self.check_ambient(m.cols())?;
        Ok(Lattice::from_generators(&(m * &self.basis)))
    }

    /// `Z^ambient / self` in canonical form.
    pub fn quotient_group(&self) -> FgAbGroup {
        cokernel(&self.basis)
    }
}

/// `{x : M·x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> Lattice {
    let (h, u) = hermite_normal_form(m);
    let rank = hnf_rank(&h);
    let gens = u.submatrix(0..u.rows(), rank..u.cols());
    Lattice::from_generators(&gens)
}

/// Lattice spanned by the columns of `m`.
pub fn image(m: &IntMatrix) -> Lattice {
    Lattice::from_generators(m)
}

/// `{x : M·x ∈ L}`.
pub fn preimage(m: &IntMatrix, l: &Lattice) -> Result<Lattice> {
    l.check_ambient(m.rows())?;
    let n = m.cols();
    let k = kernel_basis(&IntMatrix::hstack(&[m, &-l.basis()])?);
    let x = k.basis.submatrix(0..n, 0..k.rank());
    Ok(Lattice::from_generators(&x))
}

/// `Z^ambient_rank / L`.
pub fn quotient(ambient_rank: usize, l: &Lattice) -> Result<FgAbGroup> {
    l.check_ambient(ambient_rank)?;
    Ok(l.quotient_group())
}

pub fn lattices_equal(a: &Lattice, b: &Lattice) -> bool {
    a == b
}

/// A particular integer solution of `M·x = b` plus the solution lattice of the
/// homogeneous system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<BigInt>,
    pub homogeneous: Lattice,
}

/// Integer solutions of `M·x = b`; `Ok(None)` when none exists.
pub fn solve_linear(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Solution>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows()
        )));
    }
    let (h, u) = hermite_normal_form(m);
    let rank = hnf_rank(&h);
    let pivots = h.submatrix(0..h.rows(), 0..rank);
    let Some(y) = echelon_solve(&pivots, b) else {
        return Ok(None);
    };
    let mut full = y;
    full.resize(m.cols(), BigInt::zero());
    let particular = u.mul_vec(&full);
    let homogeneous = Lattice::from_generators(&u.submatrix(0..u.rows(), rank..u.cols()));
    Ok(Some(Solution {
        particular,
        homogeneous,
    }))
}

/// Solves `E·y = b` for `E` with linearly independent columns in column
/// echelon form (pivot rows strictly increasing). Returns `None` when there is
/// no integer solution.
fn echelon_solve(e: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut residual = b.to_vec();
    let mut y = Vec::with_capacity(e.cols());
    let mut row = 0;
    for j in 0..e.cols() {
        while e.get(row, j).is_zero() {
            if !residual[row].is_zero() {
                return None;
            }
            row += 1;
        }
        let (q, r) = residual[row].div_rem(e.get(row, j));
        if !r.is_zero() {
            return None;
        }
        for (i, r) in residual.iter_mut().enumerate().skip(row) {
            *r -= e.get(i, j) * &q;
        }
        y.push(q);
        row += 1;
    }
    residual.iter().all(Zero::is_zero).then_some(y)
}
