//! Exhaustive comparison of the computed hom lattice with the tuples in a box.

use num_bigint::BigInt;
use serde::Serialize;

use super::hom::{hom, j_index, require_common_partition, require_strict, tuple_shapes};
use super::tuple::{vector_len, HomTuple};
use crate::algebra::ElementaryAlgebra;
use crate::error::{Error, Result};

/// Largest number of tuples the oracle is willing to enumerate.
const MAX_ENUMERATION: u64 = 5_000_000;

/// The relation checked with plain matrix products at every singular point.
pub fn satisfies_relations(a: &ElementaryAlgebra, b: &ElementaryAlgebra, t: &HomTuple) -> Result<bool> {
    for i in 1..=a.n {
        let (j, jp) = j_index(b, i)?;
        let lhs = &t.betas[i + jp - 1] * a.gamma(i, jp);
        let rhs = &(b.gamma(i, jp) * &t.betas[i + j - 1]) * a.gamma(i, j);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub dimension: usize,
    pub box_size: u32,
    pub enumerated: u64,
    /// Tuples in the box satisfying the relations.
    pub relation_members: u64,
    /// Tuples in the box lying in the computed lattice.
    pub lattice_members: u64,
    /// Tuples on which the two disagree.
    pub mismatches: u64,
    /// Every basis tuple of the computed lattice satisfies the relations.
    pub basis_ok: bool,
    pub agree: bool,
}

/// Enumerates every tuple with entries in `[-box_size, box_size]`.
pub fn oracle_check(a: &ElementaryAlgebra, b: &ElementaryAlgebra, box_size: u32) -> Result<OracleReport> {
    require_common_partition(a, b)?;
    require_strict(b)?;
    let shapes = tuple_shapes(a, b, &(1..=a.n + 1).collect::<Vec<_>>());
    let dim = vector_len(&shapes);
    let side = 2 * box_size as u64 + 1;
    let total = (0..dim).try_fold(1u64, |acc, _| acc.checked_mul(side).filter(|&x| x <= MAX_ENUMERATION));
    let Some(total) = total else {
        return Err(Error::Unsupported(format!(
            "{side}^{dim} tuples exceed the enumeration limit of {MAX_ENUMERATION}"
        )));
    };
    let group = hom(a, b)?;
    let mut basis_ok = true;
    for t in group.basis() {
        basis_ok &= satisfies_relations(a, b, &t)?;
    }
    let lo = -(box_size as i64);
    let mut digits = vec![lo; dim];
    let (mut relation_members, mut lattice_members, mut mismatches) = (0, 0, 0);
    for _ in 0..total {
        let v: Vec<BigInt> = digits.iter().map(|&x| BigInt::from(x)).collect();
        let t = HomTuple::from_vector(&a.name, &b.name, &shapes, &v)?;
        let by_relation = satisfies_relations(a, b, &t)?;
        let by_lattice = group.lattice().contains(&v)?;
        relation_members += by_relation as u64;
        lattice_members += by_lattice as u64;
        mismatches += (by_relation != by_lattice) as u64;
        for d in digits.iter_mut() {
            if *d < box_size as i64 {
                *d += 1;
                break;
            }
            *d = lo;
        }
    }
    Ok(OracleReport {
        dimension: dim,
        box_size,
        enumerated: total,
        relation_members,
        lattice_members,
        mismatches,
        basis_ok,
        agree: basis_ok && mismatches == 0,
    })
}
