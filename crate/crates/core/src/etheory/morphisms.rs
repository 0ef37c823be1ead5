use serde::Serialize;

use super::hom::{check_member, j_index, require_common_partition, require_strict, tuple_shapes};
use super::tuple::HomTuple;
use crate::algebra::{CombInterval, ElementaryAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{inverse_unimodular, IntMatrix};

/// The unique `(α_i)` with `β_i·G_{i,0} = G'_{i,0}·α_i` and
/// `β_{i+1}·G_{i,1} = G'_{i,1}·α_i`, namely `α_i = β_{i+j(i)}·G_{i,j(i)}`.
pub fn recover_alpha(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    t: &HomTuple,
) -> Result<Vec<IntMatrix>> {
    require_strict(b)?;
    check_member(a, b, t)?;
    let mut alphas = Vec::with_capacity(a.n);
    for i in 1..=a.n {
        let (j, _) = j_index(b, i)?;
        let alpha = &t.betas[i + j - 1] * a.gamma(i, j);
        for side in 0..2 {
            if &t.betas[i + side - 1] * a.gamma(i, side) != b.gamma(i, side) * &alpha {
                return Err(Error::Membership(format!(
                    "recovered α_{i} fails the side-{side} equation"
                )));
            }
        }
        alphas.push(alpha);
    }
    Ok(alphas)
}

/// A morphism of K0 presheaves: one matrix per combinatorial interval, in the
/// k0 coordinates of [`ElementaryAlgebra::k_groups`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafMorphismRealization {
    pub source: String,
    pub target: String,
    /// Ordered by `(p, q)`.
    pub maps: Vec<(CombInterval, IntMatrix)>,
}

impl SheafMorphismRealization {
    pub fn get(&self, i: &CombInterval) -> Option<&IntMatrix> {
        self.maps.iter().find(|(j, _)| j == i).map(|(_, m)| m)
    }

    /// The first pair `J ⊆ I` whose square `φ_J·r^I_J = r^I_J·φ_I` fails.
    pub fn failing_square(
        &self,
        a: &ElementaryAlgebra,
        b: &ElementaryAlgebra,
    ) -> Result<Option<(CombInterval, CombInterval)>> {
        for (i, phi_i) in &self.maps {
            for (j, phi_j) in &self.maps {
                if !i.contains(j) {
                    continue;
                }
                let left = phi_j * &a.restriction_map(i, j)?;
                let right = &b.restriction_map(i, j)? * phi_i;
                if left != right {
                    return Ok(Some((*i, *j)));
                }
            }
        }
        Ok(None)
    }

    /// `ν`: the values on the segments.
    pub fn nu(&self) -> Vec<IntMatrix> {
        self.maps
            .iter()
            .filter(|(i, _)| i.p == i.q)
            .map(|(_, m)| m.clone())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(|(_, m)| m.is_zero())
    }
}

/// `Γ(t)`: on a segment, `β_k`; on an interval with singular points,
/// `(d_i) ↦ (α_i d_i)` restricted to the k0 lattices.
pub fn gamma_realize(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    t: &HomTuple,
) -> Result<SheafMorphismRealization> {
    let alphas = recover_alpha(a, b, t)?;
    let mut maps = Vec::new();
    for i in a.intervals() {
        if i.p == i.q {
            maps.push((i, t.betas[i.p - 1].clone()));
            continue;
        }
        let ka = a.k_groups(&i)?;
        let kb = b.k_groups(&i)?;
        let blocks: Vec<&IntMatrix> = i.singular_points().map(|s| &alphas[s - 1]).collect();
        let pushed = &IntMatrix::block_diag(&blocks) * ka.k0.basis();
        let mut cols = Vec::with_capacity(pushed.cols());
        for c in pushed.columns() {
            cols.push(kb.k0.coordinates(&c)?.ok_or_else(|| {
                Error::Membership(format!("image of a K0 class of {i} leaves K0 of the target"))
            })?);
        }
        maps.push((i, IntMatrix::from_columns(kb.k0.rank(), &cols)));
    }
    Ok(SheafMorphismRealization {
        source: a.name.clone(),
        target: b.name.clone(),
        maps,
    })
}

/// `t∘s`, computed segment by segment. The result is checked to lie in
/// `hom(A, C)`.
pub fn compose(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    c: &ElementaryAlgebra,
    s: &HomTuple,
    t: &HomTuple,
) -> Result<HomTuple> {
    require_common_partition(a, b)?;
    require_common_partition(b, c)?;
    check_member(a, b, s)?;
    check_member(b, c, t)?;
    let betas = s.betas.iter().zip(&t.betas).map(|(x, y)| y * x).collect();
    let out = HomTuple::new(&a.name, &c.name, betas);
    check_member(a, c, &out)?;
    Ok(out)
}

pub fn identity(a: &ElementaryAlgebra) -> Result<HomTuple> {
    a.check_shapes()?;
    let betas = a.h.iter().map(|&h| IntMatrix::identity(h)).collect();
    let t = HomTuple::new(&a.name, &a.name, betas);
    if a.is_strict() {
        check_member(a, a, &t)?;
    }
    Ok(t)
}

/// The two-sided inverse of `t`, if every `β_k` is invertible over `Z` and
/// the inverse tuple lies in `hom(B, A)`.
pub fn is_isomorphism(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    t: &HomTuple,
) -> Result<Option<HomTuple>> {
    require_common_partition(a, b)?;
    check_member(a, b, t)?;
    let mut inverse = Vec::with_capacity(t.betas.len());
    for beta in &t.betas {
        match inverse_unimodular(beta) {
            Some(x) => inverse.push(x),
            None => return Ok(None),
        }
    }
    let inv = HomTuple::new(&b.name, &a.name, inverse);
    if inv.shapes() != tuple_shapes(b, a, &(1..=a.n + 1).collect::<Vec<_>>()) {
        return Ok(None);
    }
    Ok(super::hom::is_member(b, a, &inv)?.then_some(inv))
}
