use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use super::tuple::{HomGroup, HomTuple};
use crate::algebra::{CombInterval, ElementaryAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{
    image, is_zero_vec, kernel_basis, preimage, quotient, FgAbGroup, IntMatrix,
};

pub(crate) fn require_common_partition(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<()> {
    a.check_shapes()?;
    b.check_shapes()?;
    if a.n != b.n {
        return Err(Error::PartitionMismatch(a.name.clone(), b.name.clone(), a.n, b.n));
    }
    Ok(())
}

pub(crate) fn require_strict(x: &ElementaryAlgebra) -> Result<()> {
    if x.is_strict() {
        Ok(())
    } else {
        Err(Error::NotStrict(x.name.clone()))
    }
}

/// `(j(i), j'(i))`: `γ'_{i,j(i)}` is the identity, `0` winning ties.
pub fn j_index(b: &ElementaryAlgebra, i: usize) -> Result<(usize, usize)> {
    require_strict(b)?;
    if i == 0 || i > b.n {
        return Err(Error::Range(format!("singular point {i} outside 1..={}", b.n)));
    }
    Ok(if b.g0(i).is_identity() { (0, 1) } else { (1, 0) })
}

/// Shapes `h'_k x h_k` of the tuple entries over the given segments.
pub(crate) fn tuple_shapes(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    segments: &[usize],
) -> Vec<(usize, usize)> {
    segments.iter().map(|&k| (b.h_rank(k), a.h_rank(k))).collect()
}

/// Column offset of each segment's block, keyed by position in `segments`.
fn block_offsets(shapes: &[(usize, usize)]) -> Vec<usize> {
    let mut off = vec![0];
    for (r, c) in shapes {
        off.push(off.last().unwrap() + r * c);
    }
    off
}

fn check_range(a: &ElementaryAlgebra, i: &CombInterval) -> Result<()> {
    if i.p == 0 || i.p > i.q || i.q > a.n + 1 {
        return Err(Error::Range(format!("interval {i} outside 1..={}", a.n + 1)));
    }
    Ok(())
}

/// The relation
/// `β_{i+j'}·G_{i,j'} - G'_{i,j'}·β_{i+j}·G_{i,j} = 0`, one block row per
/// singular point in `points`, acting on tuples over `segments`.
/// `side(i)` supplies `j(i)`.
pub(crate) fn relation_matrix_with(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    segments: &[usize],
    points: &[usize],
    side: impl Fn(usize) -> usize,
) -> Result<IntMatrix> {
    let shapes = tuple_shapes(a, b, segments);
    let off = block_offsets(&shapes);
    let col = |k: usize| -> Result<usize> {
        segments
            .iter()
            .position(|&s| s == k)
            .map(|p| off[p])
            .ok_or_else(|| Error::Range(format!("segment {k} is not among the tuple's segments")))
    };
    let rows: usize = points
        .iter()
        .map(|&i| b.h_rank(i + 1 - side(i)) * a.d_rank(i))
        .sum();
    let mut m = IntMatrix::zeros(rows, *off.last().unwrap());
    let mut r = 0;
    for &i in points {
        let j = side(i);
        let jp = 1 - j;
        let kp = i + jp;
        let hp = b.h_rank(kp);
        let lhs = a.gamma(i, jp).transpose().kron(&IntMatrix::identity(hp));
        let rhs = a.gamma(i, j).transpose().kron(b.gamma(i, jp));
        m.paste(r, col(kp)?, &lhs);
        m.paste(r, col(i + j)?, &-&rhs);
        r += hp * a.d_rank(i);
    }
    Ok(m)
}

pub(crate) fn relation_matrix(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    segments: &[usize],
    points: &[usize],
) -> Result<IntMatrix> {
    require_strict(b)?;
    relation_matrix_with(a, b, segments, points, |i| j_index(b, i).unwrap().0)
}

fn interval_parts(i: &CombInterval) -> (Vec<usize>, Vec<usize>) {
    (i.segments().collect(), i.singular_points().collect())
}

/// Hom tuples over `I` solving the relations at the singular points inside
/// `I`, without the strictness gate on `A`.
fn relation_group(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    i: &CombInterval,
) -> Result<HomGroup> {
    require_common_partition(a, b)?;
    require_strict(b)?;
    check_range(a, i)?;
    let (segments, points) = interval_parts(i);
    let m = relation_matrix(a, b, &segments, &points)?;
    HomGroup::new(&a.name, &b.name, tuple_shapes(a, b, &segments), kernel_basis(&m))
}

/// `E_X(A, B)` as the lattice of tuples satisfying the simplified relation.
/// Both algebras must be strict; see [`hom_sheaf_general`] to lift the
/// requirement on `A`.
pub fn hom_sheaf(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<HomGroup> {
    require_strict(a)?;
    relation_group(a, b, &a.full_interval())
}

/// The simplified relation for any well-shaped `A`. Only `B` has to be strict.
pub fn hom_sheaf_general(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<HomGroup> {
    relation_group(a, b, &a.full_interval())
}

/// [`hom_sheaf`] for strict `A`, [`hom_sheaf_via_delta`] otherwise.
pub fn hom(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<HomGroup> {
    if a.is_strict() {
        hom_sheaf(a, b)
    } else {
        hom_sheaf_via_delta(a, b)
    }
}

/// `(Δ_A, Δ_B)`.
///
/// `Δ_A: (β_k) ↦ (-β_i·G_{i,0}, β_{i+1}·G_{i,1})_i` on vectorized tuples, and
/// `Δ_B: (α_i) ↦ (-G'_{i,0}·α_i, G'_{i,1}·α_i)_i` on vectorized
/// `α_i: Z^{d_i} -> Z^{d'_i}`. The codomain is
/// `⊕_i (Hom(Z^{d_i}, Z^{h'_i}) ⊕ Hom(Z^{d_i}, Z^{h'_{i+1}}))`.
pub fn delta_matrices(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<(IntMatrix, IntMatrix)> {
    require_common_partition(a, b)?;
    let n = a.n;
    let segments: Vec<usize> = (1..=n + 1).collect();
    let beta_off = block_offsets(&tuple_shapes(a, b, &segments));
    let mut alpha_off = vec![0];
    for i in 1..=n {
        alpha_off.push(alpha_off.last().unwrap() + b.d_rank(i) * a.d_rank(i));
    }
    let rows: usize = (1..=n)
        .map(|i| a.d_rank(i) * (b.h_rank(i) + b.h_rank(i + 1)))
        .sum();
    let mut da = IntMatrix::zeros(rows, *beta_off.last().unwrap());
    let mut db = IntMatrix::zeros(rows, *alpha_off.last().unwrap());
    let mut r = 0;
    for i in 1..=n {
        let d = a.d_rank(i);
        for j in 0..2 {
            let k = i + j;
            let h = b.h_rank(k);
            let a_block = a.gamma(i, j).transpose().kron(&IntMatrix::identity(h));
            let b_block = IntMatrix::identity(d).kron(b.gamma(i, j));
            let (a_block, b_block) = if j == 0 {
                (-&a_block, -&b_block)
            } else {
                (a_block, b_block)
            };
            da.paste(r, beta_off[k - 1], &a_block);
            db.paste(r, alpha_off[i - 1], &b_block);
            r += h * d;
        }
    }
    Ok((da, db))
}

/// `E_X(A, B)` as `Δ_A^{-1}(Im Δ_B)`. `A` need not be strict.
pub fn hom_sheaf_via_delta(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<HomGroup> {
    require_common_partition(a, b)?;
    require_strict(b)?;
    let (da, db) = delta_matrices(a, b)?;
    let lattice = preimage(&da, &image(&db))?;
    let segments: Vec<usize> = (1..=a.n + 1).collect();
    HomGroup::new(&a.name, &b.name, tuple_shapes(a, b, &segments), lattice)
}

/// `E^1_X(A, B)` as the cokernel of `Δ_A ⊕ Δ_B`. This formula is derived from
/// the long exact sequence rather than stated as a theorem.
pub fn e1_group(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<FgAbGroup> {
    require_common_partition(a, b)?;
    require_strict(b)?;
    let (da, db) = delta_matrices(a, b)?;
    quotient(da.rows(), &image(&da).sum(&image(&db))?)
}

fn check_tuple_shapes(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    segments: &[usize],
    t: &HomTuple,
) -> Result<()> {
    let want = tuple_shapes(a, b, segments);
    if t.shapes() != want {
        return Err(Error::Dimension(format!(
            "tuple shapes {:?} do not match {:?} required by `{}` -> `{}`",
            t.shapes(),
            want,
            a.name,
            b.name
        )));
    }
    Ok(())
}

/// Whether a full tuple lies in `E_X(A, B)`: the simplified relation when `B`
/// is strict, the delta criterion otherwise.
pub fn is_member(a: &ElementaryAlgebra, b: &ElementaryAlgebra, t: &HomTuple) -> Result<bool> {
    Ok(first_violation(a, b, t)?.is_none())
}

/// Like [`is_member`], but reports the first violated singular point.
pub fn check_member(a: &ElementaryAlgebra, b: &ElementaryAlgebra, t: &HomTuple) -> Result<()> {
    match first_violation(a, b, t)? {
        None => Ok(()),
        Some(Some(i)) => Err(Error::Membership(format!(
            "relation at x_{i} fails for `{}` -> `{}`",
            a.name, b.name
        ))),
        Some(None) => Err(Error::Membership(format!(
            "Δ_A of the tuple is not in the image of Δ_B for `{}` -> `{}`",
            a.name, b.name
        ))),
    }
}

/// `None` for members; `Some(Some(i))` names the failing point when the
/// pointwise relation is used.
fn first_violation(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    t: &HomTuple,
) -> Result<Option<Option<usize>>> {
    require_common_partition(a, b)?;
    let segments: Vec<usize> = (1..=a.n + 1).collect();
    check_tuple_shapes(a, b, &segments, t)?;
    if b.is_strict() {
        for i in 1..=a.n {
            let m = relation_matrix(a, b, &segments, &[i])?;
            if !is_zero_vec(&m.mul_vec(&t.vectorize())) {
                return Ok(Some(Some(i)));
            }
        }
        return Ok(None);
    }
    let (da, db) = delta_matrices(a, b)?;
    Ok((!image(&db).contains(&da.mul_vec(&t.vectorize()))?).then_some(None))
}

/// `E_I(A(I), B(I))`: tuples over the segments of `I` satisfying the
/// relations at the singular points inside `I`.
pub fn e_subinterval(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    i: &CombInterval,
) -> Result<HomGroup> {
    require_strict(a)?;
    relation_group(a, b, i)
}

/// Restricts a tuple over `I` to the segments of `J ⊆ I`.
pub fn restrict_hom(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    i: &CombInterval,
    j: &CombInterval,
    t: &HomTuple,
) -> Result<HomTuple> {
    require_common_partition(a, b)?;
    check_range(a, i)?;
    check_range(a, j)?;
    if !i.contains(j) {
        return Err(Error::Range(format!("{j} is not contained in {i}")));
    }
    let segments: Vec<usize> = i.segments().collect();
    check_tuple_shapes(a, b, &segments, t)?;
    let betas = t.betas[j.p - i.p..=j.q - i.p].to_vec();
    Ok(HomTuple::new(&t.from, &t.to, betas))
}

/// Outcome of comparing `E(Y ∪ Z)` with the fiber product of `E(Y)` and `E(Z)`
/// over `E(Y ∩ Z)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub holds: bool,
    /// Segments of `Y ∪ Z`, which index the lattices below.
    pub segments: Vec<usize>,
    pub union_rank: usize,
    pub fiber_product_rank: usize,
    /// A tuple over `segments` in one lattice but not the other.
    pub witness: Option<HomTuple>,
}

/// Selection matrix picking the blocks of `sub` out of tuples over `all`.
fn projection(shapes: &[(usize, usize)], all: &[usize], sub: &[usize]) -> IntMatrix {
    let off = block_offsets(shapes);
    let rows: usize = sub
        .iter()
        .map(|k| {
            let p = all.iter().position(|s| s == k).unwrap();
            off[p + 1] - off[p]
        })
        .sum();
    let mut m = IntMatrix::zeros(rows, *off.last().unwrap());
    let mut r = 0;
    for k in sub {
        let p = all.iter().position(|s| s == k).unwrap();
        for c in off[p]..off[p + 1] {
            m.set(r, c, BigInt::from(1));
            r += 1;
        }
    }
    m
}

/// Checks that `E(Y ∪ Z)` is the pullback of `E(Y) -> E(Y ∩ Z) <- E(Z)`.
/// Intervals sharing a segment overlap; otherwise they are disjoint and the
/// pullback is the product.
pub fn pullback_check(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    y: &CombInterval,
    z: &CombInterval,
) -> Result<PullbackReport> {
    require_common_partition(a, b)?;
    require_strict(a)?;
    require_strict(b)?;
    check_range(a, y)?;
    check_range(a, z)?;
    let (y, z) = if (y.p, y.q) <= (z.p, z.q) { (y, z) } else { (z, y) };
    let gy = e_subinterval(a, b, y)?;
    let gz = e_subinterval(a, b, z)?;
    let ys: Vec<usize> = y.segments().collect();
    let zs: Vec<usize> = z.segments().collect();
    let union: BTreeSet<usize> = ys.iter().chain(&zs).copied().collect();
    let union: Vec<usize> = union.into_iter().collect();
    let shapes = tuple_shapes(a, b, &union);
    let overlap: Vec<usize> = ys.iter().filter(|k| zs.contains(k)).copied().collect();

    let direct = if overlap.is_empty() {
        // Disjoint: the relation system on the two pieces at once.
        let points: Vec<usize> = y.singular_points().chain(z.singular_points()).collect();
        kernel_basis(&relation_matrix(a, b, &union, &points)?)
    } else {
        let u = CombInterval::new(y.p.min(z.p), y.q.max(z.q))?;
        e_subinterval(a, b, &u)?.lattice().clone()
    };

    // Pairs (f, g) agreeing on the overlap, glued into tuples over the union.
    let by = gy.lattice().basis();
    let bz = gz.lattice().basis();
    let py = projection(gy.shapes(), &ys, &overlap);
    let pz = projection(gz.shapes(), &zs, &overlap);
    let agree = kernel_basis(&IntMatrix::hstack(&[&(&py * by), &-&(&pz * bz)])?);
    let to_union_y = projection(&shapes, &union, &ys).transpose();
    let z_only: Vec<usize> = zs.iter().filter(|k| !overlap.contains(k)).copied().collect();
    let keep_z = projection(gz.shapes(), &zs, &z_only);
    let to_union_z_only = &projection(&shapes, &union, &z_only).transpose() * &keep_z;
    let glue = IntMatrix::hstack(&[&(&to_union_y * by), &(&to_union_z_only * bz)])?;
    let glued = agree.image(&glue)?;

    let witness = direct
        .basis_vectors()
        .into_iter()
        .find(|v| !glued.contains(v).unwrap_or(false))
        .or_else(|| {
            glued
                .basis_vectors()
                .into_iter()
                .find(|v| !direct.contains(v).unwrap_or(false))
        })
        .map(|v| HomTuple::from_vector(&a.name, &b.name, &shapes, &v))
        .transpose()?;
    Ok(PullbackReport {
        holds: direct == glued,
        segments: union,
        union_rank: direct.rank(),
        fiber_product_rank: glued.rank(),
        witness,
    })
}

/// `rank ⊕Hom(H_k, H'_k) - rank E_X(A, B)` as predicted by exactness: the
/// rational rank of `Δ_A` followed by the quotient by `Im Δ_B`.
pub fn predicted_corank(a: &ElementaryAlgebra, b: &ElementaryAlgebra) -> Result<usize> {
    let (da, db) = delta_matrices(a, b)?;
    let both = IntMatrix::hstack(&[&da, &db])?;
    Ok(crate::linalg::rational_rank(&both) - crate::linalg::rational_rank(&db))
}

#[cfg(test)]
pub(crate) fn lattice_of(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    tuples: &[HomTuple],
) -> crate::linalg::Lattice {
    let segments: Vec<usize> = (1..=a.n + 1).collect();
    let n = tuple_shapes(a, b, &segments).iter().map(|(r, c)| r * c).sum();
    crate::linalg::Lattice::from_vectors(n, &tuples.iter().map(HomTuple::vectorize).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rank_one;
    use crate::linalg::vec_from_i64;

    fn m(x: i64) -> IntMatrix {
        IntMatrix::from_rows(&[[x]])
    }

    fn tuple(v: &[i64]) -> HomTuple {
        HomTuple::new("A", "B", v.iter().map(|&x| m(x)).collect())
    }

    #[test]
    fn j_index_examples() {
        assert_eq!(j_index(&rank_one("B", &[1], &[3]), 1).unwrap(), (0, 1));
        assert_eq!(j_index(&rank_one("B", &[2], &[1]), 1).unwrap(), (1, 0));
        assert_eq!(j_index(&rank_one("B", &[1], &[1]), 1).unwrap(), (0, 1));
        assert!(matches!(
            j_index(&rank_one("B", &[2], &[3]), 1),
            Err(Error::NotStrict(_))
        ));
    }

    #[test]
    fn tie_break_choice_is_irrelevant() {
        let a = rank_one("A", &[1, 3], &[2, 1]);
        let b = rank_one("B", &[1, 1], &[1, 5]);
        let segs = [1, 2, 3];
        let pts = [1, 2];
        let zero = relation_matrix_with(&a, &b, &segs, &pts, |_| 0).unwrap();
        let one = relation_matrix_with(&a, &b, &segs, &pts, |i| if i == 1 { 1 } else { 0 }).unwrap();
        assert_eq!(kernel_basis(&zero), kernel_basis(&one));
    }

    #[test]
    fn hom_examples() {
        let a = rank_one("A", &[1], &[2]);
        let b = rank_one("B", &[1], &[3]);
        let g = hom_sheaf(&a, &b).unwrap();
        assert_eq!(g.rank(), 1);
        assert_eq!(g.basis(), vec![tuple(&[2, 3])]);
        assert_eq!(hom_sheaf_via_delta(&a, &b).unwrap(), g);
        assert_eq!(g.summary(), "rank 1; basis [(2),(3)]");

        let g = hom_sheaf(&a, &a).unwrap();
        assert_eq!(g.basis(), vec![HomTuple::new("A", "A", vec![m(1), m(1)])]);
        assert_eq!(hom_sheaf_via_delta(&a, &a).unwrap(), g);
    }

    #[test]
    fn trivial_partition_is_full() {
        let a = ElementaryAlgebra::trivial("A", 2);
        let b = ElementaryAlgebra::trivial("B", 3);
        let g = hom_sheaf(&a, &b).unwrap();
        assert_eq!(g.rank(), 6);
        assert!(g.lattice().basis().is_identity());
        let (da, db) = delta_matrices(&a, &b).unwrap();
        assert_eq!((da.rows(), db.rows()), (0, 0));
        assert!(e1_group(&a, &b).unwrap().is_trivial());
    }

    #[test]
    fn delta_examples() {
        let a = rank_one("A", &[1], &[2]);
        let (da, db) = delta_matrices(&a, &a).unwrap();
        assert_eq!(da, IntMatrix::from_rows(&[[-1, 0], [0, 2]]));
        assert_eq!(db, IntMatrix::from_rows(&[[-1], [2]]));

        let a3 = rank_one("A", &[3], &[1]);
        let (da, _) = delta_matrices(&a3, &a).unwrap();
        assert_eq!(da.get(0, 0), &BigInt::from(-3));
    }

    #[test]
    fn e1_examples() {
        let a = rank_one("A", &[1], &[2]);
        assert_eq!(e1_group(&a, &a).unwrap(), FgAbGroup::new(0, vec![2.into()]).unwrap());
        let one = rank_one("A", &[1], &[1]);
        assert!(e1_group(&one, &one).unwrap().is_trivial());
    }

    #[test]
    fn non_strict_source() {
        let a = rank_one("A", &[2], &[3]);
        let b = rank_one("B", &[1], &[3]);
        assert!(matches!(hom_sheaf(&a, &b), Err(Error::NotStrict(_))));
        let g = hom_sheaf_via_delta(&a, &b).unwrap();
        assert_eq!(hom(&a, &b).unwrap(), g);
        // brute force: Δ_A(β) ∈ Im Δ_B  <=>  ∃α: 2β1 = α, 3β2 = 3α
        for b1 in -6i64..=6 {
            for b2 in -6i64..=6 {
                let member = 3 * b2 == 3 * (2 * b1);
                assert_eq!(g.contains(&HomTuple::new("A", "B", vec![m(b1), m(b2)])).unwrap(), member);
            }
        }
        assert!(!hom_sheaf_general(&a, &b).unwrap().basis().is_empty());
    }

    #[test]
    fn membership() {
        let a = rank_one("A", &[1], &[2]);
        let b = rank_one("B", &[1], &[3]);
        assert!(is_member(&a, &b, &tuple(&[2, 3])).unwrap());
        assert!(!is_member(&a, &b, &tuple(&[1, 1])).unwrap());
        assert!(matches!(
            check_member(&a, &b, &tuple(&[1, 1])),
            Err(Error::Membership(_))
        ));
        assert!(is_member(&a, &b, &tuple(&[1])).is_err());
    }

    #[test]
    fn subinterval_examples() {
        let a = rank_one("A", &[1], &[2]);
        let b = rank_one("B", &[1], &[3]);
        let seg = e_subinterval(&a, &b, &CombInterval::segment(2)).unwrap();
        assert_eq!(seg.rank(), 1);
        assert!(seg.lattice().basis().is_identity());
        let full = e_subinterval(&a, &b, &a.full_interval()).unwrap();
        assert_eq!(full, hom_sheaf(&a, &b).unwrap());
        let r = restrict_hom(&a, &b, &a.full_interval(), &CombInterval::segment(2), &tuple(&[2, 3]))
            .unwrap();
        assert_eq!(r.betas, vec![m(3)]);
        assert!(restrict_hom(&a, &b, &CombInterval::segment(1), &CombInterval::segment(2), &tuple(&[2]))
            .is_err());
    }

    #[test]
    fn pullback_examples() {
        let a = rank_one("A", &[1, 3], &[2, 1]);
        let y = CombInterval::new(1, 2).unwrap();
        let z = CombInterval::new(2, 3).unwrap();
        let r = pullback_check(&a, &a, &y, &z).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.witness.is_none());
        let full = a.full_interval();
        assert!(pullback_check(&a, &a, &full, &full).unwrap().holds);
        let r = pullback_check(&a, &a, &CombInterval::segment(1), &CombInterval::segment(3)).unwrap();
        assert!(r.holds);
        assert_eq!(r.union_rank, 2);
    }

    #[test]
    fn corank_matches() {
        let a = rank_one("A", &[1], &[2]);
        let b = rank_one("B", &[1], &[3]);
        let g = hom_sheaf(&a, &b).unwrap();
        assert_eq!(g.ambient_rank() - g.rank(), predicted_corank(&a, &b).unwrap());
        let l = lattice_of(&a, &b, &[tuple(&[4, 6])]);
        assert!(g.lattice().contains_lattice(&l).unwrap());
        assert_eq!(l.basis().column(0), vec_from_i64(&[4, 6]));
    }
}
