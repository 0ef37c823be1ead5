//! `E_X(i_x(D), B)` for a skyscraper `i_x(D)` with `K0(D) = Z^d`, `K1(D) = 0`.
//!
//! The tower route computes `E*(D, B(U))` for a decreasing family of open
//! neighborhoods `U` of `x` from the K-theory of `B(U)`, then passes to the
//! limit.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use super::hom::j_index;
use super::tuple::GradedGroup;
use crate::algebra::ElementaryAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{cokernel_presentation, kernel_basis, FgAbGroup, IntMatrix, Lattice};
use crate::towers::{Lim1Status, Tower};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    /// The endpoint 0.
    Start,
    /// The endpoint 1.
    End,
    /// The singular point `x_i`.
    Singular(usize),
    /// A point of the open segment `U_k`.
    Segment(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Start => write!(f, "end0"),
            Location::End => write!(f, "end1"),
            Location::Singular(i) => write!(f, "x_{i}"),
            Location::Segment(k) => write!(f, "seg_{k}"),
        }
    }
}

impl FromStr for Location {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Range(format!("location {s:?} is not x_i, seg_k, end0 or end1"));
        match s {
            "end0" => return Ok(Location::Start),
            "end1" => return Ok(Location::End),
            _ => {}
        }
        if let Some(i) = s.strip_prefix("x_") {
            return i.parse().map(Location::Singular).map_err(|_| bad());
        }
        if let Some(k) = s.strip_prefix("seg_") {
            return k.parse().map(Location::Segment).map_err(|_| bad());
        }
        Err(bad())
    }
}

fn check_location(b: &ElementaryAlgebra, loc: Location) -> Result<()> {
    let ok = match loc {
        Location::Start | Location::End => true,
        Location::Singular(i) => (1..=b.n).contains(&i),
        Location::Segment(k) => (1..=b.n + 1).contains(&k),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "location {loc} does not exist for `{}` (n = {})",
            b.name, b.n
        )))
    }
}

/// Closed form: `(0, Z^{d·h'_{i+j'(i)}})` at `x_i`, `(0, Z^{d·h'_k})` inside
/// `U_k`, and `0` at the endpoints.
pub fn skyscraper_e(d_rank: usize, loc: Location, b: &ElementaryAlgebra) -> Result<GradedGroup> {
    b.check_shapes()?;
    check_location(b, loc)?;
    let e1 = match loc {
        Location::Start | Location::End => 0,
        Location::Segment(k) => d_rank * b.h_rank(k),
        Location::Singular(i) => {
            let (_, jp) = j_index(b, i)?;
            d_rank * b.h_rank(i + jp)
        }
    };
    Ok(GradedGroup {
        e0: FgAbGroup::trivial(),
        e1: FgAbGroup::free(e1),
    })
}

/// An open interval of `[0, 1]`. `left = Some(l)` puts the left endpoint
/// inside `U_l`; `None` means the interval contains 0. Likewise for `right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

impl Neighborhood {
    pub fn whole() -> Self {
        Self {
            left: None,
            right: None,
        }
    }

    fn first_segment(&self) -> usize {
        self.left.unwrap_or(1)
    }

    fn last_segment(&self, n: usize) -> usize {
        self.right.unwrap_or(n + 1)
    }

    fn points(&self, n: usize) -> Vec<usize> {
        (self.first_segment()..self.last_segment(n)).collect()
    }

    /// Pieces of `U \ F` that are open intervals; a piece reaching 0 or 1 is
    /// a cone and carries no K-theory.
    fn open_pieces(&self, n: usize) -> Vec<usize> {
        let (first, last) = (self.first_segment(), self.last_segment(n));
        (first..=last)
            .filter(|&k| !(k == first && self.left.is_none()) && !(k == last && self.right.is_none()))
            .collect()
    }

    pub fn contains(&self, other: &Neighborhood) -> bool {
        let left_ok = match (self.left, other.left) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let right_ok = match (self.right, other.right) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        left_ok && right_ok
    }
}

/// `K_*(B(U))` from the extension of `⊕ D'_i` by the pieces of `U \ F`:
/// `K0 = ker ∂` and `K1 = coker ∂` for `∂: ⊕ Z^{d'_i} -> ⊕ Z^{h'_k}`.
struct NeighborhoodK {
    points: Vec<usize>,
    pieces: Vec<usize>,
    boundary: IntMatrix,
    k0: Lattice,
    k1: FgAbGroup,
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut off = vec![0];
    for s in sizes {
        off.push(off.last().unwrap() + s);
    }
    off
}

fn neighborhood_k(b: &ElementaryAlgebra, u: &Neighborhood) -> NeighborhoodK {
    let points = u.points(b.n);
    let pieces = u.open_pieces(b.n);
    let col = offsets(points.iter().map(|&i| b.d_rank(i)));
    let row = offsets(pieces.iter().map(|&k| b.h_rank(k)));
    let mut boundary = IntMatrix::zeros(*row.last().unwrap(), *col.last().unwrap());
    for (c, &i) in points.iter().enumerate() {
        if let Some(r) = pieces.iter().position(|&k| k == i) {
            boundary.paste(row[r], col[c], &-b.g0(i));
        }
        if let Some(r) = pieces.iter().position(|&k| k == i + 1) {
            boundary.paste(row[r], col[c], b.g1(i));
        }
    }
    NeighborhoodK {
        k0: kernel_basis(&boundary),
        k1: crate::linalg::cokernel(&boundary),
        points,
        pieces,
        boundary,
    }
}

/// Block selection `⊕_{k ∈ small} Z^{s_k} -> ⊕_{k ∈ big} Z^{s_k}`; blocks of
/// `small` missing from `big` go to zero.
fn inclusion(small: &[usize], big: &[usize], size: impl Fn(usize) -> usize) -> IntMatrix {
    let so = offsets(small.iter().map(|&k| size(k)));
    let bo = offsets(big.iter().map(|&k| size(k)));
    let mut m = IntMatrix::zeros(*bo.last().unwrap(), *so.last().unwrap());
    for (s, &k) in small.iter().enumerate() {
        if let Some(t) = big.iter().position(|&x| x == k) {
            for e in 0..size(k) {
                m.set(bo[t] + e, so[s] + e, BigInt::from(1));
            }
        }
    }
    m
}

/// Maps `K_*(B(V)) -> K_*(B(U))` induced by `V ⊆ U`.
fn induced_maps(b: &ElementaryAlgebra, v: &NeighborhoodK, u: &NeighborhoodK) -> Result<(IntMatrix, IntMatrix)> {
    let on_points = inclusion(&v.points, &u.points, |i| b.d_rank(i));
    let on_pieces = inclusion(&v.pieces, &u.pieces, |k| b.h_rank(k));
    let pushed = &on_points * v.k0.basis();
    let mut cols = Vec::with_capacity(pushed.cols());
    for c in pushed.columns() {
        cols.push(u.k0.coordinates(&c)?.ok_or_else(|| {
            Error::Dimension("inclusion does not preserve K0 classes".into())
        })?);
    }
    let k0_map = IntMatrix::from_columns(u.k0.rank(), &cols);
    let pu = cokernel_presentation(&u.boundary);
    let pv = cokernel_presentation(&v.boundary);
    let k1_map = &(&pu.quotient * &on_pieces) * &pv.section;
    Ok((k0_map, k1_map))
}

fn candidate_neighborhoods(n: usize, loc: Location) -> Vec<Neighborhood> {
    let seg = |k: usize| (1..=n + 1).contains(&k).then_some(k);
    let (wider, minimal) = match loc {
        Location::Start => (
            Neighborhood { left: None, right: Some(if n >= 1 { 2 } else { 1 }) },
            Neighborhood { left: None, right: Some(1) },
        ),
        Location::End => (
            Neighborhood { left: Some(if n >= 1 { n } else { 1 }), right: None },
            Neighborhood { left: Some(n + 1), right: None },
        ),
        Location::Singular(i) => (
            Neighborhood { left: i.checked_sub(1).and_then(seg), right: seg(i + 2) },
            Neighborhood { left: Some(i), right: Some(i + 1) },
        ),
        Location::Segment(k) => (
            Neighborhood { left: k.checked_sub(1).and_then(seg), right: seg(k + 1) },
            Neighborhood { left: Some(k), right: Some(k) },
        ),
    };
    vec![Neighborhood::whole(), wider, minimal, minimal]
}

/// The towers `E^0(D, B(U_m))` and `E^1(D, B(U_m))` over a shrinking family
/// of neighborhoods of `loc`, starting from `[0, 1]`. Neighborhoods where
/// the K-theory of `B(U)` has torsion are skipped; the last two stages are the
/// smallest neighborhood, below which nothing changes.
pub fn skyscraper_towers(d_rank: usize, loc: Location, b: &ElementaryAlgebra) -> Result<(Tower, Tower)> {
    b.check_shapes()?;
    check_location(b, loc)?;
    let stages: Vec<NeighborhoodK> = candidate_neighborhoods(b.n, loc)
        .iter()
        .map(|u| neighborhood_k(b, u))
        .filter(|k| k.k1.is_free())
        .collect();
    let id_d = IntMatrix::identity(d_rank);
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    let mut m0 = Vec::new();
    let mut m1 = Vec::new();
    for (s, stage) in stages.iter().enumerate() {
        r0.push(d_rank * stage.k0.rank());
        r1.push(d_rank * stage.k1.free_rank());
        if s > 0 {
            let (f0, f1) = induced_maps(b, stage, &stages[s - 1])?;
            // Hom(Z^d, -) on column-major vectorized d-column matrices
            m0.push(id_d.kron(&f0));
            m1.push(id_d.kron(&f1));
        }
    }
    Ok((Tower::new(r0, m0)?, Tower::new(r1, m1)?))
}

/// Tower route: `lim` of the `E^*` towers, after checking that `lim^1`
/// vanishes in both degrees.
pub fn skyscraper_e_via_tower(
    d_rank: usize,
    loc: Location,
    b: &ElementaryAlgebra,
) -> Result<GradedGroup> {
    let (t0, t1) = skyscraper_towers(d_rank, loc, b)?;
    for t in [&t0, &t1] {
        if t.lim1_status()? != Lim1Status::Zero {
            return Err(Error::Unsupported(
                "lim^1 of the skyscraper tower does not vanish".into(),
            ));
        }
    }
    Ok(GradedGroup {
        e0: t0.inverse_limit()?.group,
        e1: t1.inverse_limit()?.group,
    })
}
