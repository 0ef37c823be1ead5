//! Elementary C[0,1]-algebras at the level of K-theory.
//!
//! An algebra over the partition `0 = x_0 < x_1 < ... < x_n < x_{n+1} = 1` is
//! recorded by the ranks of `K0(D_i)` at the singular points, the ranks of
//! `K0(H_k)` on the open segments `U_k`, and the integer matrices of the
//! connecting maps `γ_{i,0}: D_i -> H_i` and `γ_{i,1}: D_i -> H_{i+1}`.
//!
//! Singular points are numbered `1..=n` and segments `1..=n+1`, in every public
//! function of this module.
//!
//! The K0 presheaf is evaluated on combinatorial intervals: a closed interval
//! of positive length is determined, as far as K-theory is concerned, by the
//! segments holding its two endpoints.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cokernel, kernel_basis, FgAbGroup, IntMatrix, Lattice};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementaryAlgebra {
    pub name: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
    #[serde(rename = "d_ranks")]
    pub d: Vec<usize>,
    #[serde(rename = "h_ranks")]
    pub h: Vec<usize>,
    pub gamma0: Vec<IntMatrix>,
    pub gamma1: Vec<IntMatrix>,
    pub strict_elementary: bool,
}

/// One failed constraint of an algebra description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Singular point or segment the violation refers to, if any.
    pub index: Option<usize>,
    pub constraint: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "[{}] {}: {}", i, self.constraint, self.detail),
            None => write!(f, "{}: {}", self.constraint, self.detail),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub is_special_elementary: bool,
}

/// Closed interval with left endpoint in `U_p` and right endpoint in `U_q`,
/// `1 <= p <= q <= n + 1`. It contains the singular points `x_p, ..., x_{q-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CombInterval {
    pub p: usize,
    pub q: usize,
}

impl CombInterval {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || p > q {
            return Err(Error::Range(format!("interval {p}:{q} needs 1 <= p <= q")));
        }
        Ok(Self { p, q })
    }

    pub fn segment(k: usize) -> Self {
        Self { p: k, q: k }
    }

    pub fn contains(&self, other: &CombInterval) -> bool {
        self.p <= other.p && other.q <= self.q
    }

    /// Number of singular points inside.
    pub fn singular_count(&self) -> usize {
        self.q - self.p
    }

    pub fn singular_points(&self) -> std::ops::Range<usize> {
        self.p..self.q
    }

    pub fn segments(&self) -> std::ops::RangeInclusive<usize> {
        self.p..=self.q
    }
}

impl fmt::Display for CombInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.q)
    }
}

impl std::str::FromStr for CombInterval {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::Range(format!("interval {s:?} is not of the form p:q")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Range(format!("interval {s:?} is not of the form p:q")))
        };
        CombInterval::new(parse(a)?, parse(b)?)
    }
}

/// K-groups of a restriction `A(I)`.
///
/// `k0` is given with its embedding: a lattice inside `⊕_{i=p}^{q-1} Z^{d_i}`
/// (or all of `Z^{h_p}` when `p = q`). `k1` comes from the same extension
/// and is not part of the K0 presheaf itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KPair {
    pub interval: CombInterval,
    pub k0: Lattice,
    pub k1: FgAbGroup,
}

impl KPair {
    pub fn k0_group(&self) -> FgAbGroup {
        FgAbGroup::free(self.k0.rank())
    }
}

impl ElementaryAlgebra {
    /// Algebra with no singular points and a single fiber of K0-rank `rank`.
    pub fn trivial(name: impl Into<String>, rank: usize) -> Self {
        Self {
            name: name.into(),
            n: 0,
            coords: None,
            d: vec![],
            h: vec![rank],
            gamma0: vec![],
            gamma1: vec![],
            strict_elementary: true,
        }
    }

    /// Builds and shape-checks an algebra. Strictness is derived from the
    /// connecting maps.
    pub fn from_parts(
        name: impl Into<String>,
        d: Vec<usize>,
        h: Vec<usize>,
        gamma0: Vec<IntMatrix>,
        gamma1: Vec<IntMatrix>,
    ) -> Result<Self> {
        let mut a = Self {
            name: name.into(),
            n: d.len(),
            coords: None,
            d,
            h,
            gamma0,
            gamma1,
            strict_elementary: false,
        };
        a.check_shapes()?;
        a.strict_elementary = a.has_identity_sides();
        Ok(a)
    }

    pub fn d_rank(&self, i: usize) -> usize {
        self.d[i - 1]
    }

    pub fn h_rank(&self, k: usize) -> usize {
        self.h[k - 1]
    }

    pub fn g0(&self, i: usize) -> &IntMatrix {
        &self.gamma0[i - 1]
    }

    pub fn g1(&self, i: usize) -> &IntMatrix {
        &self.gamma1[i - 1]
    }

    /// `γ_{i,j}` for `j ∈ {0, 1}`.
    pub fn gamma(&self, i: usize, j: usize) -> &IntMatrix {
        if j == 0 {
            self.g0(i)
        } else {
            self.g1(i)
        }
    }

    pub fn segment_count(&self) -> usize {
        self.n + 1
    }

    pub fn full_interval(&self) -> CombInterval {
        CombInterval { p: 1, q: self.n + 1 }
    }

    /// All combinatorial intervals, ordered by `(p, q)`.
    pub fn intervals(&self) -> Vec<CombInterval> {
        let m = self.n + 1;
        (1..=m)
            .flat_map(|p| (p..=m).map(move |q| CombInterval { p, q }))
            .collect()
    }

    fn has_identity_sides(&self) -> bool {
        (1..=self.n).all(|i| self.g0(i).is_identity() || self.g1(i).is_identity())
    }

    /// Well-shaped and with an identity connecting map at every singular
    /// point, whatever the `strict_elementary` flag claims.
    pub fn is_strict(&self) -> bool {
        self.check_shapes().is_ok() && self.has_identity_sides()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut push = |index: Option<usize>, constraint: &str, detail: String| {
            violations.push(Violation {
                index,
                constraint: constraint.to_string(),
                detail,
            })
        };
        let n = self.n;
        if self.d.len() != n {
            push(None, "d_ranks length", format!("expected {n}, found {}", self.d.len()));
        }
        if self.h.len() != n + 1 {
            push(None, "h_ranks length", format!("expected {}, found {}", n + 1, self.h.len()));
        }
        if self.gamma0.len() != n {
            push(None, "gamma0 length", format!("expected {n}, found {}", self.gamma0.len()));
        }
        if self.gamma1.len() != n {
            push(None, "gamma1 length", format!("expected {n}, found {}", self.gamma1.len()));
        }
        if let Some(c) = &self.coords {
            if c.len() != n {
                push(None, "coords length", format!("expected {n}, found {}", c.len()));
            }
            let inside = c.iter().all(|&x| x > 0.0 && x < 1.0);
            let increasing = c.windows(2).all(|w| w[0] < w[1]);
            if !inside || !increasing {
                push(None, "coords", "must be strictly increasing inside (0, 1)".into());
            }
        }
        let lengths_ok = self.d.len() == n
            && self.h.len() == n + 1
            && self.gamma0.len() == n
            && self.gamma1.len() == n;
        let mut shapes_ok = lengths_ok;
        if lengths_ok {
            for i in 1..=n {
                for j in 0..2 {
                    let g = self.gamma(i, j);
                    let want = (self.h_rank(i + j), self.d_rank(i));
                    if g.shape() != want {
                        shapes_ok = false;
                        push(
                            Some(i),
                            &format!("gamma{j} shape"),
                            format!(
                                "expected {}x{} (H_{} x D_{}), found {}x{}",
                                want.0,
                                want.1,
                                i + j,
                                i,
                                g.rows(),
                                g.cols()
                            ),
                        );
                    }
                }
            }
        }
        if shapes_ok && self.strict_elementary {
            for i in 1..=n {
                if !self.g0(i).is_identity() && !self.g1(i).is_identity() {
                    push(
                        Some(i),
                        "elementary",
                        "neither gamma0 nor gamma1 is an identity map".into(),
                    );
                }
            }
        }
        let is_special_elementary = shapes_ok && self.special_pattern();
        ValidationReport {
            valid: violations.is_empty(),
            violations,
            is_special_elementary,
        }
    }

    /// `n = 2m`, `D_{2i-1} = H_{2i} = D_{2i}` and `γ_{2i-1,1} = id = γ_{2i,0}`.
    fn special_pattern(&self) -> bool {
        if !self.n.is_multiple_of(2) {
            return false;
        }
        (1..=self.n / 2).all(|i| {
            let (a, b) = (2 * i - 1, 2 * i);
            self.d_rank(a) == self.h_rank(b)
                && self.h_rank(b) == self.d_rank(b)
                && self.g1(a).is_identity()
                && self.g0(b).is_identity()
        })
    }

    /// Shape check only; strictness is not demanded here.
    pub fn check_shapes(&self) -> Result<()> {
        let mut report = self.validate();
        report
            .violations
            .retain(|v| v.constraint != "elementary");
        if report.violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra {
                name: self.name.clone(),
                violations: report.violations,
            })
        }
    }

    /// Full validation, including the identity condition when the algebra
    /// claims to be strict.
    pub fn check(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra {
                name: self.name.clone(),
                violations: report.violations,
            })
        }
    }

    /// Inserts a singular point inside segment `k` with fiber `D = H_k` and both
    /// connecting maps the identity.
    pub fn refine(&self, k: usize) -> Result<Self> {
        self.check_shapes()?;
        if k == 0 || k > self.n + 1 {
            return Err(Error::Range(format!(
                "segment {k} outside 1..={}",
                self.n + 1
            )));
        }
        let r = self.h_rank(k);
        let mut out = self.clone();
        out.n += 1;
        out.d.insert(k - 1, r);
        out.h.insert(k - 1, r);
        out.gamma0.insert(k - 1, IntMatrix::identity(r));
        out.gamma1.insert(k - 1, IntMatrix::identity(r));
        if let Some(c) = &mut out.coords {
            let left = if k >= 2 { c[k - 2] } else { 0.0 };
            let right = if k <= c.len() { c[k - 1] } else { 1.0 };
            c.insert(k - 1, 0.5 * (left + right));
        }
        Ok(out)
    }

    fn check_interval(&self, i: &CombInterval) -> Result<()> {
        if i.p == 0 || i.p > i.q || i.q > self.n + 1 {
            return Err(Error::Range(format!(
                "interval {i} outside 1..={} for `{}`",
                self.n + 1,
                self.name
            )));
        }
        Ok(())
    }

    /// Offsets of the `D_i` blocks of `⊕_{i=p}^{q-1} Z^{d_i}`.
    fn fiber_offsets(&self, i: &CombInterval) -> Vec<usize> {
        let mut off = Vec::with_capacity(i.singular_count() + 1);
        let mut acc = 0;
        for s in i.singular_points() {
            off.push(acc);
            acc += self.d_rank(s);
        }
        off.push(acc);
        off
    }

    /// The zigzag map `⊕_{i=p}^{q-1} Z^{d_i} -> ⊕_{i=p+1}^{q-1} Z^{h_i}`,
    /// `(d_i) ↦ (γ_{i,1} d_i - γ_{i+1,0} d_{i+1})` on the interior segments.
    pub fn zigzag_matrix(&self, i: &CombInterval) -> Result<IntMatrix> {
        self.check_shapes()?;
        self.check_interval(i)?;
        if i.p == i.q {
            return Err(Error::Range(format!(
                "interval {i} contains no singular point"
            )));
        }
        let col_off = self.fiber_offsets(i);
        let cols = *col_off.last().unwrap();
        let interior: Vec<usize> = (i.p + 1..i.q).collect();
        let rows: usize = interior.iter().map(|&k| self.h_rank(k)).sum();
        let mut z = IntMatrix::zeros(rows, cols);
        let mut r = 0;
        for s in i.p..i.q - 1 {
            let left = s - i.p;
            z.paste(r, col_off[left], self.g1(s));
            z.paste(r, col_off[left + 1], &-self.g0(s + 1));
            r += self.h_rank(s + 1);
        }
        Ok(z)
    }

    pub fn k_groups(&self, i: &CombInterval) -> Result<KPair> {
        self.check_shapes()?;
        self.check_interval(i)?;
        if i.p == i.q {
            return Ok(KPair {
                interval: *i,
                k0: Lattice::full(self.h_rank(i.p)),
                k1: FgAbGroup::trivial(),
            });
        }
        let z = self.zigzag_matrix(i)?;
        Ok(KPair {
            interval: *i,
            k0: kernel_basis(&z),
            k1: cokernel(&z),
        })
    }

    /// K0 of the fiber at the singular point `x_i`.
    pub fn fiber_k0(&self, i: usize) -> Result<FgAbGroup> {
        if i == 0 || i > self.n {
            return Err(Error::Range(format!("singular point {i} outside 1..={}", self.n)));
        }
        Ok(FgAbGroup::free(self.d_rank(i)))
    }

    /// Map `Z^{rank K0(A(I))} -> Z^{d_s}` evaluating at a singular point
    /// `x_s ∈ I`, in the k0 coordinates of `I`.
    pub fn fiber_restriction(&self, i: &CombInterval, s: usize) -> Result<IntMatrix> {
        if !(i.p <= s && s < i.q) {
            return Err(Error::Range(format!("x_{s} is not inside {i}")));
        }
        let k = self.k_groups(i)?;
        let off = self.fiber_offsets(i);
        let block = s - i.p;
        Ok(k
            .k0
            .basis()
            .submatrix(off[block]..off[block + 1], 0..k.k0.rank()))
    }

    /// The presheaf map `r^I_J: K0(A(I)) -> K0(A(J))` in the k0 coordinates of
    /// `I` and `J`.
    pub fn restriction_map(&self, i: &CombInterval, j: &CombInterval) -> Result<IntMatrix> {
        self.check_shapes()?;
        self.check_interval(i)?;
        self.check_interval(j)?;
        if !i.contains(j) {
            return Err(Error::Range(format!("{j} is not contained in {i}")));
        }
        let ki = self.k_groups(i)?;
        if i.p == i.q {
            return Ok(IntMatrix::identity(ki.k0.rank()));
        }
        let off = self.fiber_offsets(i);
        let basis = ki.k0.basis();
        let rank = ki.k0.rank();
        if j.p == j.q {
            let k = j.p;
            // value on segment k: γ_{k,0} d_k, or γ_{q-1,1} d_{q-1} at the right end
            let (s, g) = if k < i.q {
                (k, self.g0(k))
            } else {
                (i.q - 1, self.g1(i.q - 1))
            };
            let block = s - i.p;
            let rows = basis.submatrix(off[block]..off[block + 1], 0..rank);
            return Ok(g * &rows);
        }
        let kj = self.k_groups(j)?;
        let start = off[j.p - i.p];
        let end = off[j.q - i.p];
        let projected = basis.submatrix(start..end, 0..rank);
        let mut cols = Vec::with_capacity(rank);
        for v in projected.columns() {
            let c = kj.k0.coordinates(&v)?.ok_or_else(|| {
                Error::Dimension(format!("restriction of a K0 class of {i} leaves K0 of {j}"))
            })?;
            cols.push(c);
        }
        Ok(IntMatrix::from_columns(kj.k0.rank(), &cols))
    }
}

/// Convenience for the common rank-one case: `G0_i = [g0[i]]`, `G1_i = [g1[i]]`.
pub fn rank_one(name: &str, g0: &[i64], g1: &[i64]) -> ElementaryAlgebra {
    assert_eq!(g0.len(), g1.len());
    let n = g0.len();
    ElementaryAlgebra::from_parts(
        name,
        vec![1; n],
        vec![1; n + 1],
        g0.iter().map(|&x| IntMatrix::from_rows(&[[x]])).collect(),
        g1.iter().map(|&x| IntMatrix::from_rows(&[[x]])).collect(),
    )
    .expect("rank-one shapes are consistent")
}

#[cfg(test)]
pub(crate) fn big(v: &[i64]) -> Vec<num_bigint::BigInt> {
    v.iter().map(|&x| num_bigint::BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(x: i64) -> IntMatrix {
        IntMatrix::from_rows(&[[x]])
    }

    #[test]
    fn validate_examples() {
        let a = rank_one("a", &[1], &[2]);
        assert!(a.validate().valid);
        assert!(a.strict_elementary);

        let mut bad = rank_one("bad", &[2], &[3]);
        bad.strict_elementary = true;
        let r = bad.validate();
        assert!(!r.valid);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].index, Some(1));
        assert_eq!(r.violations[0].constraint, "elementary");

        let c = rank_one("c", &[1, 3], &[2, 1]);
        let r = c.validate();
        assert!(r.valid);
        assert!(!r.is_special_elementary);

        let s = rank_one("s", &[3, 1], &[1, 2]);
        assert!(s.validate().is_special_elementary);
    }

    #[test]
    fn validate_reports_shapes() {
        let mut a = rank_one("a", &[1], &[2]);
        a.gamma1[0] = IntMatrix::from_rows(&[[1, 2]]);
        let r = a.validate();
        assert!(!r.valid);
        assert!(r.violations.iter().any(|v| v.constraint == "gamma1 shape" && v.index == Some(1)));
        a.h.push(3);
        assert!(a.validate().violations.iter().any(|v| v.constraint == "h_ranks length"));
        assert!(a.check_shapes().is_err());
    }

    #[test]
    fn refine_examples() {
        let t = ElementaryAlgebra::trivial("t", 2);
        let r = t.refine(1).unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.d, vec![2]);
        assert_eq!(r.h, vec![2, 2]);
        assert!(r.g0(1).is_identity() && r.g1(1).is_identity());

        let a = rank_one("a", &[1], &[2]);
        let r = a.refine(2).unwrap();
        assert_eq!(r.gamma0, vec![m(1), m(1)]);
        assert_eq!(r.gamma1, vec![m(2), m(1)]);
        assert!(r.validate().valid);
        assert!(a.refine(3).is_err());
        assert!(a.refine(0).is_err());
    }

    #[test]
    fn refine_coordinates() {
        let mut a = rank_one("a", &[1], &[2]);
        a.coords = Some(vec![0.5]);
        let r = a.refine(1).unwrap();
        assert_eq!(r.coords, Some(vec![0.25, 0.5]));
        let r = a.refine(2).unwrap();
        assert_eq!(r.coords, Some(vec![0.5, 0.75]));
    }

    #[test]
    fn zigzag_examples() {
        let a = rank_one("a", &[1, 3], &[2, 1]);
        let z = a.zigzag_matrix(&a.full_interval()).unwrap();
        assert_eq!(z, IntMatrix::from_rows(&[[2, -3]]));

        let b = rank_one("b", &[1, 2], &[2, 1]);
        assert_eq!(
            b.zigzag_matrix(&b.full_interval()).unwrap(),
            IntMatrix::from_rows(&[[2, -2]])
        );

        let one = rank_one("one", &[1], &[2]);
        assert_eq!(one.zigzag_matrix(&one.full_interval()).unwrap().shape(), (0, 1));
        assert!(one.zigzag_matrix(&CombInterval::segment(1)).is_err());
    }

    #[test]
    fn k_group_examples() {
        let one = rank_one("one", &[1], &[2]);
        let k = one.k_groups(&one.full_interval()).unwrap();
        assert_eq!(k.k0_group(), FgAbGroup::free(1));
        assert!(k.k1.is_trivial());

        let a = rank_one("a", &[1, 3], &[2, 1]);
        let k = a.k_groups(&a.full_interval()).unwrap();
        assert_eq!(k.k0, Lattice::from_vectors(2, &[big(&[3, 2])]));
        assert!(k.k1.is_trivial());

        let b = rank_one("b", &[1, 2], &[2, 1]);
        let k = b.k_groups(&b.full_interval()).unwrap();
        assert_eq!(k.k0, Lattice::from_vectors(2, &[big(&[1, 1])]));
        assert_eq!(k.k1, FgAbGroup::new(0, big(&[2])).unwrap());
    }

    #[test]
    fn restriction_examples() {
        let one = rank_one("one", &[1], &[2]);
        let r = one
            .restriction_map(&one.full_interval(), &CombInterval::segment(2))
            .unwrap();
        assert_eq!(r, m(2));
        let full = one.full_interval();
        assert!(one.restriction_map(&full, &full).unwrap().is_identity());

        let a = rank_one("a", &[1, 3], &[2, 1]);
        let r = a
            .restriction_map(&a.full_interval(), &CombInterval::segment(2))
            .unwrap();
        assert_eq!(r, m(6));
        assert!(a
            .restriction_map(&CombInterval::segment(2), &a.full_interval())
            .is_err());
    }

    #[test]
    fn interior_segment_routes_agree() {
        // for interior k both γ_{k,0} d_k and γ_{k-1,1} d_{k-1} give the segment value
        let a = ElementaryAlgebra::from_parts(
            "a",
            vec![2, 1, 2],
            vec![1, 2, 1, 2],
            vec![
                IntMatrix::from_rows(&[[1, 1]]),
                IntMatrix::from_rows(&[[1], [2]]),
                IntMatrix::from_rows(&[[1, 0]]),
            ],
            vec![
                IntMatrix::from_rows(&[[2, 0], [1, 1]]),
                IntMatrix::from_rows(&[[1]]),
                IntMatrix::from_rows(&[[1, 0], [0, 1]]),
            ],
        )
        .unwrap();
        for i in a.intervals() {
            let k = a.k_groups(&i).unwrap();
            if i.q <= i.p + 1 {
                assert!(k.k1.is_trivial());
            }
            for seg in i.p + 1..i.q {
                let via_g0 = a.g0(seg) * &a.fiber_restriction(&i, seg).unwrap();
                let via_g1 = a.g1(seg - 1) * &a.fiber_restriction(&i, seg - 1).unwrap();
                assert_eq!(via_g0, via_g1, "interval {i}, segment {seg}");
            }
        }
    }

    #[test]
    fn interval_parsing() {
        assert_eq!("2:3".parse::<CombInterval>().unwrap(), CombInterval { p: 2, q: 3 });
        assert!("3:2".parse::<CombInterval>().is_err());
        assert!("0:1".parse::<CombInterval>().is_err());
        assert!("x".parse::<CombInterval>().is_err());
    }

    #[test]
    fn json_schema() {
        let json = r#"{"name":"ex","n":1,"d_ranks":[1],"h_ranks":[1,1],
            "gamma0":[[[1]]],"gamma1":[[[2]]],"strict_elementary":true}"#;
        let a: ElementaryAlgebra = serde_json::from_str(json).unwrap();
        assert_eq!(a, rank_one("ex", &[1], &[2]));
        let back: ElementaryAlgebra =
            serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}
