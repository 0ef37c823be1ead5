use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Deserializer, Serialize};

use super::matrix::{BigIntRepr, IntLiteral, IntMatrix};
use super::normal_form::{smith_diagonal, smith_normal_form};
use crate::error::{Error, Result};

/// Finitely generated abelian group `Z^r (+) Z/d_1 (+) ... (+) Z/d_k` in
/// invariant-factor form: `d_j >= 2` and `d_j | d_{j+1}`.
///
/// The representation is canonical, so `==` is isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Validates the invariant-factor conditions.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        if let Some(d) = torsion.iter().find(|d| *d < &BigInt::from(2)) {
            return Err(Error::Dimension(format!(
                "invariant factor {d} is below 2"
            )));
        }
        if torsion.windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return Err(Error::Dimension(
                "invariant factors must form a divisibility chain".into(),
            ));
        }
        Ok(Self { free_rank, torsion })
    }

    /// Canonical form of an arbitrary list of cyclic orders, where an order of
    /// zero denotes a copy of `Z`. Used for presentations that are diagonal
    /// but not yet in invariant-factor form.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let diag = IntMatrix::new(
            n,
            n,
            (0..n * n)
                .map(|k| {
                    if k / n == k % n {
                        orders[k / n].clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect(),
        )
        .expect("square");
        cokernel(&diag)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Direct sum, returned in canonical form.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        orders.extend(std::iter::repeat_with(BigInt::zero).take(self.free_rank + other.free_rank));
        Self::from_cyclic_orders(&orders)
    }
}

/// `Z^r (+) Z/d1 (+) ...`; the trivial group prints as `0`.
impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" (+) "))
    }
}

impl Serialize for FgAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FgAbGroup", 2)?;
        st.serialize_field("rank", &self.free_rank)?;
        let t: Vec<_> = self.torsion.iter().map(BigIntRepr).collect();
        st.serialize_field("torsion", &t)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rank: usize,
            #[serde(default)]
            torsion: Vec<IntLiteral>,
        }
        let r = Repr::deserialize(d)?;
        let torsion = r
            .torsion
            .into_iter()
            .map(IntLiteral::into_bigint)
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        FgAbGroup::new(r.rank, torsion).map_err(serde::de::Error::custom)
    }
}

/// `Z^rows / colspan(M)` in canonical form.
pub fn cokernel(m: &IntMatrix) -> FgAbGroup {
    let (d, _, _) = smith_normal_form(m);
    let diag = smith_diagonal(&d);
    let nonzero = diag.iter().filter(|x| !x.is_zero()).count();
    let torsion = diag
        .into_iter()
        .filter(|x| !x.is_zero() && !x.abs().is_one())
        .collect();
    FgAbGroup {
        free_rank: m.rows() - nonzero,
        torsion,
    }
}

/// Cokernel together with coordinates for its free part.
///
/// `quotient` maps `Z^rows` onto `Z^free_rank` and kills `colspan(M)` and the
/// torsion; `section` is a right inverse of `quotient`. When the cokernel is
/// free, `quotient` identifies it with `Z^free_rank`.
#[derive(Clone, Debug)]
pub struct CokernelPresentation {
    pub group: FgAbGroup,
    pub quotient: IntMatrix,
    pub section: IntMatrix,
}

pub fn cokernel_presentation(m: &IntMatrix) -> CokernelPresentation {
    let (d, u, _) = smith_normal_form(m);
    let nonzero = smith_diagonal(&d).iter().filter(|x| !x.is_zero()).count();
    let rows = m.rows();
    let quotient = u.submatrix(nonzero..rows, 0..rows);
    let u_inv = super::normal_form::inverse_unimodular(&u).expect("U is unimodular");
    let section = u_inv.submatrix(0..rows, nonzero..rows);
    CokernelPresentation {
        group: cokernel(m),
        quotient,
        section,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cokernel_examples() {
        // column span of {2, -2} inside Z
        let g = cokernel(&IntMatrix::from_rows(&[[2, -2]]));
        assert_eq!(g, FgAbGroup::new(0, big(&[2])).unwrap());
        assert!(cokernel(&IntMatrix::identity(3)).is_trivial());
        assert_eq!(cokernel(&IntMatrix::zeros(3, 2)), FgAbGroup::free(3));
        assert_eq!(cokernel(&IntMatrix::zeros(2, 0)), FgAbGroup::free(2));
        assert!(cokernel(&IntMatrix::zeros(0, 2)).is_trivial());
    }

    #[test]
    fn canonical_from_orders() {
        let g = FgAbGroup::from_cyclic_orders(&big(&[2, 3, 0, 1]));
        assert_eq!(g, FgAbGroup::new(1, big(&[6])).unwrap());
        let g = FgAbGroup::from_cyclic_orders(&big(&[4, 2]));
        assert_eq!(g.torsion(), &big(&[2, 4])[..]);
    }

    #[test]
    fn display() {
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(FgAbGroup::free(1).to_string(), "Z");
        let g = FgAbGroup::new(2, big(&[2, 4])).unwrap();
        assert_eq!(g.to_string(), "Z^2 (+) Z/2 (+) Z/4");
    }

    #[test]
    fn rejects_non_canonical() {
        assert!(FgAbGroup::new(0, big(&[1])).is_err());
        assert!(FgAbGroup::new(0, big(&[2, 3])).is_err());
        assert!(serde_json::from_str::<FgAbGroup>(r#"{"rank":0,"torsion":[4,2]}"#).is_err());
        let g: FgAbGroup = serde_json::from_str(r#"{"rank":1,"torsion":[2]}"#).unwrap();
        assert_eq!(serde_json::to_string(&g).unwrap(), r#"{"rank":1,"torsion":[2]}"#);
    }

    #[test]
    fn presentation_of_free_cokernel() {
        // Z^2 / span{(1,2)} is free of rank 1
        let m = IntMatrix::from_rows(&[[1], [2]]);
        let p = cokernel_presentation(&m);
        assert_eq!(p.group, FgAbGroup::free(1));
        assert!((&p.quotient * &m).is_zero());
        assert!((&p.quotient * &p.section).is_identity());
    }
}
