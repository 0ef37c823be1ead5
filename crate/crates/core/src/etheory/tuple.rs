use std::fmt;

use num_bigint::BigInt;
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FgAbGroup, IntMatrix, Lattice};

/// A tuple `(β_k)` of matrices `β_k: Z^{h_k} -> Z^{h'_k}`, one per segment of
/// some interval, from algebra `from` to algebra `to`.
///
/// Vectorized coordinates concatenate the column-major vectorizations of the
/// `β_k` in increasing `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomTuple {
    #[serde(default)]
    pub from: String,
    #[serde(default)]
    pub to: String,
    pub betas: Vec<IntMatrix>,
}

impl HomTuple {
    pub fn new(from: impl Into<String>, to: impl Into<String>, betas: Vec<IntMatrix>) -> Self {
        Self {
            from: from.into(),
            to: to.into(),
            betas,
        }
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.betas.iter().map(IntMatrix::shape).collect()
    }

    pub fn vectorize(&self) -> Vec<BigInt> {
        self.betas.iter().flat_map(IntMatrix::vectorize).collect()
    }

    pub fn from_vector(
        from: impl Into<String>,
        to: impl Into<String>,
        shapes: &[(usize, usize)],
        v: &[BigInt],
    ) -> Result<Self> {
        let total: usize = shapes.iter().map(|(r, c)| r * c).sum();
        if v.len() != total {
            return Err(Error::Dimension(format!(
                "tuple vector has length {}, shapes need {total}",
                v.len()
            )));
        }
        let mut betas = Vec::with_capacity(shapes.len());
        let mut at = 0;
        for &(r, c) in shapes {
            betas.push(IntMatrix::unvectorize(r, c, &v[at..at + r * c]));
            at += r * c;
        }
        Ok(Self::new(from, to, betas))
    }

    pub fn is_zero(&self) -> bool {
        self.betas.iter().all(IntMatrix::is_zero)
    }
}

/// `[(2),(3)]`
impl fmt::Display for HomTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.betas.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub(crate) fn vector_len(shapes: &[(usize, usize)]) -> usize {
    shapes.iter().map(|(r, c)| r * c).sum()
}

/// A group of hom tuples, stored as a lattice in vectorized coordinates with
/// a canonical (Hermite) basis. It is a subgroup of a free group, so it is
/// free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomGroup {
    pub source: String,
    pub target: String,
    shapes: Vec<(usize, usize)>,
    lattice: Lattice,
}

impl HomGroup {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        shapes: Vec<(usize, usize)>,
        lattice: Lattice,
    ) -> Result<Self> {
        let n = vector_len(&shapes);
        if lattice.ambient_rank() != n {
            return Err(Error::Dimension(format!(
                "lattice in Z^{} does not fit tuple shapes of total size {n}",
                lattice.ambient_rank()
            )));
        }
        Ok(Self {
            source: source.into(),
            target: target.into(),
            shapes,
            lattice,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn group(&self) -> FgAbGroup {
        FgAbGroup::free(self.rank())
    }

    pub fn shapes(&self) -> &[(usize, usize)] {
        &self.shapes
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn ambient_rank(&self) -> usize {
        self.lattice.ambient_rank()
    }

    pub fn basis(&self) -> Vec<HomTuple> {
        self.lattice
            .basis_vectors()
            .iter()
            .map(|v| {
                HomTuple::from_vector(&self.source, &self.target, &self.shapes, v)
                    .expect("basis vectors fit the shapes")
            })
            .collect()
    }

    fn check_shape(&self, t: &HomTuple) -> Result<()> {
        if t.shapes() != self.shapes {
            return Err(Error::Dimension(format!(
                "tuple shapes {:?} differ from group shapes {:?}",
                t.shapes(),
                self.shapes
            )));
        }
        Ok(())
    }

    pub fn contains(&self, t: &HomTuple) -> Result<bool> {
        self.check_shape(t)?;
        self.lattice.contains(&t.vectorize())
    }

    /// Coordinates of `t` in the canonical basis.
    pub fn coordinates(&self, t: &HomTuple) -> Result<Option<Vec<BigInt>>> {
        self.check_shape(t)?;
        self.lattice.coordinates(&t.vectorize())
    }

    /// `rank r; basis [..], [..]`
    pub fn summary(&self) -> String {
        let basis: Vec<String> = self.basis().iter().map(|t| t.to_string()).collect();
        let basis = if basis.is_empty() {
            "[]".to_string()
        } else {
            basis.join(", ")
        };
        format!("rank {}; basis {}", self.rank(), basis)
    }
}

impl fmt::Display for HomGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

impl Serialize for HomGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HomGroup", 6)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("shapes", &self.shapes)?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("torsion", &Vec::<u8>::new())?;
        let basis: Vec<Vec<IntMatrix>> = self.basis().into_iter().map(|t| t.betas).collect();
        st.serialize_field("basis", &basis)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HomGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Repr {
            source: String,
            target: String,
            shapes: Vec<(usize, usize)>,
            rank: usize,
            #[serde(default)]
            torsion: Vec<serde_json::Value>,
            basis: Vec<Vec<IntMatrix>>,
        }
        let r = Repr::deserialize(d)?;
        if !r.torsion.is_empty() {
            return Err(D::Error::custom("a hom group is torsion-free"));
        }
        let mut vectors = Vec::with_capacity(r.basis.len());
        for betas in r.basis {
            let t = HomTuple::new(&r.source, &r.target, betas);
            if t.shapes() != r.shapes {
                return Err(D::Error::custom("basis tuple does not match the shapes"));
            }
            vectors.push(t.vectorize());
        }
        let lattice = Lattice::from_vectors(vector_len(&r.shapes), &vectors);
        if lattice.rank() != r.rank {
            return Err(D::Error::custom(format!(
                "basis spans rank {}, declared rank {}",
                lattice.rank(),
                r.rank
            )));
        }
        HomGroup::new(r.source, r.target, r.shapes, lattice).map_err(D::Error::custom)
    }
}

/// `E^0` and `E^1` together.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroup {
    pub e0: FgAbGroup,
    pub e1: FgAbGroup,
}

impl GradedGroup {
    pub fn zero() -> Self {
        Self {
            e0: FgAbGroup::trivial(),
            e1: FgAbGroup::trivial(),
        }
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E0 = {}; E1 = {}", self.e0, self.e1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_from_i64;

    #[test]
    fn vector_round_trip() {
        let t = HomTuple::new(
            "A",
            "B",
            vec![IntMatrix::from_rows(&[[1, 2], [3, 4]]), IntMatrix::from_rows(&[[5]])],
        );
        assert_eq!(t.vectorize(), vec_from_i64(&[1, 3, 2, 4, 5]));
        let back = HomTuple::from_vector("A", "B", &t.shapes(), &t.vectorize()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_string(), "[(1,2;3,4),(5)]");
    }

    #[test]
    fn group_json_round_trip() {
        let l = Lattice::from_vectors(2, &[vec_from_i64(&[2, 3])]);
        let g = HomGroup::new("A", "B", vec![(1, 1), (1, 1)], l).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"source":"A","target":"B","shapes":[[1,1],[1,1]],"rank":1,"torsion":[],"basis":[[[[2]],[[3]]]]}"#
        );
        let back: HomGroup = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert_eq!(g.summary(), "rank 1; basis [(2),(3)]");
    }

    #[test]
    fn empty_group_summary() {
        let g = HomGroup::new("A", "B", vec![(1, 1)], Lattice::zero(1)).unwrap();
        assert_eq!(g.summary(), "rank 0; basis []");
        let back: HomGroup = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }
}
