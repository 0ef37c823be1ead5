use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::hom::{check_member, relation_matrix, require_common_partition, require_strict, tuple_shapes};
use super::morphisms::{identity, is_isomorphism};
use super::tuple::{vector_len, HomGroup, HomTuple};
use crate::algebra::ElementaryAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, IntMatrix};

/// `L_k·X_k·R_k = C_k` on every segment `k`, for an unknown tuple `X`.
#[derive(Clone, Debug)]
pub struct TupleEquation {
    pub left: Vec<IntMatrix>,
    pub right: Vec<IntMatrix>,
    pub rhs: Vec<IntMatrix>,
}

impl TupleEquation {
    /// `L·X = C`
    pub fn left(l: &HomTuple, c: &HomTuple) -> Self {
        let right = l.betas.iter().zip(&c.betas).map(|(_, c)| IntMatrix::identity(c.cols())).collect();
        Self {
            left: l.betas.clone(),
            right,
            rhs: c.betas.clone(),
        }
    }

    /// `X·R = C`
    pub fn right(r: &HomTuple, c: &HomTuple) -> Self {
        let left = r.betas.iter().zip(&c.betas).map(|(_, c)| IntMatrix::identity(c.rows())).collect();
        Self {
            left,
            right: r.betas.clone(),
            rhs: c.betas.clone(),
        }
    }
}

/// All solutions `particular + kernel`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleSolution {
    pub particular: HomTuple,
    pub kernel: HomGroup,
}

/// Tuples `X ∈ hom(A, B)` satisfying every equation; `None` if there are none.
pub fn solve_tuple_system(
    a: &ElementaryAlgebra,
    b: &ElementaryAlgebra,
    equations: &[TupleEquation],
) -> Result<Option<TupleSolution>> {
    require_common_partition(a, b)?;
    require_strict(b)?;
    let segments: Vec<usize> = (1..=a.n + 1).collect();
    let shapes = tuple_shapes(a, b, &segments);
    let relations = relation_matrix(a, b, &segments, &(1..=a.n).collect::<Vec<_>>())?;
    let cols = vector_len(&shapes);
    let mut blocks = vec![relations.clone()];
    let mut rhs: Vec<BigInt> = vec![BigInt::from(0); relations.rows()];
    for eq in equations {
        if eq.left.len() != shapes.len() || eq.right.len() != shapes.len() || eq.rhs.len() != shapes.len() {
            return Err(Error::Dimension("equation does not cover every segment".into()));
        }
        let mut off = 0;
        for (k, &(r, c)) in shapes.iter().enumerate() {
            let (l, rr, cc) = (&eq.left[k], &eq.right[k], &eq.rhs[k]);
            if l.cols() != r || rr.rows() != c || cc.shape() != (l.rows(), rr.cols()) {
                return Err(Error::Dimension(format!(
                    "segment {}: equation shapes do not fit an unknown of shape {r}x{c}",
                    k + 1
                )));
            }
            let mut row = IntMatrix::zeros(cc.rows() * cc.cols(), cols);
            row.paste(0, off, &rr.transpose().kron(l));
            blocks.push(row);
            rhs.extend(cc.vectorize());
            off += r * c;
        }
    }
    let refs: Vec<&IntMatrix> = blocks.iter().collect();
    let system = IntMatrix::vstack(&refs)?;
    let Some(sol) = solve_linear(&system, &rhs)? else {
        return Ok(None);
    };
    let particular = HomTuple::from_vector(&a.name, &b.name, &shapes, &sol.particular)?;
    let kernel = HomGroup::new(&a.name, &b.name, shapes, sol.homogeneous)?;
    Ok(Some(TupleSolution { particular, kernel }))
}

/// All `μ ∈ hom(A, Bsmall)` with `ψ∘μ = α`, or `None`.
pub fn factor(
    a: &ElementaryAlgebra,
    b_small: &ElementaryAlgebra,
    b_big: &ElementaryAlgebra,
    psi: &HomTuple,
    alpha: &HomTuple,
) -> Result<Option<TupleSolution>> {
    require_common_partition(a, b_small)?;
    require_common_partition(b_small, b_big)?;
    check_member(b_small, b_big, psi)?;
    check_member(a, b_big, alpha)?;
    solve_tuple_system(a, b_small, &[TupleEquation::left(psi, alpha)])
}

/// `second∘first`, segment by segment, without membership checks.
fn then(first: &HomTuple, second: &HomTuple) -> HomTuple {
    let betas = first.betas.iter().zip(&second.betas).map(|(x, y)| y * x).collect();
    HomTuple::new(&first.from, &second.to, betas)
}

/// `A_1 -> A_2 -> ... -> A_m`, continued by identities after `A_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductiveSystem {
    pub stages: Vec<ElementaryAlgebra>,
    /// `maps[k - 1]: A_k -> A_{k+1}`.
    pub maps: Vec<HomTuple>,
}

impl InductiveSystem {
    pub fn validate(&self) -> Result<()> {
        if self.stages.is_empty() {
            return Err(Error::Dimension("inductive system has no stages".into()));
        }
        if self.maps.len() + 1 != self.stages.len() {
            return Err(Error::Dimension(format!(
                "{} stages need {} maps, found {}",
                self.stages.len(),
                self.stages.len() - 1,
                self.maps.len()
            )));
        }
        for (k, f) in self.maps.iter().enumerate() {
            check_member(&self.stages[k], &self.stages[k + 1], f)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// `φ_{k,m}: A_k -> A_m` for the last stage `m`, 1-based `k`.
    pub fn to_last(&self, k: usize) -> Result<HomTuple> {
        let m = self.len();
        let mut acc = identity(&self.stages[k - 1])?;
        for j in k..m {
            acc = then(&acc, &self.maps[j - 1]);
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZigzagStep {
    /// `μ_k: A_k -> B_k`
    Mu,
    /// `η_k: B_k -> A_{k+1}`
    Eta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZigzagFailure {
    pub stage: usize,
    pub step: ZigzagStep,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZigzagReport {
    pub mus: Vec<HomTuple>,
    pub etas: Vec<HomTuple>,
    pub complete: bool,
    /// Every triangle and every membership rechecked after construction.
    pub verified: bool,
    pub failure: Option<ZigzagFailure>,
}

/// Back-and-forth construction of `μ_k: A_k -> B_k` and `η_k: B_k -> A_{k+1}`
/// over finite systems of equal length, with
/// `ψ_{k,m}∘μ_k = α∘φ_{k,m}`, `μ_k∘η_{k-1} = ψ_{k-1}`, `η_k∘μ_k = φ_k` and,
/// when `α` is invertible, `φ_{k+1,m}∘η_k = α^{-1}∘ψ_{k,m}`; at the last stage
/// also `α∘η_m = id`. Solutions are taken greedily.
pub fn intertwine(a: &InductiveSystem, b: &InductiveSystem, alpha: &HomTuple) -> Result<ZigzagReport> {
    a.validate()?;
    b.validate()?;
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "systems have {} and {} stages",
            a.len(),
            b.len()
        )));
    }
    let m = a.len();
    for k in 0..m {
        let (x, y) = (&a.stages[k], &b.stages[k]);
        if x.n != y.n || x.n != a.stages[0].n {
            return Err(Error::PartitionMismatch(x.name.clone(), y.name.clone(), x.n, y.n));
        }
    }
    let (a_m, b_m) = (&a.stages[m - 1], &b.stages[m - 1]);
    check_member(a_m, b_m, alpha)?;
    let alpha_inv = is_isomorphism(a_m, b_m, alpha)?;

    let mut mus: Vec<HomTuple> = Vec::new();
    let mut etas: Vec<HomTuple> = Vec::new();
    let fail = |mus, etas, stage, step, reason: &str| ZigzagReport {
        mus,
        etas,
        complete: false,
        verified: false,
        failure: Some(ZigzagFailure {
            stage,
            step,
            reason: reason.to_string(),
        }),
    };

    for k in 1..=m {
        let (ak, bk) = (&a.stages[k - 1], &b.stages[k - 1]);
        let psi_km = b.to_last(k)?;
        let phi_km = a.to_last(k)?;
        let mut eqs = vec![TupleEquation::left(&psi_km, &then(&phi_km, alpha))];
        if k > 1 {
            eqs.push(TupleEquation::right(&etas[k - 2], &b.maps[k - 2]));
        }
        let Some(mu) = solve_tuple_system(ak, bk, &eqs)? else {
            return Ok(fail(mus, etas, k, ZigzagStep::Mu, "no μ_k factors α through B_k"));
        };
        mus.push(mu.particular);

        let (next, phi_k) = if k < m {
            (&a.stages[k], a.maps[k - 1].clone())
        } else {
            (ak, identity(ak)?)
        };
        let mut eqs = vec![TupleEquation::right(&mus[k - 1], &phi_k)];
        if let Some(inv) = &alpha_inv {
            let phi_next_m = if k < m { a.to_last(k + 1)? } else { identity(ak)? };
            eqs.push(TupleEquation::left(&phi_next_m, &then(&psi_km, inv)));
        }
        if k == m {
            eqs.push(TupleEquation::left(alpha, &identity(b_m)?));
        }
        let Some(eta) = solve_tuple_system(bk, next, &eqs)? else {
            return Ok(fail(mus, etas, k, ZigzagStep::Eta, "no η_k splits the connecting map"));
        };
        etas.push(eta.particular);
    }

    let verified = verify(a, b, alpha, &mus, &etas)?;
    Ok(ZigzagReport {
        mus,
        etas,
        complete: true,
        verified,
        failure: None,
    })
}

fn verify(
    a: &InductiveSystem,
    b: &InductiveSystem,
    alpha: &HomTuple,
    mus: &[HomTuple],
    etas: &[HomTuple],
) -> Result<bool> {
    let m = a.len();
    for k in 1..=m {
        let (ak, bk) = (&a.stages[k - 1], &b.stages[k - 1]);
        let next = if k < m { &a.stages[k] } else { ak };
        if check_member(ak, bk, &mus[k - 1]).is_err() || check_member(bk, next, &etas[k - 1]).is_err() {
            return Ok(false);
        }
        let phi_k = if k < m { a.maps[k - 1].clone() } else { identity(ak)? };
        if then(&mus[k - 1], &etas[k - 1]).betas != phi_k.betas {
            return Ok(false);
        }
        if k < m && then(&etas[k - 1], &mus[k]).betas != b.maps[k - 1].betas {
            return Ok(false);
        }
        let lhs = then(&mus[k - 1], &b.to_last(k)?);
        let rhs = then(&a.to_last(k)?, alpha);
        if lhs.betas != rhs.betas {
            return Ok(false);
        }
    }
    Ok(then(&etas[m - 1], alpha).betas == identity(&b.stages[m - 1])?.betas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rank_one;

    fn m(x: i64) -> IntMatrix {
        IntMatrix::from_rows(&[[x]])
    }

    fn tuple(from: &str, to: &str, v: &[i64]) -> HomTuple {
        HomTuple::new(from, to, v.iter().map(|&x| m(x)).collect())
    }

    #[test]
    fn factor_examples() {
        let one = rank_one("E", &[1], &[1]);
        let psi = tuple("E", "E", &[2, 2]);
        let sol = factor(&one, &one, &one, &psi, &tuple("E", "E", &[2, 2])).unwrap().unwrap();
        assert_eq!(sol.particular, tuple("E", "E", &[1, 1]));
        assert_eq!(sol.kernel.rank(), 0);
        assert!(factor(&one, &one, &one, &psi, &tuple("E", "E", &[1, 1])).unwrap().is_none());

        let a = rank_one("A", &[1], &[2]);
        let b = rank_one("B", &[1], &[3]);
        let alpha = tuple("A", "B", &[2, 3]);
        let id = identity(&b).unwrap();
        let sol = factor(&a, &b, &b, &id, &alpha).unwrap().unwrap();
        assert_eq!(sol.particular, alpha);
        assert_eq!(sol.kernel.rank(), 0);
    }

    fn doubling_system(name: &str) -> InductiveSystem {
        let e = rank_one(name, &[1], &[2]);
        InductiveSystem {
            stages: vec![e.clone(), e],
            maps: vec![tuple(name, name, &[2, 2])],
        }
    }

    #[test]
    fn zigzag_with_identity() {
        let a = doubling_system("E");
        let b = doubling_system("E");
        let r = intertwine(&a, &b, &tuple("E", "E", &[1, 1])).unwrap();
        assert!(r.complete && r.verified, "{r:?}");
        assert_eq!(r.mus[0], tuple("E", "E", &[1, 1]));
        assert_eq!(r.etas[0], tuple("E", "E", &[2, 2]));
        assert_eq!(r.mus[1], tuple("E", "E", &[1, 1]));
        assert_eq!(r.etas[1], tuple("E", "E", &[1, 1]));
    }

    #[test]
    fn zigzag_constant_systems() {
        let e = rank_one("E", &[1], &[3]);
        let sys = InductiveSystem {
            stages: vec![e.clone(), e.clone(), e.clone()],
            maps: vec![identity(&e).unwrap(), identity(&e).unwrap()],
        };
        let r = intertwine(&sys, &sys, &identity(&e).unwrap()).unwrap();
        assert!(r.complete && r.verified);
        assert!(r.mus.iter().chain(&r.etas).all(|t| t.betas.iter().all(IntMatrix::is_identity)));
    }

    #[test]
    fn zigzag_single_stage() {
        let e = rank_one("E", &[1], &[2]);
        let sys = InductiveSystem { stages: vec![e.clone()], maps: vec![] };
        let alpha = tuple("E", "E", &[-1, -1]);
        let r = intertwine(&sys, &sys, &alpha).unwrap();
        assert!(r.complete && r.verified);
        assert_eq!(r.mus[0], alpha);
        assert_eq!(r.etas[0], alpha);
    }

    #[test]
    fn zigzag_failure_stage() {
        let a = doubling_system("E");
        let b = doubling_system("E");
        let r = intertwine(&a, &b, &tuple("E", "E", &[3, 3])).unwrap();
        assert!(!r.complete);
        let f = r.failure.unwrap();
        assert_eq!((f.stage, f.step), (1, ZigzagStep::Eta));
        assert_eq!(r.mus, vec![tuple("E", "E", &[3, 3])]);
    }
}
