//! Inverse sequences `G_0 <- G_1 <- G_2 <- ...` of free abelian groups.
//!
//! A tower is either finite and continued by identities after its last stage,
//! or a single self-map iterated forever. The limit is computed as a lattice
//! solve; `lim^1` is only ever reported as vanishing or not.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FgAbGroup, IntMatrix, Lattice};

/// Upper bound on the image iterations for an iterated self-map.
const MAX_ITERATIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    /// Free ranks `r_0, ..., r_m`.
    pub ranks: Vec<usize>,
    /// `f_k: Z^{r_k} -> Z^{r_{k-1}}` for `k = 1..=m`, stored as `maps[k - 1]`.
    pub maps: Vec<IntMatrix>,
    #[serde(default)]
    pub iterated_self_map: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lim1Status {
    Zero,
    NonzeroUncountable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseLimit {
    pub group: FgAbGroup,
    /// `projections[k]` maps the limit (in the coordinates of `group`) to
    /// stage `k`.
    pub projections: Vec<IntMatrix>,
}

impl Tower {
    /// Finite tower continued by identities.
    pub fn new(ranks: Vec<usize>, maps: Vec<IntMatrix>) -> Result<Self> {
        let t = Self {
            ranks,
            maps,
            iterated_self_map: false,
        };
        t.validate()?;
        Ok(t)
    }

    /// `Z^r <-f Z^r <-f ...`
    pub fn iterated(f: IntMatrix) -> Result<Self> {
        let t = Self {
            ranks: vec![f.rows()],
            maps: vec![f],
            iterated_self_map: true,
        };
        t.validate()?;
        Ok(t)
    }

    /// Tower with prescribed stage groups; stages with torsion are rejected.
    pub fn from_stage_groups(stages: &[FgAbGroup], maps: Vec<IntMatrix>) -> Result<Self> {
        if let Some((k, g)) = stages.iter().enumerate().find(|(_, g)| !g.is_free()) {
            return Err(Error::Unsupported(format!(
                "tower stage {k} is {g}; only free stages are supported"
            )));
        }
        Self::new(stages.iter().map(FgAbGroup::free_rank).collect(), maps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() {
            return Err(Error::Dimension("tower has no stages".into()));
        }
        if self.iterated_self_map {
            let r = self.ranks[0];
            if self.ranks.len() != 1 || self.maps.len() != 1 || self.maps[0].shape() != (r, r) {
                return Err(Error::Dimension(
                    "an iterated self-map tower needs one rank and one square map of that rank"
                        .into(),
                ));
            }
            return Ok(());
        }
        if self.maps.len() + 1 != self.ranks.len() {
            return Err(Error::Dimension(format!(
                "{} stages need {} maps, found {}",
                self.ranks.len(),
                self.ranks.len() - 1,
                self.maps.len()
            )));
        }
        for (k, f) in self.maps.iter().enumerate() {
            let want = (self.ranks[k], self.ranks[k + 1]);
            if f.shape() != want {
                return Err(Error::Dimension(format!(
                    "map f_{} should be {}x{}, found {}x{}",
                    k + 1,
                    want.0,
                    want.1,
                    f.rows(),
                    f.cols()
                )));
            }
        }
        Ok(())
    }

    pub fn last_stage(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Successive images `im(f^j)` for an iterated self-map, stopping at the
    /// first repetition. `Ok(true)` when the images stabilize.
    fn self_map_stabilizes(&self) -> Result<(bool, Lattice)> {
        let f = &self.maps[0];
        let r = self.ranks[0];
        let mut power = IntMatrix::identity(r);
        let mut current = Lattice::full(r);
        for _ in 0..MAX_ITERATIONS {
            power = f * &power;
            let next = Lattice::from_generators(&power);
            if next == current {
                return Ok((true, current));
            }
            // Once the rank stops dropping, f is injective on the image and
            // maps it onto a proper sublattice of the same index forever.
            if next.rank() == current.rank() {
                return Ok((false, next));
            }
            current = next;
        }
        Err(Error::Undecided(format!(
            "image chain did not settle within {MAX_ITERATIONS} iterations"
        )))
    }

    pub fn mittag_leffler(&self) -> Result<bool> {
        self.validate()?;
        if !self.iterated_self_map {
            return Ok(true);
        }
        Ok(self.self_map_stabilizes()?.0)
    }

    pub fn lim1_status(&self) -> Result<Lim1Status> {
        Ok(if self.mittag_leffler()? {
            Lim1Status::Zero
        } else {
            Lim1Status::NonzeroUncountable
        })
    }

    /// `lim G_k` with its projections to the stages.
    ///
    /// For an iterated self-map only the Mittag-Leffler case is supported;
    /// there the limit is the stable image `S`, on which `f` is invertible,
    /// and a single projection (to stage 0) is returned.
    pub fn inverse_limit(&self) -> Result<InverseLimit> {
        self.validate()?;
        if self.iterated_self_map {
            let (ml, stable) = self.self_map_stabilizes()?;
            if !ml {
                return Err(Error::Unsupported(
                    "limit of a non-Mittag-Leffler iterated self-map".into(),
                ));
            }
            return Ok(InverseLimit {
                group: FgAbGroup::free(stable.rank()),
                projections: vec![stable.basis().clone()],
            });
        }
        // The limit is {(g_0, ..., g_m) : g_{k-1} = f_k g_k} ≅ G_m.
        let m = self.last_stage();
        let mut projections = vec![IntMatrix::identity(self.ranks[m])];
        for k in (0..m).rev() {
            let next = &self.maps[k] * projections.last().unwrap();
            projections.push(next);
        }
        projections.reverse();
        Ok(InverseLimit {
            group: FgAbGroup::free(self.ranks[m]),
            projections,
        })
    }

    /// With `lim^1 = 0` the short exact sequence collapses to
    /// `middle ≅ lim`; this checks that isomorphism.
    pub fn skyscraper_ses_check(&self, middle: &FgAbGroup) -> Result<bool> {
        if self.lim1_status()? != Lim1Status::Zero {
            return Err(Error::Unsupported(
                "lim^1 is nonzero, so the middle term is not finitely presented".into(),
            ));
        }
        Ok(&self.inverse_limit()?.group == middle)
    }
}
