use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use sheafkit::algebra::ElementaryAlgebra;
use sheafkit::etheory::{HomTuple, InductiveSystem};

use crate::Failure;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

/// Parses and fully validates an algebra file.
pub fn algebra(path: &Path) -> Result<ElementaryAlgebra, Failure> {
    let a: ElementaryAlgebra = read_json(path)?;
    a.check()
        .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    Ok(a)
}

/// Tuple files may leave out `from` and `to`; they are filled in from the
/// algebras the tuple is used with.
pub fn tuple(path: &Path, from: &ElementaryAlgebra, to: &ElementaryAlgebra) -> Result<HomTuple, Failure> {
    let mut t: HomTuple = read_json(path)?;
    if t.from.is_empty() {
        t.from = from.name.clone();
    }
    if t.to.is_empty() {
        t.to = to.name.clone();
    }
    Ok(t)
}

/// `{"stages_a", "maps_a", "stages_b", "maps_b", "alpha"}`
#[derive(Deserialize)]
pub struct Scenario {
    pub stages_a: Vec<ElementaryAlgebra>,
    pub maps_a: Vec<HomTuple>,
    pub stages_b: Vec<ElementaryAlgebra>,
    pub maps_b: Vec<HomTuple>,
    pub alpha: HomTuple,
}

impl Scenario {
    pub fn systems(self) -> Result<(InductiveSystem, InductiveSystem, HomTuple), Failure> {
        for s in self.stages_a.iter().chain(&self.stages_b) {
            s.check().map_err(|e| Failure::Validation(e.to_string()))?;
        }
        let a = InductiveSystem {
            stages: self.stages_a,
            maps: self.maps_a,
        };
        let b = InductiveSystem {
            stages: self.stages_b,
            maps: self.maps_b,
        };
        Ok((a, b, self.alpha))
    }
}
