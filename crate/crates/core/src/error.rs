use thiserror::Error;

use crate::algebra::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid algebra `{name}`: {}", format_violations(.violations))]
    InvalidAlgebra {
        name: String,
        violations: Vec<Violation>,
    },

    #[error("algebra `{0}` is not strict elementary")]
    NotStrict(String),

    #[error("algebras `{0}` and `{1}` do not share a partition (n = {2} vs {3})")]
    PartitionMismatch(String, String, usize, usize),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("tuple is not a member of the hom group: {0}")]
    Membership(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("undecided: {0}")]
    Undecided(String),
}

pub type Result<T> = std::result::Result<T, Error>;

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
