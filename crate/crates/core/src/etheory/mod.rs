//! E-theory of elementary algebras over `[0, 1]`, computed from the K-theory
//! of fibers.
//!
//! Elements of `E_X(A, B)` are tuples `(β_k)` of integer matrices on the
//! segments, subject to one relation per singular point. Singular points and
//! segments are numbered from 1, as in [`crate::algebra`].

mod hom;
mod intertwine;
mod morphisms;
mod oracle;
mod skyscraper;
mod tuple;

pub use hom::{
    check_member, delta_matrices, e1_group, e_subinterval, hom, hom_sheaf, hom_sheaf_general,
    hom_sheaf_via_delta, is_member, j_index, predicted_corank, pullback_check, restrict_hom,
    PullbackReport,
};
pub use intertwine::{
    factor, intertwine, solve_tuple_system, InductiveSystem, TupleEquation, TupleSolution,
    ZigzagFailure, ZigzagReport, ZigzagStep,
};
pub use morphisms::{
    compose, gamma_realize, identity, is_isomorphism, recover_alpha, SheafMorphismRealization,
};
pub use oracle::{oracle_check, satisfies_relations, OracleReport};
pub use skyscraper::{skyscraper_e, skyscraper_e_via_tower, skyscraper_towers, Location, Neighborhood};
pub use tuple::{GradedGroup, HomGroup, HomTuple};
