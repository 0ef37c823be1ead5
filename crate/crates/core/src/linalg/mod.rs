//! Exact integer linear algebra.

mod group;
mod lattice;
mod matrix;
mod normal_form;

pub use group::{cokernel, cokernel_presentation, CokernelPresentation, FgAbGroup};
pub use lattice::{image, kernel_basis, lattices_equal, preimage, quotient, solve_linear, Lattice, Solution};
pub use matrix::{is_zero_vec, vec_from_i64, IntMatrix};
pub use normal_form::{
    hermite_normal_form, hnf_rank, inverse_unimodular, rational_rank, smith_diagonal,
    smith_normal_form,
};
