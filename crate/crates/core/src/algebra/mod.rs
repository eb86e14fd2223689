//! Exact crossed-product algebra `C(X) ⋊ G` and its matrix amplifications.

pub mod element;
pub mod func;
pub mod rep;

pub use element::{adjoint, cond_expectation, multiply, CrossedElement, MatrixElement};
pub use func::{open_support, pos_cutdown, Func};
pub use rep::{
    matrix_operator_norm, operator_norm, orbit_block_decomposition, regular_rep, regular_rep_exact, ExactMatrix,
    NormMode, NormReport,
};
