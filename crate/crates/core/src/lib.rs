//! Exact computations in crossed products `C(X) ⋊ G` of finite group actions
//! on finite sets: normalizer calculus relative to `C(X)`, dynamical
//! subequivalence with witness search, witness compilation into
//! r-normalizers, castle order zero maps, and the type semigroup.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::needless_range_loop)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod algebra;
pub mod castles;
pub mod comparison;
pub mod dynsys;
pub mod error;
pub mod linalg;
pub mod normalizers;
pub mod pointset;
pub mod scalar;
pub mod witness;

pub use algebra::{CrossedElement, Func, MatrixElement};
pub use dynsys::{DynSystem, FiniteGroup, GroupElem, InvariantMeasure, Point};
pub use castles::{Castle, CastleOzmData, OrderZeroMap, Tower};
pub use comparison::{DiagTuple, Witness, WitnessPiece};
pub use error::{AlgebraError, CastleError, ComparisonError, NormalizerError, StructureError, WitnessError};
pub use pointset::PointSet;
pub use scalar::{GaussQ, RadScalar, Rational};
pub use witness::CompiledWitness;
