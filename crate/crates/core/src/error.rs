use alloc::string::String;

use num_bigint::BigUint;
use thiserror::Error;

/// A violated group or action axiom.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("multiplication table is not square: row {row} has {len} entries, expected {expected}")]
    TableShape { row: usize, len: usize, expected: usize },
    #[error("table entry ({row}, {col}) = {value} is out of range")]
    TableEntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("group is empty")]
    EmptyGroup,
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("associativity fails for ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {element} has no inverse")]
    NoInverse { element: usize },
    #[error("action table has {rows} rows, expected {expected}")]
    ActionShape { rows: usize, expected: usize },
    #[error("action entry (g={group}, x={point}) = {value} is out of range")]
    ActionEntryOutOfRange { group: usize, point: usize, value: usize },
    #[error("identity moves point {point}")]
    IdentityMoves { point: usize },
    #[error("action is not compatible with multiplication at (g={g}, h={h}, x={point})")]
    NotCompatible { g: usize, h: usize, point: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
}

/// Errors raised by crossed-product arithmetic and the representations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("cannot add unlike radicals sqrt {left} and sqrt {right} exactly")]
    RadicalAdditionMismatch { left: BigUint, right: BigUint },
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("operands belong to different dynamical systems")]
    SystemMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value at point {point} is not a nonnegative real")]
    NotPositive { point: usize },
    #[error("element is not positive (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveElement { min_eigenvalue: f64 },
    #[error("the action is not free")]
    NotFree,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizerError {
    #[error("the action is not free")]
    NotFree,
    #[error("orthogonality hypothesis {hypothesis} fails for the pair ({i}, {j})")]
    HypothesisViolated { i: usize, j: usize, hypothesis: &'static str },
    #[error("summand {index} is not a normalizer")]
    NotNormalizer { index: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComparisonError {
    #[error("witness index out of range: {what} {index} (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },
    #[error("enumeration exceeded the budget of {budget}")]
    ResourceBound { budget: usize },
    #[error("tuple entries live on {found} points, expected {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("the action is not free")]
    NotFree,
    #[error("input is not positive: {0}")]
    NotPositive(AlgebraError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WitnessError {
    #[error("invalid witness: {0}")]
    InvalidWitness(&'static str),
    #[error("precondition failed: {0}")]
    PreconditionFailed(&'static str),
    #[error("translated supports of terms {i} and {j} overlap")]
    SupportOverlap { i: usize, j: usize },
    #[error("epsilon and delta must be positive")]
    NonPositiveParameter,
    #[error("internal invariant failed: {0}")]
    InternalInvariant(&'static str),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CastleError {
    #[error("shape is empty")]
    EmptyShape,
    #[error("invalid castle: {0}")]
    InvalidCastle(&'static str),
    #[error("invalid castle data: {0}")]
    InvalidCastleData(&'static str),
    #[error("map is not normalizer preserving")]
    NotNormalizerPreserving,
    #[error("map is not order zero")]
    NotOrderZero,
    #[error("decomposition failed: {0}")]
    DecompositionFailed(&'static str),
    #[error("the action is not free")]
    NotFree,
    #[error("search exceeded the budget of {budget}")]
    ResourceBound { budget: usize },
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
