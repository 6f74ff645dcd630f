use thiserror::Error;

/// Errors produced by group computations, Burnside-ring arithmetic and the
/// equivariant network routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("permutation degrees differ: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("degree-0 permutations are not supported")]
    ZeroDegree,
    #[error("group order exceeds cap of {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("group order {order} exceeds lattice cap of {cap}")]
    LatticeCapExceeded { order: usize, cap: usize },
    #[error("explicit G-set of {points} points exceeds cap of {cap}")]
    SizeCapExceeded { points: u128, cap: usize },
    #[error("point {point} out of range for {count} points")]
    PointOutOfRange { point: usize, count: usize },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("generator images do not define a homomorphism")]
    NotAHomomorphism,
    #[error("actions belong to different groups")]
    GroupMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch for {what}: expected {expected}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mark vector does not decompose integrally at class {class}")]
    NonIntegralDecomposition { class: usize },
    #[error("mark vector decomposes with negative multiplicity at class {class}")]
    NegativeMultiplicity { class: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("coset action of class {class} is not faithful")]
    UnfaithfulAction { class: usize },
    #[error("input action is not faithful")]
    UnfaithfulInput,
    #[error("stabilizer not found in subgroup lattice")]
    StabilizerNotInLattice,
    #[error("argument out of range: {0}")]
    RangeError(String),
    #[error("action is not transitive")]
    NotTransitive,
    #[error("target is not equivariant (deviation {deviation:e})")]
    TargetNotEquivariant { deviation: f64 },
    #[error("class index {index} out of range for {count} classes")]
    ClassOutOfRange { index: usize, count: usize },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
