//! Exact-arithmetic toolkit for schematic finite spaces over prime fields.
//!
//! A ringed finite poset carries a finite-dimensional commutative F_p-algebra
//! at every point and a ring homomorphism along every Hasse edge. On top of
//! that data this crate implements the structural predicates (finite,
//! quasi-coherent, schematic, affine, qc-isomorphism), sheaf cohomology via
//! the standard resolution, pw-connectification, schematic and geometric
//! points, etale cover sheaves with their fiber functor, and an executable
//! verification of the Galois-category axioms for the category of covers.
//!
//! All arithmetic is exact linear algebra mod p; there are no floats and no
//! randomness anywhere in the library proper.

pub mod algebra;
pub mod etale;
pub mod linalg;
pub mod points;
pub mod poly;
pub mod poset;
pub mod pwconn;
pub mod rspace;
pub mod workspace;

use thiserror::Error;

/// Errors shared across the crate; variant names follow the operation
/// contracts they guard.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("multiplication table is not commutative at ({0}, {1})")]
    NotCommutative(usize, usize),
    #[error("multiplication table is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("declared unit is not a unit: {0}")]
    BadUnit(String),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("map does not send unit to unit")]
    NotUnital,
    #[error("map is not multiplicative on basis pair ({0}, {1})")]
    NotMultiplicative(usize, usize),
    #[error("problem size exceeds the exact-enumeration bound: {0}")]
    SizeBound(String),
    #[error("ideal is not prime in this algebra")]
    NotPrime,
    #[error("algebra is not etale over the given base")]
    NotEtale,
    #[error("finite-field tower too small: need degree {needed}, have {available}")]
    TowerTooSmall { needed: usize, available: usize },
    #[error("unknown point: {0}")]
    UnknownPoint(String),
    #[error("subset is not open (not up-closed): misses {0}")]
    NotOpen(String),
    #[error("space is not a finite space (non-flat restriction at {0})")]
    NotFiniteSpace(String),
    #[error("space is not schematic: {0}")]
    NotSchematic(String),
    #[error("morphism is not schematic: {0}")]
    NotSchematicMorphism(String),
    #[error("sheaf is not quasi-coherent: {0}")]
    NotQcoh(String),
    #[error("space is not well-connected")]
    NotWellConnected,
    #[error("space is not pw-connected")]
    NotPwConnected,
    #[error("set of automorphisms is not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("space is not connected")]
    NotConnected,
    #[error("stalks do not share one characteristic: {0}")]
    MixedCharacteristic(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
