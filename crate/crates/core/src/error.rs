use thiserror::Error;

use crate::exactlinalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),
    #[error("relation is not antisymmetric: {0:?} and {1:?}")]
    NotAntisymmetric(String, String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("structure maps are not functorial: {0}")]
    NotFunctorial(String),
    #[error("components do not commute with structure maps: {0}")]
    NotAMorphism(String),
    #[error("differentials do not square to zero in degree {0}")]
    NotAComplex(i64),
    #[error("objects live over different posets or fields")]
    Mismatch,
    #[error("subset is not {0}")]
    BadSubset(&'static str),
    #[error("realization: {0}")]
    Realization(String),
    #[error("staggered operations need a compatibility certificate")]
    NotCertified,
    #[error("recursion fuel exhausted after {0} steps")]
    FuelExhausted(usize),
    #[error("object is not in the staggered heart")]
    NotInHeart,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
