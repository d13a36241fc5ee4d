//! Exact computations on bi-invariant weights over finite rings: unit orbits,
//! ideal lattices and Möbius functions, orthogonality matrices, the Extension
//! Property criterion for principal ideal rings, and an exhaustive oracle.
//!
//! All arithmetic on weights is exact (arbitrary-precision rationals).

pub mod ideal;
pub mod linalg;
pub mod oracle;
pub mod orthogonality;
pub mod rational;
pub mod ring;
pub mod weight;

pub use ideal::{all_ideals, annihilator, classify_ring, principal_ideals, socle, Classification, Ideal, IdealLattice, Side};
pub use oracle::{
    build_counterexample, is_extendable, null_vector_integer, oracle_extension_property, CounterexamplePair, LinearCode,
    MonomialMap, OracleConfig, OracleReport,
};
pub use orthogonality::{CriterionVerdict, MatrixKind, OrthMatrix, OrthogonalityContext};
pub use rational::Rational;
pub use ring::{build_ring, FiniteRing, RingConfig, RingElement, RingSpec};
pub use weight::{builtin_weight, make_weight, BuiltinWeight, Weight, WeightSpec};

/// Any library failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Ring(#[from] ring::RingError),
    #[error(transparent)]
    Ideal(#[from] ideal::IdealError),
    #[error(transparent)]
    Weight(#[from] weight::WeightError),
    #[error(transparent)]
    Orth(#[from] orthogonality::OrthError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
}
