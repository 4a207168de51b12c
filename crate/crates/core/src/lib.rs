//! Exact Khovanov homology of braid closures.
//!
//! The pipeline is [`diagram`] (words and their resolutions) → [`cube`]
//! (cube of resolutions and bigraded differentials) → [`homology`]
//! (integral homology by Smith normal form, [`zalgebra`]) →
//! [`invariants`] (Poincaré and Jones polynomials, diagonals). [`verify`]
//! runs the torus-knot stability and thickness checks and [`cli`] is the
//! command-line front end.

pub mod cli;
pub mod cube;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod invariants;
pub mod verify;
pub mod zalgebra;

pub use diagram::{parse_word, torus_word, Word};
pub use error::{Error, Result};
pub use homology::{homology, homology_unnormalized, normalize, AbGroup, BigradedTable, HomologyOptions};

/// Arbitrary-precision integers used by the engine.
pub type Int = num_bigint::BigInt;
/// Exact rationals used for rank, kernel and image computations.
pub type Rational = num_rational::BigRational;
/// Sparse integer matrix.
pub type IntMat = zalgebra::SparseMat<Int>;
/// Sparse rational matrix.
pub type RatMat = zalgebra::SparseMat<Rational>;
/// Smith normal form over the engine integers.
pub type IntSnf = zalgebra::SnfResult<Int>;

pub use invariants::{Poly1, Poly2};

/// Engine version, part of every cache key.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
