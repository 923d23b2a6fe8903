//! Homology-level workbench for Lefschetz fibration and pencil monodromy
//! factorizations.
//!
//! A factorization is a word in signed Dehn twists (plus point-pushes and
//! boundary twists) on a surface `Σ_{g,k}^b`. This crate tracks its action
//! on first homology and computes the invariants of the total space that
//! are visible at that level: Euler characteristic, signature (by relation
//! ledger and by the Meyer cocycle), first homology, fiber-class
//! divisibility, and spin criteria via quadratic forms over GF(2).

pub mod codec;
pub mod fixtures;
pub mod homology;
pub mod invariants;
pub mod linalg;
pub mod relations;
pub mod script;
pub mod spin;
pub mod twist;

mod error;

pub use error::{Error, Result};

/// Arbitrary-precision integer scalar used by all domain types.
pub type Int = num_bigint::BigInt;
/// Exact rational scalar used for kernels and signatures.
pub type Rational = num_rational::BigRational;

pub use homology::{AbelianGroupInvariants, CurveClass, QuadraticFormZ2, SurfaceModel};
pub use twist::{Coefficients, Direction, Factorization, SymplecticMatrix, TermKind, TwistTerm};
