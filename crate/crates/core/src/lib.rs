//! Exact counting of torsion elements and Fuchsian group representations in
//! `GL_n(q)`.
//!
//! The crate is organised around the objects that appear when one counts
//! homomorphisms from a cocompact Fuchsian group into a finite general linear
//! group:
//!
//! - [`signature`]: the signature `(g; a_1, ..., a_r)` and the quantities
//!   derived from it (Euler characteristic, period lcm, parity sign).
//! - [`torsion`]: exact counts of `x` with `x^a = 1` by determinant, and of
//!   determinant-one torsion tuples, plus a brute-force matrix oracle.
//! - [`modforms`]: Puiseux series, eta products, lattice-coset theta series
//!   and the asymptotic predictions built from them.
//! - [`hurwitz`]: character tables and character-sum homomorphism counts,
//!   cross-checked against direct enumeration.
//! - [`dimension`]: centralizer-dimension minima and the representation
//!   variety dimension.
//! - [`verifier`]: exact-rational branch and bound for the inequalities that
//!   single out the exceptional signatures.
//!
//! Shared numeric machinery lives in [`arith`].

pub mod arith;
pub mod dimension;
pub mod error;
pub mod hurwitz;
pub mod modforms;
pub mod signature;
pub mod torsion;
pub mod verifier;

pub use error::{Error, Result};
pub use signature::FuchsianSignature;
