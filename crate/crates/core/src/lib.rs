//! Exact computer-algebra kernel for checking quantum-group identities in the
//! cluster-variety parametrization of `SL_q(N)`.
//!
//! Everything is computed symbolically over the field of rational functions of
//! `v = q^{1/2}` with arbitrary-precision rational coefficients. The main
//! pieces are:
//!
//! - [`scalar`]: the coefficient field `Q(v)` plus q-integers, q-factorials
//!   and q-binomials;
//! - [`torus`]: the quantum torus of dual-algebra coordinates, i.e. normal
//!   ordered Laurent monomials in named variables with `z_a z_b = q^{w_ab} z_b z_a`;
//! - [`series`]: degree-truncated skew power series in `psi`, `chi` with the
//!   group-like generator `Q = q^{phi/2}`, including q-exponentials and
//!   inversion of unit-plus-nilpotent elements;
//! - [`matrix`]: dense square matrices over a pluggable coefficient ring, with
//!   ordered Kronecker products and matrix q-exponentials;
//! - [`repr`]: Chevalley generator matrices for `U_q(sl_N)` (fundamental,
//!   symmetric and truncated lowest-weight representations) and their twists;
//! - [`group`]: cluster seeds, building blocks, group elements, the factorized
//!   coproduct and the 2n-dimensional symplectic leaf;
//! - [`mutation`]: the quantum-mutation identity checker over an integer
//!   Laurent-polynomial fast path;
//! - [`hyper`]: floating-point evaluation of the hypergeometric corollary of
//!   the mutation identity at q = 1;
//! - [`verify`]: the executable checks, each producing a [`verify::VerificationReport`].

pub mod error;
pub mod group;
pub mod hyper;
pub mod matrix;
pub mod mutation;
pub mod repr;
pub mod scalar;
pub mod series;
pub mod torus;
pub mod verify;

pub use error::QcvError;
pub use scalar::{q_binomial, q_factorial, q_int, BigRational, LaurentPoly, QScalar};
pub use verify::{Status, VerificationReport};
