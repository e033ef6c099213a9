//! Exact hypergeometric functions over finite fields.
//!
//! Everything is computed in exact arithmetic: field elements are table
//! indices, character values are roots of unity, and all sums live in
//! cyclotomic fields ℚ(ζ_m) with rational coefficients. The modules build
//! on each other bottom-up:
//!
//! - [`cyclo`]: exact ℚ(ζ_m) numbers on the power basis mod Φ_m,
//! - [`gf`]: finite fields GF(p^f) with deterministic modulus and generator,
//! - [`chars`]: multiplicative/additive characters and parameter multisets,
//! - [`sums`]: Gauss and Jacobi sums, Pochhammer symbols, cached tables,
//! - [`hgf`]: hypergeometric series and Appell double series evaluators,
//! - [`verify`]: an identity catalog with exhaustive/sampled checking.

pub mod chars;
pub mod cyclo;
pub mod gf;
pub mod hgf;
pub mod sums;
pub mod verify;

pub use chars::{AddChar, MultChar, ParamSet};
pub use cyclo::CycloNum;
pub use gf::{FieldElem, FiniteField};
pub use hgf::HgfSpec;
pub use sums::SumTables;
pub use verify::{IdentityId, Mode, VerificationReport};
