//! Exact arithmetic for deciding whether a quadratic lattice over the ring of
//! integers of a real quadratic field `F` can become universal over a totally
//! real quadratic extension `K = F(√Δ)`.
//!
//! All decisions are made with integer arithmetic. Floating point only ever
//! produces search ranges, which are padded outward and followed by exact
//! filters.
//!
//! Every numeric type is generic over an integer [`Scalar`]; the aliases at
//! the crate root fix it to [`Int`] (`i128`) for ordinary use. Overflow checks
//! are on in every build profile, so a result that would not fit panics
//! instead of being wrong, and the `Big*` aliases are available for inputs
//! that need them.

pub mod classify;
pub mod data;
pub mod error;
pub mod exactfield;
pub mod indecomp;
pub mod interval;
pub mod relquartic;
pub mod reptest;
pub mod scalar;
pub mod sqrtext;
pub mod surd;

use num_bigint::BigInt;

pub use error::{Error, Result};
pub use exactfield::{make_field, Emb, QElem, Quad, QuadField};
pub use relquartic::{make_order, KElem, RelOrder};
pub use reptest::{f_representable, RepWitness};
pub use scalar::Scalar;
pub use surd::{BiSurd, Surd};

/// Default coordinate type.
pub type Int = i128;

pub type BigField = QuadField<BigInt>;
pub type BigQuad = Quad<BigInt>;
pub type BigOrder = RelOrder<BigInt>;
pub type BigKElem = KElem<BigInt>;
