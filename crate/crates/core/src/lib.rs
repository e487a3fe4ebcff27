//! Exact-arithmetic invariants of quadratic and multiquadratic number fields,
//! and the 2-class field tower predictions built on them for the layers
//! `K_n = Q(zeta_{2^{n+2}}, sqrt(d))` of the cyclotomic Z2-extension.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: Jacobi symbols, squares, factorization, prime representations.
//! * [`quadratic`]: fundamental units and wide/narrow class numbers of `Q(sqrt(d))`.
//! * [`unit_lattice`]: exact multiquadratic field arithmetic, unit indices, Hasse's unit index.
//! * [`kuroda`]: the multiquadratic class number formula on 2-parts.
//! * [`iwasawa`]: splitting counts, Kida's formula, genus-field growth.
//! * [`tower`]: classification of `d` and the structure predictions.
//! * [`harness`]: prime-range scans, the class-number cache and report rendering.

pub mod arith;
pub mod error;
pub mod harness;
pub mod iwasawa;
pub mod kuroda;
pub mod quadratic;
pub mod tower;
pub mod unit_lattice;

mod serde_dec;

pub use error::{Error, Result};
