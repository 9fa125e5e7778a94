//! Exact constructive machinery for representing positive rationals through
//! Euler's totient function.
//!
//! Everything here is exact arbitrary-precision arithmetic: integers are
//! [`num_bigint::BigUint`], factored integers are [`arith::Factorization`],
//! and positive rationals live as signed exponent vectors over primes
//! ([`arith::ExponentVector`]). No floating point appears anywhere.
//!
//! The two witness constructors are [`thm1`] (targets of the shape
//! `phi(m^2) / phi(n^2)^b` for odd `b > 1`, plus the generalized
//! `phi(m^r)^a / phi(n^s)^b` engine) and [`thm2`] (targets of the shape
//! `phi(k(m^2-1)) / phi(l n^2)`). [`classifier`] decides which exponent
//! quadruples `(a, b, r, s)` admit such representations, and [`search`]
//! runs bounded experimental scans for the open shapes.

pub mod arith;
pub mod classifier;
pub mod config;
pub mod error;
pub mod pell;
pub mod primes;
pub mod search;
pub(crate) mod ser;
pub mod thm1;
pub mod thm2;
pub mod witness;

pub use arith::{factorize, ExponentVector, Factorization, Rational};
pub use config::Config;
pub use error::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
