//! Long-time asymptotics of the one- and two-dimensional heat equation for
//! initial data with power-law tails.
//!
//! * [`specfun`]: normalised error function, Gaussian half-line moments,
//!   Hermite-type kernels and the incomplete integrals `J_n`, `K_n`.
//! * [`initial_data`]: profiles, tail coefficients, regularised moments.
//! * [`oracle`]: reference solutions by adaptive quadrature of the heat kernel.
//! * [`expansion`]: coefficient tables, partial sums and coefficient extraction.
//! * [`verify`]: decay-rate certificates, recurrence checks, symmetry checks.

// Comparisons are written `!(x <= bound)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod initial_data;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;
