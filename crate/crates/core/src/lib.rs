//! Exact Birkhoff-sum machinery for hyperbolic automorphisms of the 2-torus.
//!
//! Everything geometric lives in a single real quadratic field `Q(sqrt(D))`
//! determined by the system matrix, so eigenvalues, eigen-directions,
//! heteroclinic points and shadowing corrections are all exact. Floating
//! quantities only appear as rigorous enclosures ([`Interval`]) or as
//! rounded-up planning bounds.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and certificate serialization live in `birkhoff-cli`.
//!
//! Module map:
//!
//! - [`algebra`]: rationals, `QuadExt`, 2x2 integer matrices, eigen data,
//!   dyadic intervals and rigorous `cos`/`sin`.
//! - [`torus`]: points, lifts, metric, orbits and periodic-point enumeration.
//! - [`observable`]: trigonometric-polynomial observables and Birkhoff sums.
//! - [`heteroclinic`]: invariant lines and heteroclinic pairs.
//! - [`shadowing`]: the four-segment periodic pseudo-orbit and its exact shadow.
//! - [`diophantine`]: lattice gaps, Bezout families and the combination search.
//! - [`targeter`]: the end-to-end target-hitting pipeline, density scans and
//!   certificate replay.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod diophantine;
mod error;
pub mod heteroclinic;
pub mod observable;
pub mod shadowing;
pub mod targeter;
pub mod torus;

pub use algebra::{
    eigen_data, lowest_terms, mat_pow, BigRat, EigenData, Enclose, IntMat2, Interval, QuadExt,
};
pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;
