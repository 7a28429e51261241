//! Finite-precision calculus for Lubin-Tate formal groups and their
//! (phi, Gamma)-modules over truncated Robba rings.
//!
//! Everything here is `no_std` with `alloc`. IO, JSON and the command line
//! live in the companion `ltphi` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod error;
pub mod fourier;
pub mod herr;
pub mod linalg;
pub mod lt;
pub mod module;
pub mod series;

pub use arith::{Coefficient, CoeffRing, Field, FieldSpec, Q, Ring, Scalar};
pub use error::{Error, Result};
pub use series::{GaussValuation, Interval, LaurentSeries, Window};

