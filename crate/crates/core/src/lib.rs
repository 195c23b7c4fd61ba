//! Numerical laboratory for geometric control, uncertainty principles,
//! resolvent estimates and observability costs of (fractional) Schrödinger
//! equations on the torus.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: observation fields and their line, rectangle and comb
//!   density functionals;
//! - [`covering`]: Diophantine direction machinery and effective coverings of
//!   the circle of directions;
//! - [`construct`]: one-dimensional partitions, transfer functions and smooth
//!   minorants;
//! - [`spectral`]: frequency masks, uncertainty constants and resolvent
//!   constants computed by Hermitian eigensolves;
//! - [`evolution`]: the fractional Schrödinger propagator and Gramian based
//!   observability costs.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod covering;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod spectral;

mod fft;
mod rational;

pub use error::{Error, Result};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
