//! Simulation of OU, fractional OU and fractional GLE velocity processes by
//! a wavelet refinement cascade, with exact Gaussian baselines and the
//! statistics used to compare them.

// NaN-rejecting `!(x > 0.0)` checks and full-precision quadrature nodes are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cascade;
pub mod error;
pub mod exact;
pub mod inference;
pub mod models;
pub mod quadrature;
pub mod spectra;
pub mod wavelets;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
