//! Gaussian-state model of single-pass squeezing with balanced homodyne
//! detection, together with the loss-budget analysis used to read squeezing
//! measurements, a truncated Fock-space reference model, and a small netlist
//! language describing the photonic circuit.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front-end live in the `sqzsim` crate.

#![no_std]
// `!(x >= 0.0)` style checks are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod budget;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod homodyne;
pub mod netlist;
pub mod units;

pub use error::{Error, Result};
pub use fock::FockState;
pub use gaussian::{GaussianChannel, GaussianState};
