//! Numerical laboratory for tabletop quantum-gravity thought experiments.
//!
//! [`quantum`] supplies the finite-dimensional state machinery; each of the
//! remaining modules models one experiment on top of it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gedanken;
pub mod gie;
pub mod ging;
pub mod newtoncartan;
pub mod nogo;
pub mod optimize;
pub mod precursors;
pub mod quantum;
pub mod units;

pub use error::{Error, Result};
pub use units::Constants;
