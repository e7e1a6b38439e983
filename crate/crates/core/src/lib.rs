//! One-sided weighted Morrey spaces and fractional operators, numerically.
//!
//! Functions are sampled on uniform grids ([`grid`]); suprema over windows,
//! triples and levels are taken over grid-aligned candidates so every reported
//! maximum comes with the configuration that attains it.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abel;
pub mod error;
pub mod fde;
pub mod grid;
pub mod morrey;
pub mod operators;
mod par;
pub mod quad;
pub mod report;
pub mod special;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{Antiderivative, Grid1D, Interval, SampledFunction};
