//! Experiment harness, Matrix Market IO and command-line front end for
//! [`cur_core`].
//!
//! Everything that touches files, clocks or threads lives here; the numerical
//! work is delegated to the `no_std` core.

// `!(x >= 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
mod error;
pub mod experiment;
pub mod mtx;
pub mod report;

pub use error::LabError;
