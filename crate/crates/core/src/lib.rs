//! Exact CUR decompositions of low-rank matrices.
//!
//! A rank-`k` matrix `A` is reproduced exactly as `C U⁺ R`, where `C` and `R`
//! are actual columns and rows of `A` and `U` is their intersection, as soon
//! as `rank(U) = rank(A)`. This crate provides the pieces needed to find such
//! index sets and to check them:
//!
//! - [`linalg`]: dense matrices, a deterministic Jacobi SVD, pseudoinverses,
//!   stable rank and condition numbers.
//! - [`sampling`]: uniform, length and leverage distributions, weighted draws
//!   with replacement, and the sample-size and stability-floor formulas.
//! - [`cur`]: factor construction, the five-way exactness characterization,
//!   and the randomized pipeline.
//! - [`deim`]: deterministic index selection by discrete empirical
//!   interpolation and its noise certificate.
//! - [`cluster`]: union-of-subspaces data and CUR-based subspace clustering.
//! - [`synth`] and [`rng`]: seeded test-matrix generators and stream derivation.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cluster;
pub mod cur;
pub mod deim;
mod error;
pub mod linalg;
mod math;
pub mod rng;
pub mod sampling;
pub mod synth;

pub use error::{Error, Result};
pub use linalg::{Axis, DenseMatrix, IndexSet, SvdFactors};
