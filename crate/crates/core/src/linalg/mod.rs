//! Dense matrix primitives and SVD-derived quantities.

mod index;
mod matrix;
mod svd;

pub use index::{intersection, submatrix, Axis, IndexSet};
pub use matrix::DenseMatrix;
pub use svd::{
    compact_svd, condition_number, default_tolerance, numerical_rank, pseudoinverse, rank_tolerance, singular_values,
    spectral_norm, stable_rank, stable_rank_sandwich, StableRankSandwich, SvdFactors,
};
