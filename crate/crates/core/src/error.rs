use core::fmt;

use crate::linalg::Axis;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix dimensions must both be at least one.
    EmptyMatrix,
    /// Storage length does not match `rows * cols`.
    DataLength {
        expected: usize,
        found: usize,
    },
    NonFinite {
        row: usize,
        col: usize,
    },
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// All singular values are at or below the rank tolerance.
    ZeroMatrix,
    IndexOutOfRange {
        axis: Axis,
        index: usize,
        bound: usize,
    },
    EmptyIndexSet,
    RankDeficient {
        requested: usize,
        rank: usize,
    },
    ZeroProbabilityDraw {
        index: usize,
    },
    InvalidDistribution(&'static str),
    Domain(&'static str),
    NoiseDominates {
        axis: Axis,
        index: usize,
    },
    DivisionByZeroWeight {
        index: usize,
    },
    SingularInterpolation {
        step: usize,
    },
    TooManyClusters {
        clusters: usize,
    },
    FloorViolated {
        axis: Axis,
        index: usize,
    },
    /// A synthetic generator failed its rank checks on every attempt.
    GenerationFailed(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyMatrix => write!(f, "matrix must have at least one row and one column"),
            Error::DataLength { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::NonFinite { row, col } => write!(f, "non-finite entry at ({row}, {col})"),
            Error::ShapeMismatch { left, right } => {
                write!(f, "shape mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)
            }
            Error::ZeroMatrix => write!(f, "matrix is numerically zero"),
            Error::IndexOutOfRange { axis, index, bound } => {
                write!(f, "{axis} index {index} out of range (dimension {bound})")
            }
            Error::EmptyIndexSet => write!(f, "index set is empty"),
            Error::RankDeficient { requested, rank } => {
                write!(f, "requested rank {requested} exceeds numerical rank {rank}")
            }
            Error::ZeroProbabilityDraw { index } => {
                write!(f, "index {index} was drawn but has zero probability")
            }
            Error::InvalidDistribution(msg) => write!(f, "invalid distribution: {msg}"),
            Error::Domain(msg) => write!(f, "argument out of domain: {msg}"),
            Error::NoiseDominates { axis, index } => {
                write!(f, "noise dominates {axis} {index}; stability floor is not positive")
            }
            Error::DivisionByZeroWeight { index } => {
                write!(f, "reference weight at index {index} is zero where the target is positive")
            }
            Error::SingularInterpolation { step } => {
                write!(f, "interpolation system is singular at step {step}")
            }
            Error::TooManyClusters { clusters } => {
                write!(f, "{clusters} clusters exceeds the exhaustive matching limit of 8")
            }
            Error::FloorViolated { axis, index } => {
                write!(f, "stability floor does not hold for {axis} {index}")
            }
            Error::GenerationFailed(what) => write!(f, "could not generate {what}"),
        }
    }
}

impl core::error::Error for Error {}
