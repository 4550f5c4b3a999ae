use alloc::vec::Vec;
use core::fmt;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Which side of a matrix an index set or distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Rows,
    Cols,
}

impl Axis {
    /// Length of this axis in `a`.
    pub fn len_of(self, a: &DenseMatrix) -> usize {
        match self {
            Axis::Rows => a.rows(),
            Axis::Cols => a.cols(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Rows => "row",
            Axis::Cols => "column",
        })
    }
}

/// Ordered list of 0-based indices along one axis. Repeats are allowed and
/// order is kept as drawn.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<usize>,
    axis: Axis,
}

impl IndexSet {
    pub fn new(axis: Axis, indices: Vec<usize>) -> Self {
        Self { indices, axis }
    }

    pub fn rows(indices: impl Into<Vec<usize>>) -> Self {
        Self::new(Axis::Rows, indices.into())
    }

    pub fn cols(indices: impl Into<Vec<usize>>) -> Self {
        Self::new(Axis::Cols, indices.into())
    }

    /// All indices `0..n` in order.
    pub fn full(axis: Axis, n: usize) -> Self {
        Self::new(axis, (0..n).collect())
    }

    #[inline]
    pub fn axis(&self) -> Axis {
        self.axis
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Removes repeats, keeping the first occurrence of each index.
    pub fn dedup(&self) -> Self {
        let mut seen = Vec::new();
        let mut out = Vec::with_capacity(self.indices.len());
        for &i in &self.indices {
            if i >= seen.len() {
                seen.resize(i + 1, false);
            }
            if !seen[i] {
                seen[i] = true;
                out.push(i);
            }
        }
        Self::new(self.axis, out)
    }

    /// Checks that the set is nonempty and every index is below `bound`.
    pub fn validate(&self, bound: usize) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        match self.indices.iter().find(|&&i| i >= bound) {
            Some(&index) => Err(Error::IndexOutOfRange { axis: self.axis, index, bound }),
            None => Ok(()),
        }
    }
}

/// `A(I,:)` or `A(:,J)` depending on the axis of `set`.
pub fn submatrix(a: &DenseMatrix, set: &IndexSet) -> Result<DenseMatrix> {
    set.validate(set.axis().len_of(a))?;
    let idx = set.indices();
    Ok(match set.axis() {
        Axis::Rows => DenseMatrix::from_fn(idx.len(), a.cols(), |i, j| a.get(idx[i], j)),
        Axis::Cols => DenseMatrix::from_fn(a.rows(), idx.len(), |i, j| a.get(i, idx[j])),
    })
}

/// `A(I,J)`.
pub fn intersection(a: &DenseMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix> {
    if rows.axis() != Axis::Rows || cols.axis() != Axis::Cols {
        return Err(Error::Domain("row set must be on the row axis and column set on the column axis"));
    }
    rows.validate(a.rows())?;
    cols.validate(a.cols())?;
    let (i, j) = (rows.indices(), cols.indices());
    Ok(DenseMatrix::from_fn(i.len(), j.len(), |r, c| a.get(i[r], j[c])))
}
