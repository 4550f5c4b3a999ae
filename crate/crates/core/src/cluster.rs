//! Subspace clustering from an exact CUR.
//!
//! For data `A = [a₁ … aₙ]` drawn from independent subspaces, with `A = C U⁺ R`
//! exact, the coefficient matrix `Y = U⁺ R` has `y_iᵀ y_j = 0` whenever `a_i`
//! and `a_j` lie in different subspaces. Connecting points through nonzero
//! entries of `Q = |YᵀY|` for up to `d_max` hops recovers the partition.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cur::CurFactors;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, DenseMatrix};
use crate::synth::{gaussian_matrix, orthonormal_basis};

/// Default relative cutoff below which entries of `|YᵀY|` count as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Largest number of clusters [`clustering_accuracy`] will match exhaustively.
pub const MAX_MATCHED_CLUSTERS: usize = 8;

const GENERATION_ATTEMPTS: usize = 16;
const GENERICITY_PROBES: usize = 4;

/// Parameters for a union-of-subspaces data set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub ambient_dim: usize,
    pub dims: Vec<usize>,
    /// Points per subspace, one entry per element of `dims`.
    pub points: Vec<usize>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Domain("at least one subspace is required"));
        }
        if self.dims.len() != self.points.len() {
            return Err(Error::Domain("dims and points must have the same length"));
        }
        if self.dims.contains(&0) {
            return Err(Error::Domain("subspace dimensions must be positive"));
        }
        if self.dims.iter().sum::<usize>() > self.ambient_dim {
            return Err(Error::Domain("subspace dimensions sum past the ambient dimension"));
        }
        if self.points.iter().zip(&self.dims).any(|(&p, &d)| p < d) {
            return Err(Error::Domain("each subspace needs at least as many points as its dimension"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceModel {
    pub ambient_dim: usize,
    pub subspace_dims: Vec<usize>,
    /// Orthonormal `m × d_i` basis of each subspace.
    pub bases: Vec<DenseMatrix>,
    pub points_per_subspace: Vec<usize>,
    /// Subspace of each data column.
    pub ground_truth: Vec<usize>,
}

impl SubspaceModel {
    pub fn num_subspaces(&self) -> usize {
        self.subspace_dims.len()
    }

    pub fn d_max(&self) -> usize {
        self.subspace_dims.iter().copied().max().unwrap_or(0)
    }

    pub fn truth(&self) -> ClusterLabels {
        ClusterLabels::from_labels(self.ground_truth.clone())
    }
}

/// Draws independent subspaces and generic points on them, then shuffles the
/// columns. Draws failing the independence or genericity checks are redone.
pub fn generate_union_of_subspaces<R: Rng + ?Sized>(
    spec: &ModelSpec,
    rng: &mut R,
) -> Result<(DenseMatrix, SubspaceModel)> {
    spec.validate()?;
    let m = spec.ambient_dim;
    let total_dim: usize = spec.dims.iter().sum();
    let n: usize = spec.points.iter().sum();

    for _ in 0..GENERATION_ATTEMPTS {
        let mut bases = Vec::with_capacity(spec.dims.len());
        for &d in &spec.dims {
            bases.push(orthonormal_basis(m, d, rng)?);
        }
        let stacked = DenseMatrix::from_fn(m, total_dim, {
            let offsets = offsets(&spec.dims);
            let bases = &bases;
            move |i, j| {
                let b = offsets.partition_point(|&o| o <= j) - 1;
                bases[b].get(i, j - offsets[b])
            }
        });
        if numerical_rank(&stacked, None) != total_dim {
            continue;
        }

        let blocks: Vec<DenseMatrix> =
            bases.iter().zip(&spec.points).map(|(b, &p)| b.matmul(&gaussian_matrix(b.cols(), p, rng))).collect();
        if !blocks.iter().zip(&spec.dims).all(|(x, &d)| looks_generic(x, d, rng)) {
            continue;
        }

        let mut origin: Vec<(usize, usize)> = Vec::with_capacity(n);
        for (s, &p) in spec.points.iter().enumerate() {
            origin.extend((0..p).map(|c| (s, c)));
        }
        origin.shuffle(rng);
        let data = DenseMatrix::from_fn(m, n, |i, j| {
            let (s, c) = origin[j];
            blocks[s].get(i, c)
        });
        let model = SubspaceModel {
            ambient_dim: m,
            subspace_dims: spec.dims.clone(),
            bases,
            points_per_subspace: spec.points.clone(),
            ground_truth: origin.iter().map(|&(s, _)| s).collect(),
        };
        return Ok((data, model));
    }
    Err(Error::GenerationFailed("union of subspaces"))
}

fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        out.push(acc);
        acc += d;
    }
    out
}

/// Spot check: the block has rank `d` and a few random `d`-subsets of its
/// columns do too.
fn looks_generic<R: Rng + ?Sized>(x: &DenseMatrix, d: usize, rng: &mut R) -> bool {
    if numerical_rank(x, None) != d {
        return false;
    }
    let mut cols: Vec<usize> = (0..x.cols()).collect();
    (0..GENERICITY_PROBES).all(|_| {
        cols.shuffle(rng);
        let pick = &cols[..d];
        let sub = DenseMatrix::from_fn(x.rows(), d, |i, j| x.get(i, pick[j]));
        numerical_rank(&sub, None) == d
    })
}

/// Symmetric 0/1 pattern on `n` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    n: usize,
    bits: Vec<bool>,
}

impl Pattern {
    pub fn new(n: usize) -> Self {
        Self { n, bits: vec![false; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut p = Self::new(n);
        (0..n).for_each(|i| p.set(i, i, true));
        p
    }

    pub fn full(n: usize) -> Self {
        Self { n, bits: vec![true; n * n] }
    }

    /// Co-membership pattern of a labeling.
    pub fn from_labels(labels: &ClusterLabels) -> Self {
        let l = labels.labels();
        let n = l.len();
        let mut p = Self::new(n);
        for i in 0..n {
            for j in 0..n {
                p.set(i, j, l[i] == l[j]);
            }
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.n + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i))
    }

    /// Product over the boolean semiring.
    pub fn compose(&self, rhs: &Pattern) -> Pattern {
        assert_eq!(self.n, rhs.n, "pattern sizes differ");
        let mut out = Pattern::new(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                if self.get(i, k) {
                    for j in 0..self.n {
                        if rhs.get(k, j) {
                            out.set(i, j, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// 0/1 dense matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| if self.get(i, j) { 1.0 } else { 0.0 })
    }
}

/// Support of `|YᵀY|` (entries below `zero_tol · max` dropped, diagonal
/// forced on) raised to the `d_max`-th boolean power, with `Y = U⁺ R`.
pub fn clustering_matrix(factors: &CurFactors, d_max: usize, zero_tol: f64) -> Result<Pattern> {
    if d_max == 0 {
        return Err(Error::Domain("d_max must be at least 1"));
    }
    if !(zero_tol >= 0.0) {
        return Err(Error::Domain("zero tolerance must be nonnegative"));
    }
    let y = factors.coefficients();
    let q = y.tr_matmul(&y).map(f64::abs);
    let cutoff = zero_tol * q.max_abs();
    let n = q.rows();
    let mut support = Pattern::new(n);
    for i in 0..n {
        for j in 0..n {
            support.set(i, j, i == j || (q.get(i, j) > cutoff && q.get(i, j) > 0.0));
        }
    }
    let mut w = support.clone();
    for _ in 1..d_max {
        let next = w.compose(&support);
        if next == w {
            break;
        }
        w = next;
    }
    Ok(w)
}

/// A partition of `n` points, labels numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl ClusterLabels {
    /// Canonicalizes arbitrary label values to `0, 1, …` in order of first
    /// appearance.
    pub fn from_labels(raw: Vec<usize>) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels = raw
            .into_iter()
            .map(|l| match map.iter().find(|&&(k, _)| k == l) {
                Some(&(_, v)) => v,
                None => {
                    let v = map.len();
                    map.push((l, v));
                    v
                }
            })
            .collect();
        Self { labels, num_clusters: map.len() }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the pattern's graph.
pub fn labels_from_clustering_matrix(w: &Pattern) -> ClusterLabels {
    let n = w.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if w.get(i, j) || w.get(j, i) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    ClusterLabels::from_labels(roots)
}

/// Best fraction of agreeing labels over all matchings of cluster names.
pub fn clustering_accuracy(pred: &ClusterLabels, truth: &ClusterLabels) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::ShapeMismatch { left: (pred.len(), 1), right: (truth.len(), 1) });
    }
    if pred.is_empty() {
        return Ok(1.0);
    }
    let l = pred.num_clusters().max(truth.num_clusters());
    if l > MAX_MATCHED_CLUSTERS {
        return Err(Error::TooManyClusters { clusters: l });
    }
    let mut confusion = vec![0usize; l * l];
    for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
        confusion[p * l + t] += 1;
    }
    let mut perm: Vec<usize> = (0..l).collect();
    let best = best_matching(&confusion, l, 0, &mut perm);
    Ok(best as f64 / pred.len() as f64)
}

fn best_matching(confusion: &[usize], l: usize, depth: usize, perm: &mut [usize]) -> usize {
    if depth == l {
        return (0..l).map(|p| confusion[p * l + perm[p]]).sum();
    }
    let mut best = 0;
    for i in depth..l {
        perm.swap(depth, i);
        best = best.max(best_matching(confusion, l, depth + 1, perm));
        perm.swap(depth, i);
    }
    best
}
