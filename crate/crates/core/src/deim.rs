//! Discrete empirical interpolation: deterministic index selection from a
//! singular-vector basis, the exact CUR it induces, and the noise
//! certificate under which indices chosen on `Ã = A + E` remain exact for `A`.

use alloc::vec::Vec;

use crate::cur::{build_cur, CurFactors};
use crate::error::{Error, Result};
use crate::linalg::{compact_svd, singular_values, submatrix, Axis, DenseMatrix, IndexSet};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct DeimSelection {
    /// Selected indices, pairwise distinct, in selection order.
    pub indices: IndexSet,
    /// `|r_j(p_j)|` for each step.
    pub residual_maxima: Vec<f64>,
    /// The first `ℓ` columns of the input basis.
    pub source_basis: DenseMatrix,
}

impl DeimSelection {
    /// `‖(V(p,:))⁻¹‖₂` for the square interpolation block.
    pub fn interpolation_growth(&self) -> f64 {
        let block = submatrix(&self.source_basis, &IndexSet::rows(self.indices.indices().to_vec()))
            .expect("selected indices lie within the basis");
        let s = singular_values(&block);
        match s.last() {
            Some(&smin) if smin > 0.0 => 1.0 / smin,
            _ => f64::INFINITY,
        }
    }
}

/// Upper bound `√(nℓ/3)·2^ℓ` on [`DeimSelection::interpolation_growth`] for an
/// `n × ℓ` orthonormal basis.
pub fn interpolation_growth_bound(n: usize, ell: usize) -> f64 {
    math::sqrt((n * ell) as f64 / 3.0) * math::powf(2.0, ell as f64)
}

fn argmax_abs(v: &[f64]) -> (usize, f64) {
    let mut best = (0, math::abs(v[0]));
    for (i, &x) in v.iter().enumerate().skip(1) {
        // strict comparison keeps the lowest index on ties
        if math::abs(x) > best.1 {
            best = (i, math::abs(x));
        }
    }
    best
}

/// Solves `M x = b` for square `M` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot is negligible relative to `M`.
#[allow(clippy::needless_range_loop)]
fn solve_pivoted(m: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = m.rows();
    let mut lu = m.clone();
    let mut x = b.to_vec();
    let floor = f64::EPSILON * n as f64 * lu.max_abs();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if math::abs(lu.get(i, k)) > math::abs(lu.get(p, k)) {
                p = i;
            }
        }
        let pivot = lu.get(p, k);
        if math::abs(pivot) <= floor || pivot == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = lu.get(k, j);
                lu.set(k, j, lu.get(p, j));
                lu.set(p, j, t);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let l = lu.get(i, k) / pivot;
            if l == 0.0 {
                continue;
            }
            for j in k + 1..n {
                lu.set(i, j, lu.get(i, j) - l * lu.get(k, j));
            }
            x[i] -= l * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= lu.get(k, j) * x[j];
        }
        x[k] = s / lu.get(k, k);
    }
    Some(x)
}

/// Greedy DEIM selection of `ell` row indices of the orthonormal basis `v`.
///
/// Step `j` interpolates `v_j` on the indices already chosen and picks the
/// largest-magnitude entry of the residual, lowest index first on ties.
pub fn deim_select(v: &DenseMatrix, ell: usize) -> Result<DeimSelection> {
    if ell == 0 {
        return Err(Error::EmptyIndexSet);
    }
    if ell > v.cols() || ell > v.rows() {
        return Err(Error::RankDeficient { requested: ell, rank: v.cols().min(v.rows()) });
    }
    let n = v.rows();
    let mut picked: Vec<usize> = Vec::with_capacity(ell);
    let mut maxima = Vec::with_capacity(ell);

    for j in 0..ell {
        let vj = v.col(j);
        let residual: Vec<f64> = if j == 0 {
            vj.to_vec()
        } else {
            let block = DenseMatrix::from_fn(j, j, |r, c| v.get(picked[r], c));
            let rhs: Vec<f64> = picked.iter().map(|&p| vj[p]).collect();
            let coef = solve_pivoted(&block, &rhs).ok_or(Error::SingularInterpolation { step: j })?;
            let mut r = vj.to_vec();
            for (c, &w) in coef.iter().enumerate() {
                for (ri, &vi) in r.iter_mut().zip(v.col(c)) {
                    *ri -= w * vi;
                }
            }
            r
        };
        let (p, size) = argmax_abs(&residual);
        let scale = vj.iter().fold(0.0f64, |m, &x| m.max(math::abs(x)));
        if size <= f64::EPSILON * n as f64 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularInterpolation { step: j });
        }
        picked.push(p);
        maxima.push(size);
    }

    Ok(DeimSelection { indices: IndexSet::rows(picked), residual_maxima: maxima, source_basis: v.leading_cols(ell) })
}

/// CUR with `k` columns chosen by DEIM on the leading right singular vectors
/// and `k` rows chosen by DEIM on the leading left singular vectors.
///
/// `tol` is the rank tolerance for the SVD and for `U⁺`.
pub fn deim_cur(a: &DenseMatrix, k: usize, tol: Option<f64>) -> Result<CurFactors> {
    let (rows, cols) = deim_indices(a, k, tol)?;
    Ok(build_cur(a, &rows, &cols, tol)?.with_scheme("deim"))
}

/// The `(I, J)` pair used by [`deim_cur`].
pub fn deim_indices(a: &DenseMatrix, k: usize, tol: Option<f64>) -> Result<(IndexSet, IndexSet)> {
    if k == 0 {
        return Err(Error::EmptyIndexSet);
    }
    let svd = match compact_svd(a, tol) {
        Ok(s) => s,
        Err(Error::ZeroMatrix) => return Err(Error::RankDeficient { requested: k, rank: 0 }),
        Err(e) => return Err(e),
    };
    if svd.numerical_rank < k {
        return Err(Error::RankDeficient { requested: k, rank: svd.numerical_rank });
    }
    let rows = deim_select(&svd.left_k(k), k)?.indices;
    let cols = deim_select(&svd.right_k(k), k)?.indices;
    Ok((rows, IndexSet::new(Axis::Cols, cols.indices().to_vec())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCertificate {
    pub holds: bool,
    /// `σ_k(Ã) − ‖E‖₂ − threshold`; nonnegative exactly when the bound is met.
    pub margin: f64,
    /// `(1 + 2^k √(max(nk, mk)/3)) ‖E‖₂`
    pub threshold: f64,
    /// Weyl lower bound `σ_k(Ã) − ‖E‖₂` on `σ_k(A)`.
    pub sigma_k_lower: f64,
}

/// Checks whether DEIM indices computed from the noisy `a_tilde` are
/// guaranteed to give an exact CUR of the rank-`k` matrix `A = Ã − E`,
/// given only `‖E‖₂ ≤ e_bound`.
pub fn deim_noise_certificate(a_tilde: &DenseMatrix, k: usize, e_bound: f64) -> Result<NoiseCertificate> {
    if k == 0 {
        return Err(Error::Domain("certificate rank must be at least 1"));
    }
    if !(e_bound >= 0.0) || !e_bound.is_finite() {
        return Err(Error::Domain("noise bound must be finite and nonnegative"));
    }
    let (m, n) = a_tilde.shape();
    let s = singular_values(a_tilde);
    let sigma_k = s.get(k - 1).copied().unwrap_or(0.0);
    let sigma_k_lower = sigma_k - e_bound;
    let factor = 1.0 + math::powf(2.0, k as f64) * math::sqrt((n * k).max(m * k) as f64 / 3.0);
    let threshold = factor * e_bound;
    let margin = sigma_k_lower - threshold;
    Ok(NoiseCertificate { holds: margin >= 0.0 && sigma_k_lower > 0.0, margin, threshold, sigma_k_lower })
}

/// Rows of `v` reordered so that row `i` of the result is row `perm[i]` of `v`.
pub fn permute_rows(v: &DenseMatrix, perm: &[usize]) -> DenseMatrix {
    assert_eq!(perm.len(), v.rows(), "permutation length must match row count");
    DenseMatrix::from_fn(v.rows(), v.cols(), |i, j| v.get(perm[i], j))
}
