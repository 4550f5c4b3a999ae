//! Singular value decomposition and the quantities derived from it.
//!
//! The decomposition is computed by one-sided (Hestenes) Jacobi rotations.
//! It is slower than bidiagonalization for large inputs but is fully
//! deterministic, needs no workspace beyond two matrices, and computes
//! small singular values to high relative accuracy, which the rank
//! decisions in this crate depend on.

use alloc::vec::Vec;

use super::matrix::{dot, norm2};
use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::math;

const MAX_SWEEPS: usize = 80;

/// Compact SVD `A = left · diag(singular_values) · rightᵀ` truncated to the
/// numerical rank, plus the full singular spectrum.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m × k`, orthonormal columns.
    pub left: DenseMatrix,
    /// `σ_1 ≥ … ≥ σ_k > tolerance_used`.
    pub singular_values: Vec<f64>,
    /// `n × k`, orthonormal columns.
    pub right: DenseMatrix,
    pub numerical_rank: usize,
    pub tolerance_used: f64,
    /// All `min(m, n)` singular values, nonincreasing.
    pub spectrum: Vec<f64>,
}

impl SvdFactors {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values[0]
    }

    /// Smallest retained (nonzero) singular value.
    pub fn sigma_min(&self) -> f64 {
        self.singular_values[self.numerical_rank - 1]
    }

    /// `σ_max / σ_min` over the retained values.
    pub fn condition_number(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }

    /// Leading `k` left singular vectors.
    pub fn left_k(&self, k: usize) -> DenseMatrix {
        self.left.leading_cols(k)
    }

    /// Leading `k` right singular vectors.
    pub fn right_k(&self, k: usize) -> DenseMatrix {
        self.right.leading_cols(k)
    }

    /// `left · diag(σ) · rightᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut ws = self.left.clone();
        for (j, &s) in self.singular_values.iter().enumerate() {
            for x in ws.col_mut(j) {
                *x *= s;
            }
        }
        ws.matmul(&self.right.transpose())
    }
}

/// Full thin decomposition: `u` is `m × p`, `v` is `n × p`, `p = min(m, n)`.
struct ThinSvd {
    u: DenseMatrix,
    s: Vec<f64>,
    v: DenseMatrix,
}

/// One-sided Jacobi on a tall (or square) matrix.
fn jacobi_tall(a: &DenseMatrix) -> ThinSvd {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let mut g = a.clone();
    let mut v = DenseMatrix::identity(n);
    // Columns below this squared norm are already at the backward-error
    // level; rotating them against each other only shuffles rounding noise.
    let negligible = {
        let f = f64::EPSILON * a.frobenius_norm();
        f * f
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for j in 0..n.saturating_sub(1) {
            for l in (j + 1)..n {
                let alpha = dot(g.col(j), g.col(j));
                let beta = dot(g.col(l), g.col(l));
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(g.col(j), g.col(l));
                if gamma == 0.0 || math::abs(gamma) <= f64::EPSILON * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = math::copysign(1.0, zeta) / (math::abs(zeta) + math::hypot(1.0, zeta));
                let c = 1.0 / math::hypot(1.0, t);
                let s = c * t;
                rotate(&mut g, j, l, c, s);
                rotate(&mut v, j, l, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = (0..n).map(|j| (j, norm2(g.col(j)))).collect();
    // Stable sort keeps the original column order among exact ties.
    order.sort_by(|x, y| y.1.total_cmp(&x.1));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vs = DenseMatrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &(src, sigma)) in order.iter().enumerate() {
        s.push(sigma);
        if sigma > 0.0 {
            for (o, &x) in u.col_mut(dst).iter_mut().zip(g.col(src)) {
                *o = x / sigma;
            }
        }
        vs.col_mut(dst).copy_from_slice(v.col(src));
    }
    ThinSvd { u, s, v: vs }
}

#[inline]
fn rotate(g: &mut DenseMatrix, j: usize, l: usize, c: f64, s: f64) {
    let m = g.rows();
    for i in 0..m {
        let x = g.get(i, j);
        let y = g.get(i, l);
        g.set(i, j, c * x - s * y);
        g.set(i, l, s * x + c * y);
    }
}

fn thin_svd(a: &DenseMatrix) -> ThinSvd {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose());
        ThinSvd { u: t.v, s: t.s, v: t.u }
    }
}

/// All `min(m, n)` singular values in nonincreasing order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    thin_svd(a).s
}

/// Largest singular value, `‖A‖₂`.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    singular_values(a)[0]
}

/// Default rank tolerance `max(m, n) · ε_mach · σ_1`.
pub fn default_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Rank tolerance for `a`: `tol` when given, otherwise [`default_tolerance`].
pub fn rank_tolerance(a: &DenseMatrix, tol: Option<f64>) -> f64 {
    match tol {
        Some(t) => t,
        None => default_tolerance(a.rows(), a.cols(), spectral_norm(a)),
    }
}

/// Number of singular values strictly above the tolerance.
pub fn numerical_rank(a: &DenseMatrix, tol: Option<f64>) -> usize {
    let s = singular_values(a);
    let tol = tol.unwrap_or_else(|| default_tolerance(a.rows(), a.cols(), s[0]));
    s.iter().filter(|&&x| x > tol).count()
}

/// Compact SVD at the given rank tolerance.
///
/// Each left singular vector is signed so that its largest-magnitude entry
/// (first one on ties) is nonnegative; the matching right vector is flipped
/// with it.
pub fn compact_svd(a: &DenseMatrix, tol: Option<f64>) -> Result<SvdFactors> {
    let ThinSvd { u, s, v } = thin_svd(a);
    let tol = tol.unwrap_or_else(|| default_tolerance(a.rows(), a.cols(), s[0]));
    let k = s.iter().filter(|&&x| x > tol).count();
    if k == 0 {
        return Err(Error::ZeroMatrix);
    }

    let mut left = u.leading_cols(k);
    let mut right = v.leading_cols(k);
    reorthonormalize(&mut left);

    for j in 0..k {
        let col = left.col(j);
        let mut best = 0;
        for (i, &x) in col.iter().enumerate() {
            if math::abs(x) > math::abs(col[best]) {
                best = i;
            }
        }
        if col[best] < 0.0 {
            left.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            right.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }

    Ok(SvdFactors {
        left,
        singular_values: s[..k].to_vec(),
        right,
        numerical_rank: k,
        tolerance_used: tol,
        spectrum: s,
    })
}

/// Two passes of modified Gram–Schmidt. Columns of `u` belonging to small
/// singular values lose orthogonality in proportion to `σ_1 / σ_i`.
fn reorthonormalize(u: &mut DenseMatrix) {
    for _ in 0..2 {
        for j in 0..u.cols() {
            for l in 0..j {
                let proj = dot(u.col(l), u.col(j));
                let prev: Vec<f64> = u.col(l).to_vec();
                for (x, p) in u.col_mut(j).iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
            let nrm = norm2(u.col(j));
            if nrm > 0.0 {
                u.col_mut(j).iter_mut().for_each(|x| *x /= nrm);
            }
        }
    }
}

/// Moore–Penrose pseudoinverse `V_k Σ_k⁻¹ W_kᵀ` at the given rank tolerance.
/// A numerically zero matrix maps to the zero matrix of transposed shape.
pub fn pseudoinverse(a: &DenseMatrix, tol: Option<f64>) -> DenseMatrix {
    match compact_svd(a, tol) {
        Ok(f) => {
            let mut vs = f.right.clone();
            for (j, &s) in f.singular_values.iter().enumerate() {
                vs.col_mut(j).iter_mut().for_each(|x| *x /= s);
            }
            vs.matmul(&f.left.transpose())
        }
        Err(_) => DenseMatrix::zeros(a.cols(), a.rows()),
    }
}

/// `‖A‖_F² / ‖A‖₂²`.
pub fn stable_rank(a: &DenseMatrix) -> Result<f64> {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let s1 = spectral_norm(a);
    let ratio = fro / s1;
    Ok(ratio * ratio)
}

/// Generalized condition number `σ_max / σ_min`, with `σ_min` the smallest
/// singular value above the tolerance.
pub fn condition_number(a: &DenseMatrix, tol: Option<f64>) -> Result<f64> {
    let s = singular_values(a);
    let tol = tol.unwrap_or_else(|| default_tolerance(a.rows(), a.cols(), s[0]));
    let kept: Vec<f64> = s.into_iter().filter(|&x| x > tol).collect();
    match (kept.first(), kept.last()) {
        (Some(&hi), Some(&lo)) => Ok(hi / lo),
        _ => Err(Error::ZeroMatrix),
    }
}

/// Two-sided bound on `st.rank(A + E)` from norms of `A` and `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableRankSandwich {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds `st.rank(A + E)` by the triangle inequality on both norms:
///
/// `st.rank(A)·((1 − ‖E‖_F/‖A‖_F)/(1 + ‖E‖₂/‖A‖₂))²  ≤  st.rank(A + E)
///   ≤ st.rank(A)·((1 + ‖E‖_F/‖A‖_F)/(1 − ‖E‖₂/‖A‖₂))²`
///
/// Requires `‖E‖_F < ‖A‖_F` and `‖E‖₂ < ‖A‖₂`.
pub fn stable_rank_sandwich(a: &DenseMatrix, e: &DenseMatrix) -> Result<StableRankSandwich> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeMismatch { left: a.shape(), right: e.shape() });
    }
    let (af, a2) = (a.frobenius_norm(), spectral_norm(a));
    if af == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (ef, e2) = (e.frobenius_norm(), spectral_norm(e));
    if ef >= af || e2 >= a2 {
        return Err(Error::Domain("perturbation must be smaller than the matrix in both norms"));
    }
    let r = (af / a2) * (af / a2);
    let lo = (1.0 - ef / af) / (1.0 + e2 / a2);
    let hi = (1.0 + ef / af) / (1.0 - e2 / a2);
    Ok(StableRankSandwich { lower: r * lo * lo, upper: r * hi * hi })
}
