//! Seeded generators for test matrices and noise.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{compact_svd, spectral_norm, DenseMatrix};
use crate::math;

/// i.i.d. standard Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.sample(StandardNormal)).collect();
    DenseMatrix::from_col_major(rows, cols, data).expect("gaussian entries are finite")
}

/// `G₁ G₂ᵀ` with `G₁ ∈ ℝ^{m×k}`, `G₂ ∈ ℝ^{n×k}` standard Gaussian; exactly
/// rank `k` almost surely.
pub fn gaussian_low_rank<R: Rng + ?Sized>(rows: usize, cols: usize, rank: usize, rng: &mut R) -> DenseMatrix {
    let g1 = gaussian_matrix(rows, rank, rng);
    let g2 = gaussian_matrix(cols, rank, rng);
    g1.matmul(&g2.transpose())
}

/// Orthonormal `rows × cols` basis from a Gaussian draw.
pub fn orthonormal_basis<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<DenseMatrix> {
    if cols > rows {
        return Err(Error::Domain("basis wider than ambient dimension"));
    }
    for _ in 0..16 {
        let g = gaussian_matrix(rows, cols, rng);
        let f = compact_svd(&g, None)?;
        if f.numerical_rank == cols {
            return Ok(f.left);
        }
    }
    Err(Error::GenerationFailed("orthonormal basis"))
}

/// `Q₁ diag(σ) Q₂ᵀ` with random orthonormal `Q₁ ∈ ℝ^{rows×k}`, `Q₂ ∈ ℝ^{cols×k}`.
pub fn with_spectrum<R: Rng + ?Sized>(rows: usize, cols: usize, sigma: &[f64], rng: &mut R) -> Result<DenseMatrix> {
    let k = sigma.len();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::Domain("spectrum length must lie in 1..=min(rows, cols)"));
    }
    let q1 = orthonormal_basis(rows, k, rng)?;
    let q2 = orthonormal_basis(cols, k, rng)?;
    Ok(q1.matmul(&DenseMatrix::from_diag(sigma)).matmul(&q2.transpose()))
}

/// Scales `a` so that `‖a‖₂ = 1`.
pub fn normalize_spectral(a: &DenseMatrix) -> Result<DenseMatrix> {
    let s = spectral_norm(a);
    if s == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.scale(1.0 / s))
}

/// Replaces the nonzero spectrum of a rank-`k` matrix with the geometric
/// sequence `1, κ^{-1/(k-1)}, …, κ^{-1}`, keeping its singular vectors.
pub fn with_condition_number(a: &DenseMatrix, kappa: f64) -> Result<DenseMatrix> {
    if !(kappa >= 1.0) {
        return Err(Error::Domain("condition number must be at least 1"));
    }
    let mut f = compact_svd(a, None)?;
    let k = f.numerical_rank;
    for (i, s) in f.singular_values.iter_mut().enumerate() {
        *s = if k == 1 { 1.0 } else { math::powf(kappa, -(i as f64) / (k - 1) as f64) };
    }
    Ok(f.reconstruct())
}

/// Zeros `round(fraction · n)` columns chosen uniformly at random.
pub fn zero_columns<R: Rng + ?Sized>(a: &DenseMatrix, fraction: f64, rng: &mut R) -> Result<DenseMatrix> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::Domain("column sparsity must lie in [0, 1)"));
    }
    let n = a.cols();
    let count = libm::round(fraction * n as f64) as usize;
    let mut cols: Vec<usize> = (0..n).collect();
    cols.shuffle(rng);
    let mut out = a.clone();
    for &j in &cols[..count.min(n - 1)] {
        out.col_mut(j).iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(out)
}

/// Gaussian noise scaled so that `‖E‖₂ = sigma`.
pub fn gaussian_noise<R: Rng + ?Sized>(rows: usize, cols: usize, sigma: f64, rng: &mut R) -> Result<DenseMatrix> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain("noise level must be finite and nonnegative"));
    }
    let g = gaussian_matrix(rows, cols, rng);
    if sigma == 0.0 {
        return Ok(DenseMatrix::zeros(rows, cols));
    }
    Ok(normalize_spectral(&g)?.scale(sigma))
}

/// Parameters of the standard low-rank test family.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankSpec {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Target condition number; `None` keeps the Gaussian-factor spectrum.
    pub kappa: Option<f64>,
    /// Fraction of columns set to zero.
    pub sparsity: f64,
    /// Rescale to unit spectral norm.
    pub normalize: bool,
}

impl LowRankSpec {
    pub fn new(rows: usize, cols: usize, rank: usize) -> Self {
        Self { rows, cols, rank, kappa: None, sparsity: 0.0, normalize: false }
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DenseMatrix> {
        if self.rank == 0 || self.rank > self.rows.min(self.cols) {
            return Err(Error::Domain("rank must lie in 1..=min(rows, cols)"));
        }
        let mut a = gaussian_low_rank(self.rows, self.cols, self.rank, rng);
        if self.sparsity > 0.0 {
            a = zero_columns(&a, self.sparsity, rng)?;
        }
        if let Some(kappa) = self.kappa {
            a = with_condition_number(&a, kappa)?;
        }
        if self.normalize {
            a = normalize_spectral(&a)?;
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{condition_number, numerical_rank};
    use crate::rng::{stream, Purpose};

    #[test]
    fn low_rank_has_exact_rank() {
        let mut rng = stream(1, 0, 0, Purpose::Matrix);
        let a = gaussian_low_rank(8, 6, 3, &mut rng);
        assert_eq!(numerical_rank(&a, None), 3);
    }

    #[test]
    fn kappa_and_normalization() {
        let mut rng = stream(2, 0, 0, Purpose::Matrix);
        let spec = LowRankSpec { kappa: Some(10.0), normalize: true, ..LowRankSpec::new(20, 15, 4) };
        let a = spec.generate(&mut rng).unwrap();
        assert!((spectral_norm(&a) - 1.0).abs() < 1e-12);
        assert!((condition_number(&a, None).unwrap() - 10.0).abs() < 1e-9);
        assert_eq!(numerical_rank(&a, None), 4);
    }

    #[test]
    fn sparsity_zeros_columns() {
        let mut rng = stream(3, 0, 0, Purpose::Matrix);
        let spec = LowRankSpec { sparsity: 0.8, ..LowRankSpec::new(50, 40, 4) };
        let a = spec.generate(&mut rng).unwrap();
        let zeros = (0..40).filter(|&j| a.col_norm(j) == 0.0).count();
        assert_eq!(zeros, 32);
        assert_eq!(numerical_rank(&a, None), 4);
    }

    #[test]
    fn prescribed_spectrum() {
        let mut rng = stream(5, 0, 0, Purpose::Matrix);
        let a = with_spectrum(8, 6, &[3.0, 2.0, 0.5], &mut rng).unwrap();
        let s = crate::linalg::singular_values(&a);
        for (x, y) in s.iter().zip([3.0, 2.0, 0.5]) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn noise_level() {
        let mut rng = stream(4, 0, 0, Purpose::Noise);
        let e = gaussian_noise(10, 7, 1e-4, &mut rng).unwrap();
        assert!((spectral_norm(&e) - 1e-4).abs() < 1e-16);
        assert!(gaussian_noise(3, 3, 0.0, &mut rng).unwrap().is_zero());
    }
}
