//! Sampling distributions over rows or columns, weighted draws with
//! replacement, and the sample-size and stability-floor formulas that go
//! with them.
//!
//! All logarithms are natural logarithms.

use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{compact_svd, condition_number, Axis, DenseMatrix, IndexSet, SvdFactors};
use crate::math;

/// How a distribution was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Uniform,
    /// Squared row or column norms.
    Length,
    /// Rank-`k` leverage scores.
    Leverage(usize),
    /// Caller-supplied weights.
    Custom,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Uniform => f.write_str("uniform"),
            Scheme::Length => f.write_str("length"),
            Scheme::Leverage(k) => write!(f, "leverage({k})"),
            Scheme::Custom => f.write_str("custom"),
        }
    }
}

/// Probability vector over the indices of one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    weights: Vec<f64>,
    axis: Axis,
    scheme: Scheme,
}

impl ProbDist {
    /// Normalizes nonnegative weights to sum to one.
    pub fn from_weights(axis: Axis, weights: Vec<f64>, scheme: Scheme) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no weights"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self { weights, axis, scheme })
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn axis(&self) -> Axis {
        self.axis
    }

    #[inline]
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `1/n` on every index.
pub fn uniform_dist(n: usize, axis: Axis) -> Result<ProbDist> {
    if n == 0 {
        return Err(Error::Domain("distribution needs at least one index"));
    }
    Ok(ProbDist { weights: alloc::vec![1.0 / n as f64; n], axis, scheme: Scheme::Uniform })
}

fn squared_norms(a: &DenseMatrix, axis: Axis) -> Vec<f64> {
    match axis {
        Axis::Cols => (0..a.cols()).map(|j| a.col(j).iter().map(|x| x * x).sum()).collect(),
        Axis::Rows => {
            let mut out = alloc::vec![0.0; a.rows()];
            for j in 0..a.cols() {
                for (o, x) in out.iter_mut().zip(a.col(j)) {
                    *o += x * x;
                }
            }
            out
        }
    }
}

/// Squared row or column norms over `‖A‖_F²`. Zero rows or columns get
/// exactly zero weight.
pub fn length_dist(a: &DenseMatrix, axis: Axis) -> Result<ProbDist> {
    let sq = squared_norms(a, axis);
    if sq.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    ProbDist::from_weights(axis, sq, Scheme::Length)
}

/// Rank-`k` leverage scores: `‖V_k(j,:)‖²/k` over columns, `‖W_k(i,:)‖²/k`
/// over rows.
pub fn leverage_dist(a: &DenseMatrix, k: usize, axis: Axis, tol: Option<f64>) -> Result<ProbDist> {
    let svd = compact_svd(a, tol)?;
    leverage_dist_from_svd(&svd, k, axis)
}

/// [`leverage_dist`] from an existing decomposition.
pub fn leverage_dist_from_svd(svd: &SvdFactors, k: usize, axis: Axis) -> Result<ProbDist> {
    if k == 0 {
        return Err(Error::Domain("leverage rank must be at least 1"));
    }
    if k > svd.numerical_rank {
        return Err(Error::RankDeficient { requested: k, rank: svd.numerical_rank });
    }
    let basis = match axis {
        Axis::Cols => &svd.right,
        Axis::Rows => &svd.left,
    };
    let mut scores = alloc::vec![0.0; basis.rows()];
    for j in 0..k {
        for (s, x) in scores.iter_mut().zip(basis.col(j)) {
            *s += x * x;
        }
    }
    scores.iter_mut().for_each(|s| *s /= k as f64);
    ProbDist::from_weights(axis, scores, Scheme::Leverage(k))
}

/// Inverse-CDF sampler over a precomputed cumulative weight array.
#[derive(Debug, Clone)]
pub struct CumulativeSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
    axis: Axis,
}

impl CumulativeSampler {
    pub fn new(dist: &ProbDist) -> Self {
        let mut acc = 0.0;
        let cumulative = dist
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let last_positive = dist.weights().iter().rposition(|&w| w > 0.0).unwrap_or(0);
        Self { cumulative, last_positive, axis: dist.axis() }
    }

    /// One draw. Zero-weight indices are never returned.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.cumulative[self.cumulative.len() - 1];
        let u = rng.random::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.last_positive)
    }

    /// `d` independent draws.
    pub fn draw_many<R: Rng + ?Sized>(&self, d: usize, rng: &mut R) -> IndexSet {
        IndexSet::new(self.axis, (0..d).map(|_| self.draw(rng)).collect())
    }
}

/// `d` i.i.d. draws from `dist`, in draw order.
pub fn draw_with_replacement<R: Rng + ?Sized>(dist: &ProbDist, d: usize, rng: &mut R) -> IndexSet {
    CumulativeSampler::new(dist).draw_many(d, rng)
}

/// Drawn rows (or columns) of `A`, each scaled by `1/√(d·p_i)` so that
/// `E[R̂ᵀR̂] = AᵀA` (respectively `E[ĈĈᵀ] = AAᵀ`).
pub fn rescaled_submatrix(a: &DenseMatrix, set: &IndexSet, dist: &ProbDist, d: usize) -> Result<DenseMatrix> {
    if set.axis() != dist.axis() {
        return Err(Error::Domain("index set and distribution are on different axes"));
    }
    if dist.len() != set.axis().len_of(a) {
        return Err(Error::Domain("distribution length does not match the matrix"));
    }
    if d == 0 {
        return Err(Error::Domain("draw count must be at least 1"));
    }
    set.validate(dist.len())?;
    let mut scales = Vec::with_capacity(set.len());
    for &i in set.indices() {
        let p = dist.weights()[i];
        if p <= 0.0 {
            return Err(Error::ZeroProbabilityDraw { index: i });
        }
        scales.push(1.0 / math::sqrt(d as f64 * p));
    }
    let idx = set.indices();
    Ok(match set.axis() {
        Axis::Rows => DenseMatrix::from_fn(idx.len(), a.cols(), |r, j| a.get(idx[r], j) * scales[r]),
        Axis::Cols => DenseMatrix::from_fn(a.rows(), idx.len(), |i, c| a.get(i, idx[c]) * scales[c]),
    })
}

fn check_unit_open(x: f64, what: &'static str) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(what))
    }
}

/// Row/column count `⌈C·x·log x⌉` with `x = r/(ε⁴δ)`, for stable rank `r`.
/// When `log x < 1` the result is at least `⌈x⌉`.
pub fn min_sample_size_rv(r: f64, eps: f64, delta: f64, big_c: f64) -> Result<usize> {
    check_unit_open(eps, "eps must lie in (0, 1)")?;
    check_unit_open(delta, "delta must lie in (0, 1)")?;
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain("stable rank must be at least 1"));
    }
    if !(big_c > 0.0) || !big_c.is_finite() {
        return Err(Error::Domain("leading constant must be positive"));
    }
    let x = r / (eps * eps * eps * eps * delta);
    let lx = math::ln(x);
    let mut d = math::ceil(big_c * x * lx);
    if lx < 1.0 {
        d = d.max(math::ceil(x));
    }
    Ok(d as usize)
}

/// Inputs and result of the stable-rank sample-size bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSizeSpec {
    pub r: f64,
    pub k: usize,
    pub eps: f64,
    pub delta: f64,
    pub big_c: f64,
    pub d1: usize,
    pub d2: usize,
}

impl SampleSizeSpec {
    pub fn new(r: f64, k: usize, eps: f64, delta: f64, big_c: f64) -> Result<Self> {
        let d = min_sample_size_rv(r, eps, delta, big_c)?;
        Ok(Self { r, k, eps, delta, big_c, d1: d, d2: d })
    }
}

/// Per-index floors certifying `p̃_j ≥ α_j² p_j^col` and `q̃_i ≥ β_i² q_i^row`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityParams {
    pub alpha_per_col: Vec<f64>,
    pub beta_per_row: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StabilityParams {
    pub fn from_floors(alpha_per_col: Vec<f64>, beta_per_row: Vec<f64>) -> Result<Self> {
        if alpha_per_col.is_empty() || beta_per_row.is_empty() {
            return Err(Error::Domain("floors must be nonempty"));
        }
        if let Some(j) = alpha_per_col.iter().position(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::NoiseDominates { axis: Axis::Cols, index: j });
        }
        if let Some(i) = beta_per_row.iter().position(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(Error::NoiseDominates { axis: Axis::Rows, index: i });
        }
        let alpha = alpha_per_col.iter().copied().fold(f64::INFINITY, f64::min);
        let beta = beta_per_row.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { alpha_per_col, beta_per_row, alpha, beta, gamma: alpha.min(beta) })
    }

    /// Checks the floors against sampling distributions `p̃` (columns) and
    /// `q̃` (rows) for reference matrix `a`.
    pub fn certify(&self, a: &DenseMatrix, p_tilde: &ProbDist, q_tilde: &ProbDist) -> Result<()> {
        check_floor(a, Axis::Cols, &self.alpha_per_col, p_tilde)?;
        check_floor(a, Axis::Rows, &self.beta_per_row, q_tilde)
    }
}

fn check_floor(a: &DenseMatrix, axis: Axis, floors: &[f64], tilde: &ProbDist) -> Result<()> {
    let reference = length_dist(a, axis)?;
    if tilde.axis() != axis || tilde.len() != reference.len() || floors.len() != reference.len() {
        return Err(Error::Domain("floor, distribution and matrix disagree in length or axis"));
    }
    for (index, ((&f, &p), &pt)) in floors.iter().zip(reference.weights()).zip(tilde.weights()).enumerate() {
        let bound = f * f * p;
        if pt < bound * (1.0 - 1e-12) - 1e-300 {
            return Err(Error::FloorViolated { axis, index });
        }
    }
    Ok(())
}

/// Floors under which uniform sampling is certified:
/// `β_i² = ‖A‖_F²/(m‖A(i,:)‖²)` per row and `α_j² = ‖A‖_F²/(n‖A(:,j)‖²)`
/// per column, with zero rows and columns set to 1.
pub fn uniform_stability_floor(a: &DenseMatrix) -> Result<StabilityParams> {
    let (m, n) = a.shape();
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let floor = |norm: f64, count: usize| {
        if norm == 0.0 {
            1.0
        } else {
            fro / (math::sqrt(count as f64) * norm)
        }
    };
    let alpha = (0..n).map(|j| floor(a.col_norm(j), n)).collect();
    let beta = (0..m).map(|i| floor(a.row_norm(i), m)).collect();
    let params = StabilityParams::from_floors(alpha, beta)?;
    params.certify(a, &uniform_dist(n, Axis::Cols)?, &uniform_dist(m, Axis::Rows)?)?;
    Ok(params)
}

/// Floors certifying length sampling of `Ã = A + E` against length
/// probabilities of `A`:
/// `β_i = (1 − ‖E(i,:)‖/‖A(i,:)‖) / (1 + ‖E‖_F/‖A‖_F)`, and likewise `α_j`
/// over columns. Zero rows or columns of `A` get floor 1.
pub fn noisy_stability_floor(a: &DenseMatrix, e: &DenseMatrix) -> Result<StabilityParams> {
    if a.shape() != e.shape() {
        return Err(Error::ShapeMismatch { left: a.shape(), right: e.shape() });
    }
    let a_fro = a.frobenius_norm();
    if a_fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let denom = 1.0 + e.frobenius_norm() / a_fro;
    let floor = |a_norm: f64, e_norm: f64, axis: Axis, index: usize| {
        if a_norm == 0.0 {
            return Ok(1.0);
        }
        let f = (1.0 - e_norm / a_norm) / denom;
        if f > 0.0 {
            Ok(f)
        } else {
            Err(Error::NoiseDominates { axis, index })
        }
    };
    let alpha =
        (0..a.cols()).map(|j| floor(a.col_norm(j), e.col_norm(j), Axis::Cols, j)).collect::<Result<Vec<_>>>()?;
    let beta = (0..a.rows()).map(|i| floor(a.row_norm(i), e.row_norm(i), Axis::Rows, i)).collect::<Result<Vec<_>>>()?;
    let params = StabilityParams::from_floors(alpha, beta)?;
    let noisy = a.add(e);
    params.certify(a, &length_dist(&noisy, Axis::Cols)?, &length_dist(&noisy, Axis::Rows)?)?;
    Ok(params)
}

/// Admissible ceiling on ε: `κ(A)⁻¹` alone, or
/// `min{κ(A)⁻¹, δ^{-1/4}·√(2γ)}` when stability floors are given.
pub fn epsilon_ceiling(a: &DenseMatrix, params: Option<&StabilityParams>, delta: f64) -> Result<f64> {
    check_unit_open(delta, "delta must lie in (0, 1)")?;
    let inv_kappa = 1.0 / condition_number(a, None)?;
    Ok(match params {
        None => inv_kappa,
        Some(p) => inv_kappa.min(math::powf(delta, -0.25) * math::sqrt(2.0 * p.gamma)),
    })
}

/// `c(p̃) = max_j p_j^lev / p̃_j`.
pub fn leverage_dominance_ratio(p_tilde: &ProbDist, p_lev: &ProbDist) -> Result<f64> {
    if p_tilde.axis() != p_lev.axis() || p_tilde.len() != p_lev.len() {
        return Err(Error::Domain("distributions disagree in axis or length"));
    }
    let mut worst: f64 = 0.0;
    for (index, (&pt, &pl)) in p_tilde.weights().iter().zip(p_lev.weights()).enumerate() {
        if pl == 0.0 {
            continue;
        }
        if pt == 0.0 {
            return Err(Error::DivisionByZeroWeight { index });
        }
        worst = worst.max(pl / pt);
    }
    Ok(worst)
}

/// `⌈(8/β)(log(2k) + 1/δ)k⌉` draws for distributions dominating leverage
/// scores by a factor `β`.
pub fn sample_size_leverage(k: usize, beta: f64, delta: f64) -> Result<usize> {
    if k == 0 {
        return Err(Error::Domain("rank must be at least 1"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain("beta must lie in (0, 1]"));
    }
    check_unit_open(delta, "delta must lie in (0, 1)")?;
    let k = k as f64;
    Ok(math::ceil((8.0 / beta) * (math::ln(2.0 * k) + 1.0 / delta) * k) as usize)
}

/// `⌈8rκ²(log(2k) + 1/δ)⌉` draws for length sampling.
pub fn sample_size_length_via_lev(r: f64, kappa: f64, k: usize, delta: f64) -> Result<usize> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::Domain("stable rank must be at least 1"));
    }
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::Domain("condition number must be at least 1"));
    }
    if k == 0 {
        return Err(Error::Domain("rank must be at least 1"));
    }
    check_unit_open(delta, "delta must lie in (0, 1)")?;
    Ok(math::ceil(8.0 * r * kappa * kappa * (math::ln(2.0 * k as f64) + 1.0 / delta)) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use crate::synth::{gaussian_low_rank, gaussian_matrix};
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_dist(4, Axis::Cols).unwrap().weights(), &[0.25; 4]);
        assert_eq!(uniform_dist(1, Axis::Rows).unwrap().weights(), &[1.0]);
        assert_eq!(uniform_dist(3, Axis::Cols).unwrap().weights().iter().sum::<f64>(), 1.0);
        assert!(uniform_dist(0, Axis::Cols).is_err());
    }

    #[test]
    fn length_examples() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
        let p = length_dist(&a, Axis::Cols).unwrap();
        assert!(close(p.weights()[0], 0.2, 1e-15) && close(p.weights()[1], 0.8, 1e-15));
        let a = DenseMatrix::from_rows(&[[3.0, 0.0], [4.0, 0.0]]).unwrap();
        assert_eq!(length_dist(&a, Axis::Cols).unwrap().weights(), &[1.0, 0.0]);
        assert_eq!(length_dist(&DenseMatrix::zeros(2, 2), Axis::Rows), Err(Error::ZeroMatrix));
    }

    #[test]
    fn length_matches_direct_norms() {
        let mut rng = stream(11, 0, 0, Purpose::Matrix);
        let a = gaussian_matrix(6, 4, &mut rng);
        let fro2 = a.frobenius_norm().powi(2);
        let p = length_dist(&a, Axis::Cols).unwrap();
        for j in 0..4 {
            let direct: f64 = (0..6).map(|i| a.get(i, j).powi(2)).sum::<f64>() / fro2;
            assert!(close(p.weights()[j], direct, 1e-12));
        }
        let q = length_dist(&a, Axis::Rows).unwrap();
        for i in 0..6 {
            let direct: f64 = (0..4).map(|j| a.get(i, j).powi(2)).sum::<f64>() / fro2;
            assert!(close(q.weights()[i], direct, 1e-12));
        }
    }

    #[test]
    fn leverage_examples() {
        let p = leverage_dist(&DenseMatrix::from_diag(&[3.0, 4.0]), 2, Axis::Cols, None).unwrap();
        assert!(close(p.weights()[0], 0.5, 1e-15) && close(p.weights()[1], 0.5, 1e-15));
        let a = DenseMatrix::outer(&[1.0, 1.0], &[1.0, 1.0]);
        let p = leverage_dist(&a, 1, Axis::Cols, None).unwrap();
        assert!(close(p.weights()[0], 0.5, 1e-15) && close(p.weights()[1], 0.5, 1e-15));
        assert_eq!(leverage_dist(&a, 2, Axis::Cols, None), Err(Error::RankDeficient { requested: 2, rank: 1 }));
    }

    #[test]
    fn leverage_matches_svd_rows() {
        let mut rng = stream(12, 0, 0, Purpose::Matrix);
        let a = gaussian_low_rank(10, 8, 3, &mut rng);
        let svd = compact_svd(&a, None).unwrap();
        let p = leverage_dist(&a, 3, Axis::Cols, None).unwrap();
        let q = leverage_dist(&a, 3, Axis::Rows, None).unwrap();
        assert!(close(p.weights().iter().sum(), 1.0, 1e-12));
        for j in 0..8 {
            let direct: f64 = (0..3).map(|c| svd.right.get(j, c).powi(2)).sum::<f64>() / 3.0;
            assert!(close(p.weights()[j], direct, 1e-12));
        }
        for i in 0..10 {
            let direct: f64 = (0..3).map(|c| svd.left.get(i, c).powi(2)).sum::<f64>() / 3.0;
            assert!(close(q.weights()[i], direct, 1e-12));
        }
    }

    #[test]
    fn degenerate_draws() {
        let dist = ProbDist::from_weights(Axis::Cols, vec![1.0, 0.0], Scheme::Custom).unwrap();
        let mut rng = stream(1, 0, 0, Purpose::Cols);
        assert_eq!(draw_with_replacement(&dist, 5, &mut rng).indices(), &[0; 5]);
        let dist = ProbDist::from_weights(Axis::Cols, vec![0.0, 0.0, 1.0, 0.0], Scheme::Custom).unwrap();
        assert!(draw_with_replacement(&dist, 100, &mut rng).indices().iter().all(|&i| i == 2));
    }

    #[test]
    fn empirical_frequencies() {
        let n = 100_000;
        let mut rng = stream(2, 0, 0, Purpose::Cols);
        let uni = uniform_dist(2, Axis::Cols).unwrap();
        let zeros = draw_with_replacement(&uni, n, &mut rng).indices().iter().filter(|&&i| i == 0).count();
        assert!(close(zeros as f64 / n as f64, 0.5, 0.01));

        let dist = ProbDist::from_weights(Axis::Rows, vec![0.2, 0.8], Scheme::Custom).unwrap();
        let ones = draw_with_replacement(&dist, n, &mut rng).indices().iter().filter(|&&i| i == 1).count();
        assert!(close(ones as f64 / n as f64, 0.8, 0.01));
    }

    #[test]
    fn rescaled_examples() {
        let a = DenseMatrix::identity(2);
        let uni = uniform_dist(2, Axis::Rows).unwrap();
        let r = rescaled_submatrix(&a, &IndexSet::rows(vec![0]), &uni, 1).unwrap();
        assert!(close(r.get(0, 0), 2f64.sqrt(), 1e-15) && r.get(0, 1) == 0.0);

        let a = DenseMatrix::from_diag(&[1.0, 2.0]);
        let len = length_dist(&a, Axis::Rows).unwrap();
        let r = rescaled_submatrix(&a, &IndexSet::rows(vec![1]), &len, 1).unwrap();
        // row scaled by ‖A‖_F/‖A(1,:)‖ = √5/2
        assert!(close(r.get(0, 1), 2.0 * 5f64.sqrt() / 2.0, 1e-14));

        let z = ProbDist::from_weights(Axis::Rows, vec![1.0, 0.0], Scheme::Custom).unwrap();
        assert_eq!(
            rescaled_submatrix(&a, &IndexSet::rows(vec![1]), &z, 1),
            Err(Error::ZeroProbabilityDraw { index: 1 })
        );
    }

    #[test]
    fn min_sample_size_examples() {
        // x = e exactly when r/(ε⁴δ) = e; take r=1, δ=1/(e·ε⁴) with ε⁴ chosen so δ<1
        let eps: f64 = 0.9;
        let delta = 1.0 / (core::f64::consts::E * eps.powi(4));
        assert_eq!(min_sample_size_rv(1.0, eps, delta, 1.0).unwrap(), 3);

        let d = min_sample_size_rv(5.0, 0.5, 0.5, 1.0).unwrap();
        assert_eq!(d, (160.0 * 160f64.ln()).ceil() as usize);
        assert_eq!(d, 813);

        assert!(min_sample_size_rv(5.0, 0.4, 0.5, 1.0).unwrap() >= d);
        assert!(min_sample_size_rv(5.0, 1.0, 0.5, 1.0).is_err());
        assert!(min_sample_size_rv(5.0, 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn small_log_clamps_to_x() {
        // x slightly above 1: x·log x < x, so the ⌈x⌉ floor applies
        let d = min_sample_size_rv(1.0, 0.999, 0.999, 1.0).unwrap();
        assert_eq!(d, 2);
    }

    #[test]
    fn epsilon_ceiling_examples() {
        let q = DenseMatrix::from_rows(&[[0.6, -0.8], [0.8, 0.6]]).unwrap();
        let params = StabilityParams::from_floors(vec![1.0; 2], vec![1.0; 2]).unwrap();
        assert!(close(epsilon_ceiling(&q, Some(&params), 0.5).unwrap(), 1.0, 1e-14));
        let d = DenseMatrix::from_diag(&[4.0, 1.0]);
        assert!(close(epsilon_ceiling(&d, None, 0.5).unwrap(), 0.25, 1e-15));

        let params = StabilityParams::from_floors(vec![0.02], vec![0.5]).unwrap();
        let d = DenseMatrix::from_diag(&[4.0]);
        let expected = 0.9f64.powf(-0.25) * (0.04f64).sqrt();
        assert!(expected < 1.0);
        assert!(close(epsilon_ceiling(&d, Some(&params), 0.9).unwrap(), expected, 1e-15));
    }

    #[test]
    fn uniform_floor_examples() {
        let p = uniform_stability_floor(&DenseMatrix::identity(4)).unwrap();
        assert!(close(p.alpha, 1.0, 1e-15) && close(p.beta, 1.0, 1e-15));

        // one row with 99% of the squared mass, m = 10
        let mut rows = vec![vec![0.0; 3]; 10];
        rows[0][0] = 0.99f64.sqrt();
        for (i, row) in rows.iter_mut().enumerate().skip(1) {
            row[i % 3] = (0.01f64 / 9.0).sqrt();
        }
        let a = DenseMatrix::from_rows(&rows).unwrap();
        let p = uniform_stability_floor(&a).unwrap();
        assert!(close(p.beta, (0.1f64 / 0.99).sqrt(), 1e-12));

        let mut a = DenseMatrix::zeros(7, 5);
        a.set(3, 2, 2.5);
        let p = uniform_stability_floor(&a).unwrap();
        assert!(close(p.beta, 1.0 / 7f64.sqrt(), 1e-15));
        assert!(close(p.alpha, 1.0 / 5f64.sqrt(), 1e-15));
        assert_eq!(p.beta_per_row[0], 1.0);
    }

    #[test]
    fn noisy_floor_examples() {
        let mut rng = stream(13, 0, 0, Purpose::Matrix);
        let a = gaussian_matrix(5, 4, &mut rng);
        let p = noisy_stability_floor(&a, &DenseMatrix::zeros(5, 4)).unwrap();
        assert!(p.alpha_per_col.iter().chain(&p.beta_per_row).all(|&x| x == 1.0));

        // E = 0.1·A: every row and column ratio is 0.1, as is the Frobenius ratio
        let e = a.scale(0.1);
        let p = noisy_stability_floor(&a, &e).unwrap();
        for &b in &p.beta_per_row {
            assert!(close(b, 0.9 / 1.1, 1e-14));
            assert!(close(b * b, (0.9f64 / 1.1).powi(2), 1e-14));
        }

        let e = a.scale(-1.0);
        assert!(matches!(noisy_stability_floor(&a, &e), Err(Error::NoiseDominates { .. })));
    }

    #[test]
    fn dominance_ratio_examples() {
        let p = ProbDist::from_weights(Axis::Cols, vec![0.75, 0.25], Scheme::Custom).unwrap();
        assert_eq!(leverage_dominance_ratio(&p, &p).unwrap(), 1.0);
        let u = uniform_dist(2, Axis::Cols).unwrap();
        assert!(close(leverage_dominance_ratio(&u, &p).unwrap(), 1.5, 1e-15));
        let z = ProbDist::from_weights(Axis::Cols, vec![1.0, 0.0], Scheme::Custom).unwrap();
        assert_eq!(leverage_dominance_ratio(&z, &p), Err(Error::DivisionByZeroWeight { index: 1 }));
    }

    #[test]
    fn leverage_sample_sizes() {
        assert_eq!(sample_size_leverage(1, 1.0, 1.0 - 1e-9).unwrap(), 14);
        let base = sample_size_leverage(10, 1.0, 0.5).unwrap();
        assert_eq!(base, (80.0 * (20f64.ln() + 2.0)).ceil() as usize);
        let half = sample_size_leverage(10, 0.5, 0.5).unwrap();
        assert!((half as i64 - 2 * base as i64).abs() <= 1);
        assert!(sample_size_leverage(1, 1.5, 0.5).is_err());

        assert_eq!(sample_size_length_via_lev(3.0, 5.0, 3, 0.5).unwrap(), (600.0 * (6f64.ln() + 2.0)).ceil() as usize);
        for k in 1..6 {
            assert_eq!(
                sample_size_length_via_lev(k as f64, 1.0, k, 0.3).unwrap(),
                sample_size_leverage(k, 1.0, 0.3).unwrap()
            );
        }
        let one = sample_size_length_via_lev(2.0, 1.5, 2, 0.5).unwrap() as f64;
        let two = sample_size_length_via_lev(2.0, 3.0, 2, 0.5).unwrap() as f64;
        assert!((two / one - 4.0).abs() < 0.01);
    }
}
