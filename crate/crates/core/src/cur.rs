//! CUR factors `A = C U⁺ R` with `C = A(:,J)`, `R = A(I,:)`, `U = A(I,J)`.
//!
//! Rank decisions on `C`, `U` and `R` use the rank tolerance of the source
//! matrix `A`. Per-matrix tolerances would scale with `‖U‖₂`, which can be far
//! smaller than `‖A‖₂`, and misclassify a nearly singular `U`. Repeated indices
//! can make a submatrix *larger* than `A` (a 1×1 `A` sampled three times gives
//! a 3×3 `U` with `‖U‖₂ = 3‖A‖₂`), so by default the tolerance is never allowed
//! below the submatrix's own rounding level either.

use alloc::format;
use alloc::string::String;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    default_tolerance, intersection, numerical_rank, pseudoinverse, rank_tolerance, spectral_norm, submatrix, Axis,
    DenseMatrix, IndexSet,
};
use crate::sampling::{CumulativeSampler, ProbDist};

/// Relative Frobenius residual below which a CUR factorization counts as exact.
pub const EXACT_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct CurFactors {
    pub rows: IndexSet,
    pub cols: IndexSet,
    /// `A(:,J)`
    pub c: DenseMatrix,
    /// `A(I,J)`
    pub u: DenseMatrix,
    /// `A(I,:)`
    pub r: DenseMatrix,
    pub u_pinv: DenseMatrix,
    /// How the index sets were chosen.
    pub scheme: String,
}

impl CurFactors {
    /// `C U⁺ R`.
    pub fn reconstruct(&self) -> DenseMatrix {
        self.c.matmul(&self.u_pinv.matmul(&self.r))
    }

    /// Coefficient matrix `Y = U⁺ R`, so that `C Y` reconstructs `A`.
    pub fn coefficients(&self) -> DenseMatrix {
        self.u_pinv.matmul(&self.r)
    }

    pub fn with_scheme(mut self, scheme: impl Into<String>) -> Self {
        self.scheme = scheme.into();
        self
    }
}

/// Extracts `C`, `U`, `R` from `a` and pseudo-inverts `U` at the rank
/// tolerance `tol` (default: that of `a`).
pub fn build_cur(a: &DenseMatrix, rows: &IndexSet, cols: &IndexSet, tol: Option<f64>) -> Result<CurFactors> {
    let base = rank_tolerance(a, tol);
    build_at(a, rows, cols, base, tol.is_none())
}

/// Tolerance applied to a submatrix `x` of the source: the source tolerance,
/// raised to `x`'s own rounding level when `floor` is set.
fn sub_tol(base: f64, x: &DenseMatrix, floor: bool) -> f64 {
    if floor {
        base.max(default_tolerance(x.rows(), x.cols(), spectral_norm(x)))
    } else {
        base
    }
}

fn build_at(a: &DenseMatrix, rows: &IndexSet, cols: &IndexSet, base: f64, floor: bool) -> Result<CurFactors> {
    let u = intersection(a, rows, cols)?;
    let c = submatrix(a, cols)?;
    let r = submatrix(a, rows)?;
    let u_pinv = pseudoinverse(&u, Some(sub_tol(base, &u, floor)));
    Ok(CurFactors { rows: rows.clone(), cols: cols.clone(), c, u, r, u_pinv, scheme: String::from("manual") })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Spectral,
    Frobenius,
}

/// `‖A − C U⁺ R‖` in the requested norm.
///
/// # Panics
/// If the factors do not reconstruct a matrix of `a`'s shape.
pub fn approx_error(a: &DenseMatrix, f: &CurFactors, norm: Norm) -> f64 {
    let diff = a.sub(&f.reconstruct());
    match norm {
        Norm::Spectral => spectral_norm(&diff),
        Norm::Frobenius => diff.frobenius_norm(),
    }
}

/// `‖A − C U⁺ R‖ / ‖A‖`; zero when `A` is zero and reconstructed exactly.
pub fn relative_error(a: &DenseMatrix, f: &CurFactors, norm: Norm) -> f64 {
    let base = match norm {
        Norm::Spectral => spectral_norm(a),
        Norm::Frobenius => a.frobenius_norm(),
    };
    let err = approx_error(a, f, norm);
    if base == 0.0 {
        err
    } else {
        err / base
    }
}

/// Whether `C U⁺ R` reproduces `a` to relative Frobenius tolerance `tol`.
pub fn is_exact(a: &DenseMatrix, f: &CurFactors, tol: f64) -> bool {
    approx_error(a, f, Norm::Frobenius) <= tol * a.frobenius_norm()
}

/// Relative residuals backing the characterization booleans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `‖A − C U⁺ R‖_F / ‖A‖_F`
    pub cur: f64,
    /// `‖A − C C⁺ A R⁺ R‖_F / ‖A‖_F`
    pub projection: f64,
    /// `‖A⁺ − R⁺ U C⁺‖_F / ‖A⁺‖_F`
    pub pinv_product: f64,
    /// `‖U⁺ − C⁺ A R⁺‖_F / ‖U⁺‖_F`
    pub u_pinv: f64,
}

/// Numerical evaluation of the five equivalent exactness conditions:
///
/// 1. `rank(U) = rank(A)`
/// 2. `A = C U⁺ R`
/// 3. `A = C C⁺ A R⁺ R`
/// 4. `A⁺ = R⁺ U C⁺`
/// 5. `rank(C) = rank(R) = rank(A)`
///
/// When all five hold, `U⁺ = C⁺ A R⁺` as well.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub rank_a: usize,
    pub rank_c: usize,
    pub rank_r: usize,
    pub rank_u: usize,
    pub holds_rank_u: bool,
    pub holds_cur: bool,
    pub holds_projection: bool,
    pub holds_pinv_product: bool,
    pub holds_ranks_cr: bool,
    /// `Some` only when all five conditions hold.
    pub u_pinv_identity: Option<bool>,
    pub residuals: Residuals,
    pub tol: f64,
    pub rank_tol: f64,
}

impl CharacterizationReport {
    pub fn conditions(&self) -> [bool; 5] {
        [self.holds_rank_u, self.holds_cur, self.holds_projection, self.holds_pinv_product, self.holds_ranks_cr]
    }

    /// All five conditions agree.
    pub fn unanimous(&self) -> bool {
        let c = self.conditions();
        c.iter().all(|&x| x == c[0])
    }

    pub fn all_hold(&self) -> bool {
        self.conditions().iter().all(|&x| x)
    }
}

fn rel(diff: &DenseMatrix, base: &DenseMatrix) -> f64 {
    let b = base.frobenius_norm();
    if b == 0.0 {
        diff.frobenius_norm()
    } else {
        diff.frobenius_norm() / b
    }
}

/// Evaluates the characterization with exactness tolerance `tol` and the
/// default rank tolerance of `a`.
pub fn verify_characterization(
    a: &DenseMatrix,
    rows: &IndexSet,
    cols: &IndexSet,
    tol: f64,
) -> Result<CharacterizationReport> {
    verify_characterization_with(a, rows, cols, tol, None)
}

/// [`verify_characterization`] with an explicit rank tolerance.
pub fn verify_characterization_with(
    a: &DenseMatrix,
    rows: &IndexSet,
    cols: &IndexSet,
    tol: f64,
    rank_tol: Option<f64>,
) -> Result<CharacterizationReport> {
    let floor = rank_tol.is_none();
    let rank_tol = rank_tolerance(a, rank_tol);
    let f = build_at(a, rows, cols, rank_tol, floor)?;
    let tc = Some(sub_tol(rank_tol, &f.c, floor));
    let tr = Some(sub_tol(rank_tol, &f.r, floor));
    let tu = Some(sub_tol(rank_tol, &f.u, floor));

    let rank_a = numerical_rank(a, Some(rank_tol));
    let rank_c = numerical_rank(&f.c, tc);
    let rank_r = numerical_rank(&f.r, tr);
    let rank_u = numerical_rank(&f.u, tu);

    let a_pinv = pseudoinverse(a, Some(rank_tol));
    let c_pinv = pseudoinverse(&f.c, tc);
    let r_pinv = pseudoinverse(&f.r, tr);

    let cur = rel(&a.sub(&f.reconstruct()), a);
    let projection = {
        let cca = f.c.matmul(&c_pinv.matmul(a));
        let rr = r_pinv.matmul(&f.r);
        rel(&a.sub(&cca.matmul(&rr)), a)
    };
    let pinv_product = rel(&a_pinv.sub(&r_pinv.matmul(&f.u.matmul(&c_pinv))), &a_pinv);
    let u_pinv = rel(&f.u_pinv.sub(&c_pinv.matmul(&a.matmul(&r_pinv))), &f.u_pinv);

    let mut report = CharacterizationReport {
        rank_a,
        rank_c,
        rank_r,
        rank_u,
        holds_rank_u: rank_u == rank_a,
        holds_cur: cur <= tol,
        holds_projection: projection <= tol,
        holds_pinv_product: pinv_product <= tol,
        holds_ranks_cr: rank_c == rank_a && rank_r == rank_a,
        u_pinv_identity: None,
        residuals: Residuals { cur, projection, pinv_product, u_pinv },
        tol,
        rank_tol,
    };
    if report.all_hold() {
        report.u_pinv_identity = Some(u_pinv <= tol);
    }
    Ok(report)
}

/// One scheme name, or `row/col` when the two differ. Never contains a comma.
fn scheme_tag(row_dist: &ProbDist, col_dist: &ProbDist) -> String {
    if row_dist.scheme() == col_dist.scheme() {
        format!("{}", col_dist.scheme())
    } else {
        format!("{}/{}", row_dist.scheme(), col_dist.scheme())
    }
}

/// Draws `d1` rows from `row_dist` using `row_rng` and, independently, `d2`
/// columns from `col_dist` using `col_rng`, then builds the CUR factors.
/// With `dedup`, repeated indices are dropped (first occurrence kept).
#[allow(clippy::too_many_arguments)]
pub fn randomized_cur<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    a: &DenseMatrix,
    row_dist: &ProbDist,
    col_dist: &ProbDist,
    d1: usize,
    d2: usize,
    row_rng: &mut R1,
    col_rng: &mut R2,
    dedup: bool,
) -> Result<CurFactors> {
    let (rows, cols) = draw_cur_indices(a, row_dist, col_dist, d1, d2, row_rng, col_rng, dedup)?;
    Ok(build_cur(a, &rows, &cols, None)?.with_scheme(scheme_tag(row_dist, col_dist)))
}

/// The index-drawing half of [`randomized_cur`], for callers that build
/// factors from a different matrix than the one sampled.
#[allow(clippy::too_many_arguments)]
pub fn draw_cur_indices<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    a: &DenseMatrix,
    row_dist: &ProbDist,
    col_dist: &ProbDist,
    d1: usize,
    d2: usize,
    row_rng: &mut R1,
    col_rng: &mut R2,
    dedup: bool,
) -> Result<(IndexSet, IndexSet)> {
    if row_dist.axis() != Axis::Rows || col_dist.axis() != Axis::Cols {
        return Err(Error::Domain("row and column distributions are on the wrong axes"));
    }
    if row_dist.len() != a.rows() || col_dist.len() != a.cols() {
        return Err(Error::Domain("distribution length does not match the matrix"));
    }
    if d1 == 0 || d2 == 0 {
        return Err(Error::EmptyIndexSet);
    }
    let mut rows = CumulativeSampler::new(row_dist).draw_many(d1, row_rng);
    let mut cols = CumulativeSampler::new(col_dist).draw_many(d2, col_rng);
    if dedup {
        rows = rows.dedup();
        cols = cols.dedup();
    }
    Ok((rows, cols))
}
