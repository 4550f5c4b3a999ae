//! Monte Carlo experiment runners.
//!
//! Every trial draws from its own random streams, derived from
//! `(seed, trial, variant, purpose)`; trials can therefore run in any order
//! or in parallel, and dropping one trial changes no other trial's draws.
//! Records are always returned ordered by trial index.

use std::time::Instant;

use rayon::prelude::*;

use cur_core::cluster::{
    clustering_accuracy, clustering_matrix, generate_union_of_subspaces, labels_from_clustering_matrix,
};
use cur_core::cur::{build_cur, draw_cur_indices, is_exact, relative_error, Norm, EXACT_TOL};
use cur_core::deim::{deim_cur, deim_indices, deim_noise_certificate};
use cur_core::linalg::{spectral_norm, stable_rank};
use cur_core::rng::{stream, Purpose};
use cur_core::sampling::{
    length_dist, leverage_dist, min_sample_size_rv, noisy_stability_floor, uniform_dist, ProbDist,
};
use cur_core::synth::{gaussian_noise, LowRankSpec};
use cur_core::{Axis, DenseMatrix, Error as CoreError};

use crate::config::{ExperimentConfig, ExperimentKind, SchemeName};
use crate::LabError;

/// One CUR attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub scheme: String,
    pub d1: usize,
    pub d2: usize,
    /// CUR exact at relative Frobenius tolerance `1e-8`.
    pub success: bool,
    pub rel_err_2: f64,
    pub rel_err_f: f64,
    /// Wall time in milliseconds; `0` unless timing was requested.
    pub ms: f64,
    /// Experiment-specific per-trial values, reported as comments.
    pub extras: Vec<(&'static str, f64)>,
}

impl TrialRecord {
    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extras.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }
}

/// Success counts for one `(scheme, d1, d2)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: String,
    pub d1: usize,
    pub d2: usize,
    pub trials: usize,
    pub successes: usize,
}

impl SummaryRow {
    pub fn fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    /// Free-form `key=value` notes.
    pub notes: Vec<String>,
}

impl Summary {
    /// Groups records by `(scheme, d1, d2)` in order of first appearance.
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let mut rows: Vec<SummaryRow> = Vec::new();
        for r in records {
            let row = match rows.iter_mut().find(|s| s.scheme == r.scheme && s.d1 == r.d1 && s.d2 == r.d2) {
                Some(row) => row,
                None => {
                    rows.push(SummaryRow { scheme: r.scheme.clone(), d1: r.d1, d2: r.d2, trials: 0, successes: 0 });
                    rows.last_mut().expect("just pushed")
                }
            };
            row.trials += 1;
            row.successes += usize::from(r.success);
        }
        Self { rows, notes: Vec::new() }
    }

    pub fn row(&self, scheme: &str, d: usize) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.scheme == scheme && r.d1 == d && r.d2 == d)
    }

    /// Success fraction of `scheme` pooled over every sample size.
    pub fn pooled_fraction(&self, scheme: &str) -> f64 {
        let (t, s) =
            self.rows.iter().filter(|r| r.scheme == scheme).fold((0, 0), |(t, s), r| (t + r.trials, s + r.successes));
        if t == 0 {
            0.0
        } else {
            s as f64 / t as f64
        }
    }

    pub fn note(&self, key: &str) -> Option<&str> {
        self.notes.iter().find_map(|n| n.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Dispatches on the configured kind.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::SuccessProb => run_success_probability_experiment(cfg),
        ExperimentKind::NoiseStability => run_noise_experiment(cfg),
        ExperimentKind::DeimCheck => run_deim_experiment(cfg),
        ExperimentKind::Clustering => run_clustering_experiment(cfg),
    }
}

/// Runs `trial` for every index, in parallel when configured, and returns
/// the records in trial order.
fn run_trials<T, F>(cfg: &ExperimentConfig, trial: F) -> Result<Vec<T>, LabError>
where
    T: Send,
    F: Fn(usize) -> Result<T, LabError> + Sync + Send,
{
    if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(trial).collect()
    } else {
        (0..cfg.trials).map(trial).collect()
    }
}

fn dists(a: &DenseMatrix, scheme: SchemeName, k: usize, tol: Option<f64>) -> Result<(ProbDist, ProbDist), CoreError> {
    Ok(match scheme {
        SchemeName::Uniform => (uniform_dist(a.rows(), Axis::Rows)?, uniform_dist(a.cols(), Axis::Cols)?),
        SchemeName::Length => (length_dist(a, Axis::Rows)?, length_dist(a, Axis::Cols)?),
        SchemeName::Leverage => (leverage_dist(a, k, Axis::Rows, tol)?, leverage_dist(a, k, Axis::Cols, tol)?),
    })
}

/// Sample sizes for one trial: the configured grid, or the stable-rank bound.
fn sample_sizes(cfg: &ExperimentConfig, a: &DenseMatrix) -> Result<Vec<usize>, LabError> {
    if !cfg.d_grid.is_empty() {
        return Ok(cfg.d_grid.clone());
    }
    let (eps, delta) = (cfg.eps.expect("validated"), cfg.delta.expect("validated"));
    let r = stable_rank(a)?;
    Ok(vec![min_sample_size_rv(r, eps, delta, cfg.big_c)?])
}

fn variant(grid_index: usize, scheme_index: usize, schemes: usize) -> u32 {
    (1 + grid_index * schemes + scheme_index) as u32
}

fn matrix_spec(cfg: &ExperimentConfig, normalize: bool) -> LowRankSpec {
    LowRankSpec { kappa: cfg.kappa, sparsity: cfg.sparsity, normalize, ..LowRankSpec::new(cfg.m, cfg.n, cfg.k) }
}

struct Timer(Option<Instant>);

impl Timer {
    fn start(on: bool) -> Self {
        Timer(on.then(Instant::now))
    }

    fn ms(&self) -> f64 {
        self.0.map_or(0.0, |t| t.elapsed().as_secs_f64() * 1e3)
    }
}

/// Exact-recovery rate of randomized CUR on seeded rank-`k` Gaussian-factor
/// matrices, per scheme and sample size.
pub fn run_success_probability_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    let per_trial = run_trials(cfg, |t| {
        let a = matrix_spec(cfg, false).generate(&mut stream(cfg.seed, t as u64, 0, Purpose::Matrix))?;
        let sizes = sample_sizes(cfg, &a)?;
        let mut out = Vec::with_capacity(sizes.len() * cfg.schemes.len());
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let (rd, cd) = dists(&a, scheme, cfg.k, cfg.tol)?;
            for (gi, &d) in sizes.iter().enumerate() {
                let timer = Timer::start(cfg.timing);
                let v = variant(gi, si, cfg.schemes.len());
                let (i, j) = draw_cur_indices(
                    &a,
                    &rd,
                    &cd,
                    d,
                    d,
                    &mut stream(cfg.seed, t as u64, v, Purpose::Rows),
                    &mut stream(cfg.seed, t as u64, v, Purpose::Cols),
                    cfg.dedup,
                )?;
                let f = build_cur(&a, &i, &j, cfg.tol)?;
                out.push(TrialRecord {
                    trial: t,
                    scheme: scheme.to_string(),
                    d1: d,
                    d2: d,
                    success: is_exact(&a, &f, EXACT_TOL),
                    rel_err_2: relative_error(&a, &f, Norm::Spectral),
                    rel_err_f: relative_error(&a, &f, Norm::Frobenius),
                    ms: timer.ms(),
                    extras: Vec::new(),
                });
            }
        }
        Ok(out)
    })?;
    let records = sort_records(per_trial);
    let summary = Summary::from_records(&records);
    Ok(ExperimentOutput { records, summary })
}

/// Samples from `Ã = A + E` (with `‖A‖₂ = 1`, `‖E‖₂ = sigma`), checks that the
/// sampled indices give an exact CUR of `A`, and records
/// `‖A − C̃Ũ⁺R̃‖₂/‖E‖₂` for the factors taken from `Ã`.
///
/// With `sigma = 0` this is exactly [`run_success_probability_experiment`].
pub fn run_noise_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    if cfg.sigma == 0.0 {
        return run_success_probability_experiment(cfg);
    }
    let per_trial = run_trials(cfg, |t| {
        let a = matrix_spec(cfg, true).generate(&mut stream(cfg.seed, t as u64, 0, Purpose::Matrix))?;
        let e = gaussian_noise(cfg.m, cfg.n, cfg.sigma, &mut stream(cfg.seed, t as u64, 0, Purpose::Noise))?;
        let noisy = a.add(&e);
        let e_norm = spectral_norm(&e);
        let floors = match noisy_stability_floor(&a, &e) {
            Ok(p) => Some((p.alpha, p.beta)),
            Err(CoreError::NoiseDominates { .. }) => None,
            Err(other) => return Err(other.into()),
        };
        let sizes = sample_sizes(cfg, &noisy)?;
        let mut out = Vec::new();
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let (rd, cd) = dists(&noisy, scheme, cfg.k, cfg.tol)?;
            for (gi, &d) in sizes.iter().enumerate() {
                let timer = Timer::start(cfg.timing);
                let v = variant(gi, si, cfg.schemes.len());
                let (i, j) = draw_cur_indices(
                    &noisy,
                    &rd,
                    &cd,
                    d,
                    d,
                    &mut stream(cfg.seed, t as u64, v, Purpose::Rows),
                    &mut stream(cfg.seed, t as u64, v, Purpose::Cols),
                    cfg.dedup,
                )?;
                let clean = build_cur(&a, &i, &j, cfg.tol)?;
                let noisy_f = build_cur(&noisy, &i, &j, cfg.tol)?;
                let ratio = spectral_norm(&a.sub(&noisy_f.reconstruct())) / e_norm;
                let mut extras = vec![("err_ratio", ratio)];
                match floors {
                    Some((alpha, beta)) => extras.extend([("alpha", alpha), ("beta", beta)]),
                    None => extras.push(("floor_skipped", 1.0)),
                }
                out.push(TrialRecord {
                    trial: t,
                    scheme: scheme.to_string(),
                    d1: d,
                    d2: d,
                    success: is_exact(&a, &clean, EXACT_TOL),
                    rel_err_2: relative_error(&a, &clean, Norm::Spectral),
                    rel_err_f: relative_error(&a, &clean, Norm::Frobenius),
                    ms: timer.ms(),
                    extras,
                });
            }
        }
        Ok(out)
    })?;
    let records = sort_records(per_trial);
    let mut summary = Summary::from_records(&records);
    // floors are per trial, not per scheme or sample size
    let mut skipped_trials: Vec<usize> =
        records.iter().filter(|r| r.extra("floor_skipped").is_some()).map(|r| r.trial).collect();
    skipped_trials.dedup();
    let skipped = skipped_trials.len();
    summary.notes.push(format!("sigma={}", fmt_real(cfg.sigma)));
    summary.notes.push(format!("floor_skips={skipped}"));
    for row in summary.rows.clone() {
        let mut ratios: Vec<f64> = records
            .iter()
            .filter(|r| r.scheme == row.scheme && r.d1 == row.d1 && r.d2 == row.d2)
            .filter_map(|r| r.extra("err_ratio"))
            .collect();
        if let Some(med) = median(&mut ratios) {
            summary.notes.push(format!("median_err_ratio[{},{},{}]={}", row.scheme, row.d1, row.d2, fmt_real(med)));
        }
    }
    Ok(ExperimentOutput { records, summary })
}

/// DEIM-selected CUR on rank-`k` matrices. With `sigma > 0` the indices come
/// from the noisy matrix and the noise certificate is reported alongside
/// exactness for the clean one.
pub fn run_deim_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    let ranks = if cfg.ranks.is_empty() { vec![cfg.k] } else { cfg.ranks.clone() };
    let per_trial = run_trials(cfg, |t| {
        let k = ranks[t % ranks.len()];
        let spec = LowRankSpec { rank: k, ..matrix_spec(cfg, cfg.sigma > 0.0) };
        let a = spec.generate(&mut stream(cfg.seed, t as u64, 0, Purpose::Matrix))?;
        let timer = Timer::start(cfg.timing);
        let (f, extras) = if cfg.sigma > 0.0 {
            let e = gaussian_noise(cfg.m, cfg.n, cfg.sigma, &mut stream(cfg.seed, t as u64, 0, Purpose::Noise))?;
            let noisy = a.add(&e);
            let cert = deim_noise_certificate(&noisy, k, cfg.sigma)?;
            let (i, j) = deim_indices(&noisy, k, cfg.tol)?;
            let extras = vec![("certified", f64::from(u8::from(cert.holds))), ("margin", cert.margin)];
            (build_cur(&a, &i, &j, cfg.tol)?.with_scheme("deim"), extras)
        } else {
            (deim_cur(&a, k, cfg.tol)?, Vec::new())
        };
        Ok(vec![TrialRecord {
            trial: t,
            scheme: f.scheme.clone(),
            d1: k,
            d2: k,
            success: is_exact(&a, &f, EXACT_TOL),
            rel_err_2: relative_error(&a, &f, Norm::Spectral),
            rel_err_f: relative_error(&a, &f, Norm::Frobenius),
            ms: timer.ms(),
            extras,
        }])
    })?;
    let records = sort_records(per_trial);
    let mut summary = Summary::from_records(&records);
    if cfg.sigma > 0.0 {
        let certified = records.iter().filter(|r| r.extra("certified") == Some(1.0)).count();
        let broken = records.iter().filter(|r| r.extra("certified") == Some(1.0) && !r.success).count();
        summary.notes.push(format!("certified={certified}"));
        summary.notes.push(format!("certified_but_inexact={broken}"));
    }
    Ok(ExperimentOutput { records, summary })
}

/// Union-of-subspaces data, CUR by sampling, then clustering from the
/// coefficient matrix. `success` is CUR exactness; the clustering accuracy is
/// an extra.
pub fn run_clustering_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, LabError> {
    let per_trial = run_trials(cfg, |t| {
        let (a, model) =
            generate_union_of_subspaces(&cfg.model_spec(cfg.seed), &mut stream(cfg.seed, t as u64, 0, Purpose::Model))?;
        let k: usize = model.subspace_dims.iter().sum();
        let sizes = if cfg.d_grid.is_empty() { vec![default_cluster_d(k)] } else { cfg.d_grid.clone() };
        let d_max = cfg.d_max.unwrap_or_else(|| model.d_max());
        let truth = model.truth();
        let mut out = Vec::new();
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let (rd, cd) = dists(&a, scheme, k, cfg.tol)?;
            for (gi, &d) in sizes.iter().enumerate() {
                let timer = Timer::start(cfg.timing);
                let v = variant(gi, si, cfg.schemes.len());
                let (i, j) = draw_cur_indices(
                    &a,
                    &rd,
                    &cd,
                    d,
                    d,
                    &mut stream(cfg.seed, t as u64, v, Purpose::Rows),
                    &mut stream(cfg.seed, t as u64, v, Purpose::Cols),
                    cfg.dedup,
                )?;
                let f = build_cur(&a, &i, &j, cfg.tol)?;
                let w = clustering_matrix(&f, d_max, cfg.zero_tol)?;
                let accuracy = clustering_accuracy(&labels_from_clustering_matrix(&w), &truth)?;
                out.push(TrialRecord {
                    trial: t,
                    scheme: scheme.to_string(),
                    d1: d,
                    d2: d,
                    success: is_exact(&a, &f, EXACT_TOL),
                    rel_err_2: relative_error(&a, &f, Norm::Spectral),
                    rel_err_f: relative_error(&a, &f, Norm::Frobenius),
                    ms: timer.ms(),
                    extras: vec![("accuracy", accuracy)],
                });
            }
        }
        Ok(out)
    })?;
    let records = sort_records(per_trial);
    let mut summary = Summary::from_records(&records);
    let perfect = records.iter().filter(|r| r.extra("accuracy") == Some(1.0)).count();
    let misclustered = records.iter().filter(|r| r.success && r.extra("accuracy") != Some(1.0)).count();
    summary.notes.push(format!("perfect_clusterings={perfect}"));
    summary.notes.push(format!("exact_but_misclustered={misclustered}"));
    Ok(ExperimentOutput { records, summary })
}

/// `⌈4k ln k⌉`, at least `k`.
pub fn default_cluster_d(k: usize) -> usize {
    let kf = k as f64;
    ((4.0 * kf * kf.ln()).ceil() as usize).max(k)
}

fn sort_records(per_trial: Vec<Vec<TrialRecord>>) -> Vec<TrialRecord> {
    // `run_trials` already preserves trial order; flattening keeps it.
    per_trial.into_iter().flatten().collect()
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
