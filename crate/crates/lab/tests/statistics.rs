//! Monte Carlo directional checks on the experiment runners.

use cur_lab::config::{ExperimentConfig, ExperimentKind, SchemeName};
use cur_lab::experiment::{default_cluster_d, run_noise_experiment, run_success_probability_experiment};

fn base() -> ExperimentConfig {
    ExperimentConfig { m: 50, n: 40, k: 4, trials: 500, ..Default::default() }
}

#[test]
fn success_is_monotone_in_sample_size() {
    let grid = vec![4, 5, 6, 8, 12, 16];
    for scheme in [SchemeName::Uniform, SchemeName::Length, SchemeName::Leverage] {
        let cfg = ExperimentConfig { schemes: vec![scheme], d_grid: grid.clone(), seed: 31, ..base() };
        let out = run_success_probability_experiment(&cfg).unwrap();
        let fractions: Vec<f64> =
            grid.iter().map(|&d| out.summary.row(&scheme.to_string(), d).unwrap().fraction()).collect();
        for w in fractions.windows(2) {
            assert!(w[1] >= w[0] - 0.03, "{scheme}: {fractions:?}");
        }
        assert!(fractions[0] < fractions[fractions.len() - 1], "{scheme}: {fractions:?}");
    }
}

#[test]
fn length_beats_uniform_on_sparse_columns() {
    let cfg = ExperimentConfig {
        sparsity: 0.9,
        schemes: vec![SchemeName::Uniform, SchemeName::Length],
        d_grid: vec![6, 10],
        seed: 5,
        ..base()
    };
    let out = run_success_probability_experiment(&cfg).unwrap();
    for d in [6, 10] {
        let u = out.summary.row("uniform", d).unwrap().fraction();
        let l = out.summary.row("length", d).unwrap().fraction();
        assert!(l >= u, "d={d}: length {l} < uniform {u}");
    }
}

/// Uniform probabilities do not depend on the matrix, so adding noise leaves
/// every draw, and hence every exact-on-A outcome, unchanged.
#[test]
fn uniform_sampling_ignores_noise() {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::NoiseStability,
        schemes: vec![SchemeName::Uniform],
        d_grid: vec![6],
        seed: 12,
        ..base()
    };
    let small = run_noise_experiment(&ExperimentConfig { sigma: 1e-8, ..cfg.clone() }).unwrap();
    let large = run_noise_experiment(&ExperimentConfig { sigma: 1e-2, ..cfg }).unwrap();
    let (p1, p2) = (small.summary.rows[0].fraction(), large.summary.rows[0].fraction());
    let pooled = 0.5 * (p1 + p2);
    let two_sigma = 2.0 * (pooled * (1.0 - pooled) * 2.0 / 500.0).sqrt();
    assert!((p1 - p2).abs() <= two_sigma, "{p1} vs {p2}");
    let flags = |o: &cur_lab::experiment::ExperimentOutput| o.records.iter().map(|r| r.success).collect::<Vec<_>>();
    assert_eq!(flags(&small), flags(&large));
}

#[test]
fn small_noise_keeps_exact_recovery() {
    let k = 3;
    let cfg = ExperimentConfig {
        kind: ExperimentKind::NoiseStability,
        m: 30,
        n: 25,
        k,
        sigma: 1e-6,
        d_grid: vec![default_cluster_d(k)],
        seed: 21,
        ..base()
    };
    let out = run_noise_experiment(&cfg).unwrap();
    let ratios: Vec<f64> = out.records.iter().filter_map(|r| r.extra("err_ratio")).collect();
    assert_eq!(ratios.len(), 500);
    assert!(out.summary.rows[0].fraction() >= 0.95, "{:?}", out.summary.rows[0]);
}
