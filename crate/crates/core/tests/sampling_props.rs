use cur_core::linalg::{condition_number, numerical_rank, spectral_norm, stable_rank};
use cur_core::rng::{stream, Purpose};
use cur_core::sampling::{
    draw_with_replacement, length_dist, leverage_dist, rescaled_submatrix, uniform_dist, ProbDist,
};
use cur_core::synth::{gaussian_low_rank, with_spectrum, LowRankSpec};
use cur_core::Axis;
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64) -> cur_core::DenseMatrix {
    let mut rng = stream(seed, 0, 0, Purpose::Aux);
    let m = rng.random_range(4..=30);
    let n = rng.random_range(4..=30);
    let k = rng.random_range(1..=6usize.min(m).min(n));
    let kappa = if rng.random_bool(0.5) { Some(rng.random_range(1.0..50.0)) } else { None };
    let spec = LowRankSpec { kappa, ..LowRankSpec::new(m, n, k) };
    spec.generate(&mut stream(seed, 0, 0, Purpose::Matrix)).unwrap()
}

#[test]
fn leverage_and_length_sandwich() {
    for seed in 0..200 {
        let a = instance(seed);
        let k = numerical_rank(&a, None);
        let r = stable_rank(&a).unwrap();
        let kappa = condition_number(&a, None).unwrap();
        for axis in [Axis::Cols, Axis::Rows] {
            let lev = leverage_dist(&a, k, axis, None).unwrap();
            let len = length_dist(&a, axis).unwrap();
            for (&pl, &pc) in lev.weights().iter().zip(len.weights()) {
                assert!(pl >= (r / k as f64) * pc - 1e-10, "seed {seed} {axis}: {pl} vs {pc}");
                assert!(pc >= (k as f64 / (r * kappa * kappa)) * pl - 1e-10, "seed {seed} {axis}");
            }
        }
    }
}

#[test]
fn epsilon_below_inverse_kappa_implies_order_relation() {
    for seed in 0..200 {
        let a = instance(seed);
        let k = numerical_rank(&a, None) as f64;
        let r = stable_rank(&a).unwrap();
        let kappa = condition_number(&a, None).unwrap();
        let mut rng = stream(seed, 0, 1, Purpose::Aux);
        let eps = rng.random_range(0.01..1.0) / kappa;
        assert!(r / eps.powi(4) >= k, "seed {seed}");
    }
}

proptest! {
    #[test]
    fn draws_are_reproducible(seed in any::<u64>(), d in 1usize..200, weights in proptest::collection::vec(0.0f64..1.0, 1..40)) {
        prop_assume!(weights.iter().any(|&w| w > 0.0));
        let dist = ProbDist::from_weights(Axis::Rows, weights, cur_core::sampling::Scheme::Custom).unwrap();
        let a = draw_with_replacement(&dist, d, &mut stream(seed, 3, 1, Purpose::Rows));
        let b = draw_with_replacement(&dist, d, &mut stream(seed, 3, 1, Purpose::Rows));
        prop_assert_eq!(&a, &b);
        prop_assert!(a.indices().iter().all(|&i| dist.weights()[i] > 0.0));
    }

    #[test]
    fn uniform_ignores_values(n in 1usize..100) {
        let u = uniform_dist(n, Axis::Cols).unwrap();
        prop_assert!(u.weights().iter().all(|&w| w == 1.0 / n as f64));
    }
}

#[test]
fn rescaled_rows_are_unbiased() {
    let a = with_spectrum(8, 6, &[3.0, 2.0, 1.0, 0.5, 0.2, 0.1], &mut stream(8, 0, 0, Purpose::Matrix)).unwrap();
    let gram = a.tr_matmul(&a);
    for dist in [length_dist(&a, Axis::Rows).unwrap(), uniform_dist(8, Axis::Rows).unwrap()] {
        let mut rng = stream(8, 0, 0, Purpose::Rows);
        let mut acc = cur_core::DenseMatrix::zeros(6, 6);
        let draws = 10_000;
        for _ in 0..draws {
            let set = draw_with_replacement(&dist, 1, &mut rng);
            let r = rescaled_submatrix(&a, &set, &dist, 1).unwrap();
            acc = acc.add(&r.tr_matmul(&r));
        }
        let avg = acc.scale(1.0 / draws as f64);
        let err = spectral_norm(&avg.sub(&gram)) / spectral_norm(&gram);
        assert!(err <= 0.05, "{}: {err}", dist.scheme());
    }
}

#[test]
fn length_sampling_concentrates() {
    let a = gaussian_low_rank(40, 20, 3, &mut stream(9, 0, 0, Purpose::Matrix));
    let dist = length_dist(&a, Axis::Rows).unwrap();
    let d = 4000;
    let set = draw_with_replacement(&dist, d, &mut stream(9, 0, 0, Purpose::Rows));
    let r = rescaled_submatrix(&a, &set, &dist, d).unwrap();
    let gram = a.tr_matmul(&a);
    assert!(spectral_norm(&gram.sub(&r.tr_matmul(&r))) <= 0.1 * spectral_norm(&a).powi(2));
}
