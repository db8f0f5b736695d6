mod common;

use common::random_values;
use piterbarg_core::estimator::{simulate_z_max, truncated_sup_functional};
use piterbarg_core::fbm::fgn_autocovariance;
use piterbarg_core::rate_study::paired_sample;
use piterbarg_core::{
    estimate_constant, subsampled_functionals, sup_functional, Domain, EstimatorConfig, PathGrid,
};
use proptest::prelude::*;

fn random_path(seed: u64) -> PathGrid {
    let neg = 1 + (seed % 17) as usize;
    let pos = 1 + (seed % 23) as usize;
    let mut values = random_values(seed, neg + pos + 1, 3.0);
    values[neg] = 0.0;
    PathGrid { alpha: 0.2 + 1.6 * ((seed % 97) as f64 / 97.0), delta: 0.05 + (seed % 7) as f64 * 0.1, neg_count: neg, pos_count: pos, values }
}

#[test]
fn sup_of_exp_equals_exp_of_sup() {
    for seed in 0..1000 {
        let path = random_path(seed);
        for domain in [Domain::HalfLine, Domain::FullLine] {
            let rec = sup_functional(&path, 0.7, domain).unwrap();
            let start = if domain == Domain::HalfLine { 0 } else { -(path.neg_count as isize) };
            let pointwise = (start..=path.pos_count as isize)
                .map(|k| {
                    let t = (k.unsigned_abs() as f64) * path.delta;
                    (std::f64::consts::SQRT_2 * path.at(k) - 1.7 * t.powf(path.alpha)).exp()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((rec.functional - pointwise).abs() <= 1e-12 * pointwise, "seed {seed}");
            assert_eq!(rec.functional, rec.z_max.exp());
            assert!(rec.functional >= 1.0);
        }
    }
}

#[test]
fn pathwise_monotonicities() {
    for seed in 0..1000 {
        let path = random_path(seed);
        for domain in [Domain::HalfLine, Domain::FullLine] {
            let recs = subsampled_functionals(&path, 1.3, domain, &[1, 2, 4, 8]).unwrap();
            for w in recs.windows(2) {
                assert!(w[1].functional <= w[0].functional, "grid, seed {seed}");
            }
            let horizons = [0.0, 0.3, 0.9, 2.0, 100.0];
            let values: Vec<f64> = horizons
                .iter()
                .map(|&t| truncated_sup_functional(&path, 1.3, domain, t).unwrap().functional)
                .collect();
            assert!(values.windows(2).all(|w| w[0] <= w[1]), "horizon, seed {seed}");
            assert_eq!(*values.last().unwrap(), sup_functional(&path, 1.3, domain).unwrap().functional);

            let penalties = [0.1, 0.5, 1.0, 2.0, 5.0];
            let z: Vec<f64> = penalties.iter().map(|&d| sup_functional(&path, d, domain).unwrap().z_max).collect();
            assert!(z.windows(2).all(|w| w[1] <= w[0]), "penalty, seed {seed}");
        }
        let half = sup_functional(&path, 0.9, Domain::HalfLine).unwrap();
        let full = sup_functional(&path, 0.9, Domain::FullLine).unwrap();
        assert!(full.functional >= half.functional, "domain, seed {seed}");
    }
}

fn config(domain: Domain, d: f64, reps: u64) -> EstimatorConfig {
    EstimatorConfig { alpha: 0.8, d, domain, delta: 0.05, horizon: 4.0, replications: reps, seed: 99 }
}

#[test]
fn estimates_are_identical_across_thread_counts() {
    for (domain, d) in [(Domain::HalfLine, 2.0), (Domain::FullLine, 0.5)] {
        let cfg = config(domain, d, 500);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_constant(&cfg).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(3));
        assert_eq!(one, run(8));
        assert_eq!(one, estimate_constant(&cfg).unwrap());
    }
}

#[test]
fn leading_replications_do_not_depend_on_count() {
    let short = simulate_z_max(&config(Domain::FullLine, 1.5, 40), &[1, 2]).unwrap();
    let long = simulate_z_max(&config(Domain::FullLine, 1.5, 120), &[1, 2]).unwrap();
    assert_eq!(short[..], long[..40]);
}

#[test]
fn common_random_number_gaps_are_pathwise_nonnegative() {
    let sample = paired_sample(1.0, 2.0, Domain::FullLine, &[0.4, 0.2, 0.1, 0.05], None, 400, 17).unwrap();
    for window in sample.columns.windows(2) {
        for (coarse, fine) in window[0].iter().zip(&window[1]) {
            assert!(coarse <= fine);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_sums_of_autocovariance(alpha in 0.05f64..1.95, n in 1usize..48) {
        let gamma: Vec<f64> = (0..n as u64).map(|k| fgn_autocovariance(alpha, k).unwrap()).collect();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += gamma[i.abs_diff(j)];
            }
        }
        prop_assert!((total - (n as f64).powf(alpha)).abs() < 1e-9);
    }

    #[test]
    fn functional_never_below_one(values in prop::collection::vec(-5.0f64..5.0, 2..40), d in 0.01f64..10.0, alpha in 0.05f64..1.95) {
        let pos = values.len() - 1;
        let mut values = values;
        values[0] = 0.0;
        let path = PathGrid { alpha, delta: 0.1, neg_count: 0, pos_count: pos, values };
        let rec = sup_functional(&path, d, Domain::HalfLine).unwrap();
        prop_assert!(rec.functional >= 1.0);
        prop_assert!(rec.z_max >= 0.0);
    }
}
