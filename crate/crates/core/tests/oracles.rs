mod common;

use common::*;
use nk_cloud::analytic::{expected_max_normals, sa_expected_x, SaIntegrand};
use nk_cloud::cloud::{build_fitness_cloud, build_hamming_cloud, build_limit_cloud, estimate_beta};
use nk_cloud::{Beta, CloudKind, CloudSummary, HeuristicSpec, NkLandscape, SearchSpace};
use proptest::prelude::*;

const WIDTH: f64 = 0.002;

fn assert_matches(cloud: &CloudSummary, oracle: &[OracleBin]) {
    assert_eq!(cloud.bins.len(), oracle.len());
    for (b, o) in cloud.bins.iter().zip(oracle) {
        assert_eq!(b.bin, o.bin);
        assert_eq!(b.count, o.count, "bin {}", o.bin);
        assert_eq!(b.f_min, o.min, "bin {}", o.bin);
        assert_eq!(b.f_max, o.max, "bin {}", o.bin);
        assert_eq!(b.f_mean, o.mean, "bin {}", o.bin);
        assert_eq!(b.f_std, o.std, "bin {}", o.bin);
    }
}

#[test]
fn fitness_matches_table_lookup() {
    let l = NkLandscape::generate(10, 4, 11).unwrap();
    for u in 0..1u64 << 10 {
        assert_eq!(l.fitness_of_index(u), fitness(&l, u));
    }
}

#[test]
fn hamming_and_mhc_clouds_match_brute_force() {
    for (n, k, seed) in [(6, 2, 1), (8, 7, 2), (10, 3, 3), (10, 0, 4)] {
        let l = NkLandscape::generate(n, k, seed).unwrap();
        let space = SearchSpace::build(&l, WIDTH).unwrap();
        assert_matches(
            &build_hamming_cloud(&space).unwrap(),
            &hamming_oracle(&l, WIDTH),
        );
        assert_matches(
            &build_fitness_cloud(&space, &HeuristicSpec::Mhc, 1).unwrap(),
            &mhc_oracle(&l, 1, WIDTH),
        );
        assert_matches(
            &build_limit_cloud(&space, &HeuristicSpec::Mhc, 50).unwrap(),
            &mhc_oracle(&l, 50, WIDTH),
        );
    }
}

#[test]
fn coarse_bins_match_brute_force() {
    let l = NkLandscape::generate(9, 2, 5).unwrap();
    let space = SearchSpace::build(&l, 0.05).unwrap();
    assert_matches(
        &build_hamming_cloud(&space).unwrap(),
        &hamming_oracle(&l, 0.05),
    );
}

#[test]
fn monte_carlo_expectations_small_grid() {
    let samples = 200_000;
    for (salt, (n, k)) in [(2, 0), (5, 3), (20, 15)].into_iter().enumerate() {
        let mc = mc_expected_max(n, k, samples, salt as u64);
        let z = mc.z(expected_max_normals(n, k).unwrap());
        assert!(z < 4.0, "n={n} k={k} z={z}");
    }
    for (salt, (f, t)) in [(0.4, 0.05), (0.6, 0.01), (0.5, 1.0)]
        .into_iter()
        .enumerate()
    {
        let salt = 100 + salt as u64;
        let m = mc_sa_metropolis(f, 15, t, samples, salt);
        let z = m.z(sa_expected_x(f, 15, t, SaIntegrand::Metropolis).unwrap());
        assert!(z < 4.0, "metropolis f={f} T={t} z={z}");
        let p = mc_sa_printed(f, 15, t, samples, salt);
        let z = p.z(sa_expected_x(f, 15, t, SaIntegrand::Printed).unwrap());
        assert!(z < 4.0, "printed f={f} T={t} z={z}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn affine_beta_recovered(a in 0.0f64..0.9, beta in 0.35f64..0.65) {
        let b = beta * (1.0 - a);
        let fc = synthetic_cloud(CloudKind::Fc, 0, 500, WIDTH, |f| a * f + b);
        let est = estimate_beta(&fc, WIDTH).unwrap();
        match est.beta {
            Some(Beta::Point(p)) => prop_assert!((p - beta).abs() <= WIDTH, "{p} vs {beta}"),
            other => prop_assert!(false, "expected a point, got {other:?}"),
        }
    }
}
