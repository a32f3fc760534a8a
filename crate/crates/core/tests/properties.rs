use proptest::prelude::*;

use zenopm::analytic::{
    final_width, performance_r, performance_r_large_n, survival_probability, width_ratio,
};
use zenopm::model::{binomial_weights, exact_final_packet};
use zenopm::oracle::exact_survival;
use zenopm::{SystemState, ZenoConfig};

fn s(r: f64) -> SystemState {
    SystemState::new(r).unwrap()
}

fn c(n: u64, sigma: f64) -> ZenoConfig {
    ZenoConfig::new(n, sigma).unwrap()
}

proptest! {
    #[test]
    fn weights_sum_to_one(n in 1u64..5000, r in 0.0f64..=1.0) {
        let w = binomial_weights(n, r).unwrap();
        prop_assert_eq!(w.len() as u64, n + 1);
        prop_assert!(w.iter().all(|x| *x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn packet_mirror_symmetry(n in 1u64..60, r in 0.0f64..=1.0, sigma in 0.02f64..0.5, q in -1.5f64..1.5) {
        let a = exact_final_packet(s(r), c(n, sigma)).amplitude(q);
        let b = exact_final_packet(s(1.0 - r), c(n, sigma)).amplitude(-q);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn packet_centers_in_unit_interval(n in 1u64..200, r in 0.0f64..=1.0) {
        let p = exact_final_packet(s(r), c(n, 0.1));
        prop_assert!(p.centers().iter().all(|x| (-1.0..=1.0).contains(x)));
    }

    #[test]
    fn width_never_shrinks(n in 1u64..100_000, r in 0.0f64..=1.0, sigma in 0.001f64..2.0) {
        prop_assert!(final_width(s(r), c(n, sigma)) >= sigma);
        let p = survival_probability(s(r), c(n, sigma));
        prop_assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn survival_increases_with_stages(n in 1u64..10_000, r in 0.001f64..0.999, sigma in 0.01f64..1.0) {
        prop_assert!(survival_probability(s(r), c(n + 1, sigma)) > survival_probability(s(r), c(n, sigma)));
    }

    #[test]
    fn performance_symmetric_in_r(n in 1u64..1000, r in 0.0f64..=1.0, sigma in 0.01f64..1.0) {
        let a = performance_r(s(r), c(n, sigma));
        let b = performance_r(s(1.0 - r), c(n, sigma));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn performance_approaches_limit_from_below(n in 1u64..100_000, r in 0.01f64..0.99, sigma in 0.01f64..1.0) {
        let limit = performance_r_large_n(s(r), sigma).unwrap();
        let here = performance_r(s(r), c(n, sigma));
        let next = performance_r(s(r), c(2 * n, sigma));
        prop_assert!(here < next && next < limit);
    }

    #[test]
    fn survival_minimized_at_half(n in 1u64..500, r in 0.0f64..=1.0, sigma in 0.01f64..1.0) {
        prop_assert!(survival_probability(s(0.5), c(n, sigma)) <= survival_probability(s(r), c(n, sigma)));
        prop_assert!(width_ratio(s(0.5), c(n, sigma)) >= width_ratio(s(r), c(n, sigma)));
    }

    #[test]
    fn exact_survival_mirror_and_bound(n in 1u64..80, r in 0.01f64..0.99, sigma in 0.03f64..0.5) {
        let a = exact_survival(s(r), c(n, sigma)).unwrap();
        let b = exact_survival(s(1.0 - r), c(n, sigma)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a < 1.0);
    }
}

#[test]
fn width_equals_sigma_only_at_extremes() {
    for n in [1u64, 10, 100] {
        for sigma in [0.05, 0.3] {
            assert!((final_width(s(0.0), c(n, sigma)) - sigma).abs() < 1e-12);
            assert!((final_width(s(1.0), c(n, sigma)) - sigma).abs() < 1e-12);
            assert!(final_width(s(0.01), c(n, sigma)) - sigma > 1e-12);
            assert!((exact_survival(s(1.0), c(n, sigma)).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn width_converges_monotonically_in_n() {
    let mut previous = f64::INFINITY;
    for k in 0..30 {
        let w = final_width(s(0.5), c(1u64 << k, 0.1));
        assert!(w < previous && w > 0.1);
        previous = w;
    }
    assert!((previous - 0.1).abs() < 1e-8);
}
