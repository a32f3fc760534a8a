//! Reference values computed by routes independent of the implementation:
//! exact integer arithmetic, brute-force quadrature and direct summation.

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use std::f64::consts::PI;

use zenopm::analytic::{final_width, survival_probability};
use zenopm::model::{binomial_weights, exact_final_packet, stage_recurrence};
use zenopm::oracle::{approximation_error, exact_moments, exact_survival, grid_density, GridSpec};
use zenopm::{SystemState, Wavepacket, ZenoConfig};

fn s(r: f64) -> SystemState {
    SystemState::new(r).unwrap()
}

fn c(n: u64, sigma: f64) -> ZenoConfig {
    ZenoConfig::new(n, sigma).unwrap()
}

/// `C(n, k) rᵏ (1−r)^{n−k}` by a direct product, adequate for n ≤ 100.
fn pmf_direct(n: u64, k: u64, r: f64) -> f64 {
    let mut coeff = 1.0;
    for i in 0..k {
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    coeff * r.powi(k as i32) * (1.0 - r).powi((n - k) as i32)
}

/// `|Σ_n w_n Φ(Q − c_n)|²` written out from scratch.
fn density_direct(q: f64, n: u64, r: f64, sigma: f64) -> f64 {
    let amp: f64 = (0..=n)
        .map(|k| {
            let center = (2.0 * k as f64 - n as f64) / n as f64;
            let d = q - center;
            pmf_direct(n, k, r) * (2.0 * PI * sigma * sigma).powf(-0.25) * (-d * d / (4.0 * sigma * sigma)).exp()
        })
        .sum();
    amp * amp
}

/// Trapezoid moments `∫ Qᵏ f(Q) dQ` for k = 0, 1, 2.
fn quadrature_moments(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> [f64; 3] {
    let h = (hi - lo) / (points - 1) as f64;
    let mut m = [0.0; 3];
    for i in 0..points {
        let q = lo + i as f64 * h;
        let wt = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
        let v = f(q) * wt * h;
        m[0] += v;
        m[1] += v * q;
        m[2] += v * q * q;
    }
    m
}

#[test]
fn binomial_entry_matches_exact_rational() {
    // C(50,35) · 7³⁵ · 3¹⁵ / 10⁵⁰ for r = 7/10.
    let mut coeff = BigUint::from(1u32);
    for i in 0..35u32 {
        coeff *= 50 - i;
    }
    for i in 1..=35u32 {
        coeff /= i;
    }
    let numerator = coeff * BigUint::from(7u32).pow(35u32) * BigUint::from(3u32).pow(15u32);
    let scale = BigUint::from(10u32).pow(30u32);
    let denominator = BigUint::from(10u32).pow(50u32);
    let exact = (numerator * &scale / denominator).to_f64().unwrap() / scale.to_f64().unwrap();

    let w = binomial_weights(50, 0.7).unwrap();
    assert!(((w[35] - exact) / exact).abs() < 1e-12, "{} vs {}", w[35], exact);
}

#[test]
fn binomial_weights_match_direct_products() {
    for &(n, r) in &[(10u64, 0.3), (64, 0.5), (100, 0.91)] {
        let w = binomial_weights(n, r).unwrap();
        for k in 0..=n {
            let d = pmf_direct(n, k, r);
            assert!((w[k as usize] - d).abs() <= 1e-12 * d.max(1e-300), "n={n} k={k}");
        }
    }
}

#[test]
fn two_stage_survival_matches_quadrature() {
    let m = quadrature_moments(|q| density_direct(q, 2, 0.5, 0.5), -8.0, 8.0, 1_000_001);
    let p = exact_survival(s(0.5), c(2, 0.5)).unwrap();
    assert!((p - m[0]).abs() < 1e-10, "{p} vs {}", m[0]);
}

#[test]
fn weak_regime_moments_match_quadrature() {
    let (r, n, sigma) = (0.7, 50, 0.1);
    let m = quadrature_moments(|q| density_direct(q, n, r, sigma), -2.0, 2.0, 1_000_001);
    let mean_q = m[1] / m[0];
    let var_q = m[2] / m[0] - mean_q * mean_q;

    let exact = exact_moments(s(r), c(n, sigma)).unwrap();
    assert!((exact.norm - m[0]).abs() < 1e-10);
    assert!((exact.mean - mean_q).abs() < 1e-10);
    assert!((exact.variance - var_q).abs() < 1e-10);

    // Closed-form width and center in the weak regime.
    assert!((exact.mean - 0.4).abs() < 0.01);
    let width = final_width(s(r), c(n, sigma));
    assert!((width - 0.13565).abs() < 1e-5);
    assert!((exact.std_dev() - width).abs() / width < 0.02);
}

#[test]
fn hundred_stage_survival_is_consistent_with_closed_form() {
    let p = exact_survival(s(0.5), c(100, 0.1)).unwrap();
    assert!((p - 0.8165).abs() / 0.8165 < 0.01, "{p}");
    assert!((p - survival_probability(s(0.5), c(100, 0.1))).abs() / p < 0.01);
}

#[test]
fn grid_density_trapezoid_matches_overlap_sum() {
    let grid = GridSpec::new(-2.0, 2.0, 4001).unwrap();
    let d = grid_density(s(0.7), c(10, 0.1), grid);
    let p = exact_survival(s(0.7), c(10, 0.1)).unwrap();
    assert!((d.trapezoid() - p).abs() < 1e-6);
    for (q, v) in d.q.iter().zip(&d.density).step_by(97) {
        assert!((v - density_direct(*q, 10, 0.7, 0.1)).abs() < 1e-12);
    }
}

#[test]
fn unrolled_recurrence_equals_closed_form() {
    for n in 1..=20u64 {
        let (st, cf) = (s(0.37), c(n, 0.15));
        let mut p = Wavepacket::initial(cf.sigma()).unwrap();
        for _ in 0..n {
            p = stage_recurrence(&p, cf.per_stage_shift(), st.r());
        }
        let exact = exact_final_packet(st, cf);
        assert_eq!(p.len(), exact.len(), "N = {n}");
        for ((w1, c1), (w2, c2)) in p.components().zip(exact.components()) {
            assert!((w1 - w2).abs() < 1e-12 && (c1 - c2).abs() < 1e-12, "N = {n}");
        }
    }
}

#[test]
fn stage_norm_ratios_multiply_to_survival() {
    // Norms of explicitly unrolled packets, independent of the lag-table path.
    let (st, cf) = (s(0.5), c(30, 0.08));
    let mut p = Wavepacket::initial(cf.sigma()).unwrap();
    let mut product = 1.0;
    let mut previous = 1.0;
    for _ in 0..cf.stages() {
        p = stage_recurrence(&p, cf.per_stage_shift(), st.r());
        let norm = zenopm::oracle::packet_moments(&p).norm;
        product *= norm / previous;
        previous = norm;
    }
    assert!((product - exact_survival(st, cf).unwrap()).abs() < 1e-10);
}

#[test]
fn approximation_error_separates_regimes() {
    let weak = c(100, 0.1);
    let strong = c(2, 0.1);
    let e_weak = approximation_error(s(0.7), weak, GridSpec::default_for(weak));
    let e_strong = approximation_error(s(0.7), strong, GridSpec::default_for(strong));
    assert!(e_weak.l1 <= 0.05, "{}", e_weak.l1);
    assert!(e_strong.l1 > 0.2, "{}", e_strong.l1);
    assert!((e_strong.weakness - 5.0).abs() < 1e-12);
}
