//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::process::Command;
use std::time::Instant;

use zenopm::analytic::{final_width, performance_r, performance_r_large_n, survival_probability, width_ratio};
use zenopm::model::{exact_final_packet, stage_recurrence};
use zenopm::montecarlo::Simulator;
use zenopm::oracle::{approximation_error, exact_moments, exact_survival, grid_density, GridSpec};
use zenopm::{RunSeed, SystemState, Wavepacket, ZenoConfig};

type Outcome = Result<String, String>;

fn s(r: f64) -> SystemState {
    SystemState::new(r).unwrap()
}

fn c(n: u64, sigma: f64) -> ZenoConfig {
    ZenoConfig::new(n, sigma).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// r = 0, 0.05, ..., 1
fn r_axis() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// N = 5, 10, ..., 100
fn n_axis() -> Vec<u64> {
    (1..=20).map(|i| 5 * i).collect()
}

const SIGMAS: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

// Published values, not the constant 1/√2.
#[allow(clippy::approx_constant)]
fn survival_claims() -> Outcome {
    let p50 = survival_probability(s(0.5), c(50, 0.1));
    let p100 = survival_probability(s(0.5), c(100, 0.1));
    let ok = (p50 - 0.7071).abs() <= 0.0005
        && (p100 - 0.8165).abs() <= 0.0005
        && format!("{p50:.2}") == "0.71"
        && format!("{p100:.2}") == "0.82";
    check(ok, format!("p(50) = {p50:.6}, p(100) = {p100:.6}"))
}

fn survival_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for &r in &r_axis() {
        for &n in &n_axis() {
            for &sigma in &SIGMAS {
                let (st, cf) = (s(r), c(n, sigma));
                worst = worst.max((survival_probability(st, cf) - sigma / final_width(st, cf)).abs());
                count += 1;
            }
        }
    }
    check(count == 21 * 20 * 4 && worst <= 1e-14, format!("{count} points, max |p − σ/σ_Nr| = {worst:.2e}"))
}

fn oracle_consistency() -> Outcome {
    let mut worst_quad: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    let mut weak_points = 0;
    for &r in &r_axis() {
        for &n in &n_axis() {
            for &sigma in &SIGMAS {
                let (st, cf) = (s(r), c(n, sigma));
                let exact = exact_survival(st, cf).unwrap();
                let quad = grid_density(st, cf, GridSpec::default_for(cf)).trapezoid();
                worst_quad = worst_quad.max((exact - quad).abs());
                if n as f64 * sigma * sigma >= 0.5 && n >= 25 {
                    weak_points += 1;
                    worst_rel = worst_rel.max((exact - survival_probability(st, cf)).abs() / exact);
                }
            }
        }
    }
    check(
        worst_quad <= 1e-8 && worst_rel <= 0.01 && weak_points > 0,
        format!("max |exact − quadrature| = {worst_quad:.2e}; max closed-form rel. error = {worst_rel:.2e} over {weak_points} weak-regime points"),
    )
}

fn unroll_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1u64, 2, 5, 10, 20] {
        for r in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let (st, cf) = (s(r), c(n, 0.1));
            let mut p = Wavepacket::initial(cf.sigma()).unwrap();
            for _ in 0..n {
                p = stage_recurrence(&p, cf.per_stage_shift(), r);
            }
            let exact = exact_final_packet(st, cf);
            if p.len() != exact.len() {
                return Err(format!("N = {n}: {} vs {} components", p.len(), exact.len()));
            }
            for ((w1, c1), (w2, c2)) in p.components().zip(exact.components()) {
                worst = worst.max((w1 - w2).abs()).max((c1 - c2).abs());
            }
        }
    }
    check(worst <= 1e-12, format!("max weight/center deviation = {worst:.2e}"))
}

fn approximation_quality() -> Outcome {
    let weak = c(100, 0.1);
    let strong = c(2, 0.1);
    let l1_weak = approximation_error(s(0.7), weak, GridSpec::default_for(weak)).l1;
    let l1_strong = approximation_error(s(0.7), strong, GridSpec::default_for(strong)).l1;
    check(
        l1_weak < 0.05 && l1_strong > 0.2,
        format!("L1(N=100) = {l1_weak:.4}, L1(N=2) = {l1_strong:.4}"),
    )
}

fn broadening_bound() -> Outcome {
    let sigmas = [0.05, 0.1, 0.2];
    let mut ok = true;
    let mut note = String::new();
    for &n in &(5..=100).collect::<Vec<u64>>() {
        for &sigma in &sigmas {
            let mut best = (f64::MIN, 0.0);
            for &r in &r_axis() {
                let (st, cf) = (s(r), c(n, sigma));
                let excess = final_width(st, cf) - sigma;
                let extremal = r == 0.0 || r == 1.0;
                if excess < -1e-12 || (extremal && excess.abs() > 1e-12) || (!extremal && excess <= 1e-12) {
                    ok = false;
                    note = format!("violated at r={r}, N={n}, σ={sigma}");
                }
                let ratio = width_ratio(st, cf);
                if ratio > best.0 {
                    best = (ratio, r);
                }
            }
            if best.1 != 0.5 {
                ok = false;
                note = format!("ratio maximal at r={} for N={n}, σ={sigma}", best.1);
            }
        }
    }
    check(ok, if ok { "σ_Nr ≥ σ, equality only at r ∈ {0,1}, max ratio at r = 0.5".into() } else { note })
}

fn monte_carlo_suite() -> Outcome {
    let (st, cf, m) = (s(0.5), c(50, 0.1), 100_000u64);
    let cmp = Simulator::default().compare_schemes(st, cf, m, RunSeed(20240)).unwrap();
    let p = exact_survival(st, cf).unwrap();
    let frac = cmp.protective.survivor_fraction();
    let band = 4.0 * (p * (1.0 - p) / m as f64).sqrt();
    let exact_std = exact_moments(st, cf).unwrap().std_dev();
    let std = cmp.protective.sample_std().unwrap();
    let r_formula = performance_r(st, cf);
    let r_alt = survival_probability(st, cf).sqrt() * st.outcome_variance().sqrt() / final_width(st, cf);
    let r_emp = cmp.performance.ratio().unwrap();
    let ok = (frac - p).abs() <= band
        && (std - exact_std).abs() / exact_std <= 0.02
        && (r_formula - r_alt).abs() < 1e-12
        && (r_formula - 5.946).abs() < 1e-3
        && (r_emp - r_formula).abs() / r_formula <= 0.05;
    check(
        ok,
        format!(
            "survivors {frac:.5} vs {p:.5} (±{band:.5}); std {std:.5} vs {exact_std:.5}; R_mc {r_emp:.4} vs {r_formula:.4}"
        ),
    )
}

fn large_n_limit() -> Outcome {
    let limit = performance_r_large_n(s(0.5), 0.1).unwrap();
    let r = performance_r(s(0.5), c(1_000_000_000, 0.1));
    let rel = (r - limit).abs() / limit;
    check(rel <= 1e-3 && (limit - 10.0).abs() < 1e-12, format!("R(10⁹) = {r:.9}, limit = {limit}"))
}

fn advantage_region() -> Outcome {
    let mut min_r: f64 = f64::INFINITY;
    for i in 2..=18 {
        let r = i as f64 / 20.0;
        for n in 5..=100u64 {
            for sigma in [0.05, 0.1, 0.2] {
                min_r = min_r.min(performance_r(s(r), c(n, sigma)));
            }
        }
    }
    let extremal = performance_r(s(0.001), c(5, 0.3));
    check(
        min_r > 1.0 && extremal < 1.0,
        format!("min R over r ∈ [0.1, 0.9] = {min_r:.4}; R(r=0.001, N=5, σ=0.3) = {extremal:.4}"),
    )
}

fn determinism() -> Outcome {
    let run = |threads: &str, args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_zenopm"))
            .args(args)
            .env("ZENOPM_THREADS", threads)
            .output()
            .expect("binary runs");
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let suites: [&[&str]; 2] = [
        &[
            "montecarlo", "--r", "0.3,0.5,0.9", "--stages", "10,50", "--sigma", "0.1", "--photons", "100000", "--seed", "7",
        ],
        &[
            "montecarlo", "--r", "0.5", "--stages", "50", "--sigma", "0.1", "--photons", "100000", "--seed", "7",
            "--attrition",
        ],
    ];
    let mut bytes = 0;
    for args in suites {
        let one = run("1", args)?;
        let many = run("4", args)?;
        let auto = run("0", args)?;
        if one != many || one != auto {
            return Err(format!("outputs differ for {:?}", args));
        }
        bytes += one.len();
    }
    Ok(format!("ZENOPM_THREADS ∈ {{1, 4, 0}} give identical CSV ({bytes} bytes)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("survival claims p(50) ≈ 0.71, p(100) ≈ 0.82", survival_claims),
        ("identity p = σ/σ_Nr on 21×20×4 grid", survival_identity),
        ("oracle vs quadrature and closed form", oracle_consistency),
        ("unrolled recurrence equals closed form", unroll_equivalence),
        ("normal approximation quality by regime", approximation_quality),
        ("broadening bound and maximum at r = 0.5", broadening_bound),
        ("Monte Carlo statistical suite", monte_carlo_suite),
        ("large-N limit of R", large_n_limit),
        ("advantage region R > 1", advantage_region),
        ("determinism across worker counts", determinism),
    ];
    let mut failures = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = criterion();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2}. {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] {:>2}. {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
