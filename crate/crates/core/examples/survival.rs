//! Probability that the state survives all Zeno projections: the closed form
//! `σ/σ_Nr` against the exact overlap sum.

use zenopm::analytic::{final_width, survival_probability};
use zenopm::oracle::Oracle;
use zenopm::{SystemState, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let oracle = Oracle::default();
    println!("{:>5} {:>5} {:>6} {:>10} {:>10} {:>10}", "r", "N", "sigma", "sigma_Nr", "closed", "exact");
    for r in [0.5, 0.7, 0.95] {
        let state = SystemState::new(r)?;
        for n in [5, 50, 100, 1000] {
            let config = ZenoConfig::new(n, 0.1)?;
            println!(
                "{r:>5} {n:>5} {:>6} {:>10.6} {:>10.6} {:>10.6}",
                config.sigma(),
                final_width(state, config),
                survival_probability(state, config),
                oracle.exact_survival(state, config)?,
            );
        }
    }

    // Per-stage survival: the product over stages is the total.
    let profile = oracle.stage_survival_profile(SystemState::new(0.5)?, ZenoConfig::new(10, 0.1)?)?;
    let total: f64 = profile.iter().product();
    println!("\nstage survival (r=0.5, N=10): {profile:.4?}");
    println!("product = {total:.6}");
    Ok(())
}
