//! Uncertainty of projective versus protective estimates of `⟨Π₊ − Π₋⟩` and
//! their ratio `R`, approaching `√(4r(1−r))/σ` as `N` grows.

use zenopm::analytic::{performance_r, performance_r_large_n, protective_uncertainty, strong_uncertainty};
use zenopm::{SystemState, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let photons = 10_000;
    let sigma = 0.1;
    for r in [0.5, 0.9, 0.999] {
        let state = SystemState::new(r)?;
        let limit = performance_r_large_n(state, sigma)?;
        println!("r = {r}: u_SM = {:.3e}, R(∞) = {limit:.4}", strong_uncertainty(state, photons)?);
        for n in [5, 10, 50, 100, 10_000] {
            let config = ZenoConfig::new(n, sigma)?;
            println!(
                "  N = {n:>6}  u_PM = {:.3e}  R = {:.4}",
                protective_uncertainty(state, config, photons)?,
                performance_r(state, config)
            );
        }
    }
    Ok(())
}
