//! Smallest number of Zeno stages that reaches a target performance ratio.

use zenopm::analytic::{performance_r, performance_r_large_n};
use zenopm::sweep::{inverse_design, Design};
use zenopm::{SystemState, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let (state, sigma) = (SystemState::new(0.5)?, 0.1);
    println!("limit R = {}", performance_r_large_n(state, sigma)?);
    for target in [2.0, 5.946, 9.0, 9.99, 10.0] {
        match inverse_design(target, state, sigma)? {
            Design::Stages(n) => {
                let achieved = performance_r(state, ZenoConfig::new(n, sigma)?);
                println!("R ≥ {target}: N = {n} (R = {achieved:.4})");
            }
            Design::Infeasible => println!("R ≥ {target}: not reachable"),
        }
    }
    Ok(())
}
