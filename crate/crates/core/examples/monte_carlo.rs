//! Photon-by-photon simulation of both schemes with a fixed seed. Rerunning
//! with any number of worker threads reproduces the same numbers.

use zenopm::analytic::{performance_r, strong_uncertainty};
use zenopm::montecarlo::Simulator;
use zenopm::oracle::exact_moments;
use zenopm::{RunSeed, SystemState, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let (state, config) = (SystemState::new(0.5)?, ZenoConfig::new(50, 0.1)?);
    let photons = 100_000;
    let cmp = Simulator::default().compare_schemes(state, config, photons, RunSeed(2024))?;
    let exact = exact_moments(state, config)?;

    let proj = &cmp.projective;
    println!("projective: mean {:+.5}, std error {:.5} (closed form {:.5})",
        proj.mean_shift().unwrap_or(f64::NAN),
        proj.mean_std_error().unwrap_or(f64::NAN),
        strong_uncertainty(state, photons)?);

    let prot = &cmp.protective;
    println!(
        "protective: {} of {photons} survive ({:.4}, exact {:.4})",
        prot.survivors,
        prot.survivor_fraction(),
        exact.norm
    );
    println!("            pointer std {:.5} (exact {:.5})", prot.sample_std().unwrap_or(f64::NAN), exact.std_dev());

    let curve = prot.attrition_curve();
    println!("            alive after stages 1, 10, 50: {}, {}, {}", curve[0], curve[9], curve[49]);

    match cmp.performance.ratio() {
        Some(r) => println!("R_mc = {r:.4}, closed form {:.4}", performance_r(state, config)),
        None => println!("R_mc undefined: {:?}", cmp.performance),
    }
    Ok(())
}
