//! Exact final pointer packet next to its Gaussian approximation, in the
//! strong (N = 2) and weak (N = 100) regimes.

use zenopm::analytic::approx_final_packet;
use zenopm::model::exact_final_packet;
use zenopm::oracle::{approximation_error, grid_density, GridSpec};
use zenopm::{SystemState, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let state = SystemState::new(0.7)?;
    for n in [2, 100] {
        let config = ZenoConfig::new(n, 0.1)?;
        let packet = exact_final_packet(state, config);
        let approx = approx_final_packet(state, config);
        let grid = GridSpec::default_for(config);
        let density = grid_density(state, config, grid);
        let err = approximation_error(state, config, grid);

        println!("N = {n}, (Nσ)⁻¹ = {:.2}", config.weakness());
        println!("  components        {}", packet.len());
        println!("  peaks on grid     {}", density.local_maxima());
        println!("  exact norm        {:.6}", density.trapezoid());
        println!("  gaussian center   {:.4}, width {:.4}", approx.center, approx.width);
        println!("  L1 / sup error    {:.4} / {:.4}", err.l1, err.sup_norm);
    }
    Ok(())
}
