//! Builds the final packet one stage at a time and checks it against the
//! binomial closed form, the overlap-sum moments and grid quadrature.

use zenopm::model::{exact_final_packet, stage_recurrence};
use zenopm::oracle::{grid_density, packet_moments, GridSpec};
use zenopm::{SystemState, Wavepacket, ZenoConfig};

fn main() -> zenopm::Result<()> {
    let (state, config) = (SystemState::new(0.7)?, ZenoConfig::new(20, 0.1)?);

    let mut packet = Wavepacket::initial(config.sigma())?;
    for stage in 1..=config.stages() {
        let next = stage_recurrence(&packet, config.per_stage_shift(), state.r());
        let ratio = packet_moments(&next).norm / packet_moments(&packet).norm;
        if stage % 5 == 0 {
            println!("stage {stage:>2}: {} components, stage survival {ratio:.6}", next.len());
        }
        packet = next;
    }

    let closed = exact_final_packet(state, config);
    let deviation = packet
        .components()
        .zip(closed.components())
        .map(|((w1, c1), (w2, c2))| (w1 - w2).abs().max((c1 - c2).abs()))
        .fold(0.0, f64::max);
    println!("max deviation from closed form: {deviation:.2e}");

    let m = packet_moments(&closed);
    let quad = grid_density(state, config, GridSpec::default_for(config)).trapezoid();
    println!("norm {:.12} (quadrature {quad:.12})", m.norm);
    println!("mean {:.6}, std {:.6}", m.mean, m.std_dev());
    Ok(())
}
