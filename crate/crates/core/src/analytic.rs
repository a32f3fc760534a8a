//! Closed-form predictions in the normal approximation of the binomial
//! weights: final width, survival probability, measurement uncertainties and
//! the performance ratio `R = u_SM / u_PM`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemState, ZenoConfig};

/// A single real Gaussian amplitude `A exp(−(Q−c)²/(4w²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub center: f64,
    pub width: f64,
    pub prefactor: f64,
}

impl GaussianPacket {
    pub fn amplitude(&self, q: f64) -> f64 {
        let d = q - self.center;
        self.prefactor * (-d * d / (4.0 * self.width * self.width)).exp()
    }

    pub fn density(&self, q: f64) -> f64 {
        self.amplitude(q).powi(2)
    }

    /// `∫ |amplitude|² dQ`.
    pub fn norm_sq(&self) -> f64 {
        self.prefactor * self.prefactor * (2.0 * PI).sqrt() * self.width
    }
}

/// Normal-approximation final packet: center `2r − 1`, width `σ_{N,r}`,
/// prefactor `√σ / ((2π)^{1/4} σ_{N,r})`. Intended for `Nσ ≫ 1`, not enforced.
pub fn approx_final_packet(state: SystemState, config: ZenoConfig) -> GaussianPacket {
    let width = final_width(state, config);
    GaussianPacket {
        center: state.expectation(),
        width,
        prefactor: config.sigma().sqrt() / ((2.0 * PI).powf(0.25) * width),
    }
}

/// Broadening variance `2r(1−r)/N` added to `σ²` over the protocol.
fn broadening(state: SystemState, config: ZenoConfig) -> f64 {
    2.0 * state.r() * (1.0 - state.r()) / config.stages() as f64
}

/// `σ_{N,r} = √(2r(1−r)/N + σ²)`, the width of the final pointer density.
pub fn final_width(state: SystemState, config: ZenoConfig) -> f64 {
    (broadening(state, config) + config.sigma().powi(2)).sqrt()
}

/// `σ_{N,r} / σ`.
pub fn width_ratio(state: SystemState, config: ZenoConfig) -> f64 {
    final_width(state, config) / config.sigma()
}

/// `p_{N,r} = [2r(1−r)/(Nσ²) + 1]^{−1/2} = σ/σ_{N,r}`.
pub fn survival_probability(state: SystemState, config: ZenoConfig) -> f64 {
    (broadening(state, config) / config.sigma().powi(2) + 1.0).powf(-0.5)
}

fn check_photons(photons: u64) -> Result<()> {
    if photons < 1 {
        return Err(Error::domain("photons", photons, "at least one photon is required"));
    }
    Ok(())
}

/// Standard deviation of the mean of `M` projective ±1 outcomes:
/// `u_SM = √(4r(1−r)) / √M`.
pub fn strong_uncertainty(state: SystemState, photons: u64) -> Result<f64> {
    check_photons(photons)?;
    Ok(state.outcome_variance().sqrt() / (photons as f64).sqrt())
}

/// `u_PM = σ_{N,r} / √(p_{N,r} M)`: only the surviving fraction of photons
/// reaches the pointer readout.
pub fn protective_uncertainty(state: SystemState, config: ZenoConfig, photons: u64) -> Result<f64> {
    check_photons(photons)?;
    let detected = survival_probability(state, config) * photons as f64;
    Ok(final_width(state, config) / detected.sqrt())
}

/// `R = √(4r(1−r)σ) / [2r(1−r)/N + σ²]^{3/4}`; zero at the extremal states.
///
/// The photon budget cancels between `u_SM` and `u_PM`.
pub fn performance_r(state: SystemState, config: ZenoConfig) -> f64 {
    let numerator = (state.outcome_variance() * config.sigma()).sqrt();
    numerator / (broadening(state, config) + config.sigma().powi(2)).powf(0.75)
}

/// Large-`N` limit of [`performance_r`]: `√(4r(1−r)) / σ`.
pub fn performance_r_large_n(state: SystemState, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma", sigma, "pointer width must be positive"));
    }
    Ok(state.outcome_variance().sqrt() / sigma)
}
