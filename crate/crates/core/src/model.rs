//! Measurement model: the protected two-outcome state, the Zeno stage
//! configuration, and the exact final pointer wave packet.
//!
//! A Zeno stage couples the observable `Π₊ − Π₋` to the pointer momentum for
//! a duration `T/N` and then projects back onto the prepared state. With the
//! coupling normalized to `g = 1/T`, one stage maps the pointer amplitude as
//!
//! ```text
//! Φ(Q)  ->  r Φ(Q − 1/N) + (1 − r) Φ(Q + 1/N)
//! ```
//!
//! so after `N` stages the unnormalized packet is a binomially weighted sum of
//! Gaussians centered at `(2n − N)/N`. Its squared norm is the probability that
//! the system survived every projection.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Protected qubit state `√r |+⟩ + √(1−r) |−⟩`. The relative phase is not
/// observable through `Π₊ − Π₋` and is not carried.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemState {
    r: f64,
}

impl SystemState {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain("r", r, "weight must lie in [0, 1]"));
        }
        Ok(Self { r })
    }

    /// State with `r = cos²θ`, for a polarization angle `θ ∈ [0, π/2]`.
    pub fn from_theta(theta: f64) -> Result<Self> {
        if !(0.0..=PI / 2.0).contains(&theta) {
            return Err(Error::domain("theta", theta, "angle must lie in [0, π/2]"));
        }
        let c = theta.cos();
        Self::new((c * c).clamp(0.0, 1.0))
    }

    /// Weight of the `|+⟩` component.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.r.sqrt().acos()
    }

    /// `4r(1−r) = sin²2θ`, the variance of a single ±1 outcome.
    pub fn outcome_variance(&self) -> f64 {
        4.0 * self.r * (1.0 - self.r)
    }

    /// Expectation value `⟨Π₊ − Π₋⟩ = 2r − 1`.
    pub fn expectation(&self) -> f64 {
        2.0 * self.r - 1.0
    }

    pub fn is_extremal(&self) -> bool {
        self.r == 0.0 || self.r == 1.0
    }

    /// The state with `|+⟩` and `|−⟩` exchanged.
    pub fn mirrored(&self) -> Self {
        Self { r: 1.0 - self.r }
    }
}

/// Number of Zeno stages and initial pointer width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoConfig {
    stages: u64,
    sigma: f64,
}

impl ZenoConfig {
    pub fn new(stages: u64, sigma: f64) -> Result<Self> {
        if stages < 1 {
            return Err(Error::domain("stages", stages, "at least one Zeno stage is required"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "pointer width must be positive and finite"));
        }
        Ok(Self { stages, sigma })
    }

    pub fn stages(&self) -> u64 {
        self.stages
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Pointer shift per stage, `1/N`; the total shift is normalized to `[−1, 1]`.
    pub fn per_stage_shift(&self) -> f64 {
        1.0 / self.stages as f64
    }

    /// `(Nσ)⁻¹`; the measurement is weak when this is much smaller than one.
    pub fn weakness(&self) -> f64 {
        1.0 / (self.stages as f64 * self.sigma)
    }

    pub fn is_strong_regime(&self) -> bool {
        self.weakness() > 1.0
    }
}

/// Unit-norm Gaussian pointer amplitude of width `sigma` centered at `center`:
/// `(2πσ²)^{−1/4} exp(−(Q−c)²/(4σ²))`.
pub fn gaussian_amplitude(q: f64, center: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::domain("sigma", sigma, "pointer width must be positive"));
    }
    Ok(unit_gaussian(q, center, sigma))
}

#[inline]
pub(crate) fn unit_gaussian(q: f64, center: f64, sigma: f64) -> f64 {
    let d = q - center;
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-d * d / (4.0 * sigma * sigma)).exp()
}

/// Binomial weights `C(N,n) rⁿ (1−r)^{N−n}` for `n = 0..=N`.
///
/// Evaluated by a multiplicative recurrence outward from the mode and then
/// normalized with a compensated sum, so there are no factorials and no
/// underflow of the starting term for large `N`. Tail entries below the
/// smallest positive double come out as zero.
pub fn binomial_weights(n: u64, r: f64) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::domain("N", n, "at least one trial is required"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain("r", r, "probability must lie in [0, 1]"));
    }
    let len = n as usize + 1;
    let mut w = vec![0.0; len];
    if r == 0.0 {
        w[0] = 1.0;
        return Ok(w);
    }
    if r == 1.0 {
        w[len - 1] = 1.0;
        return Ok(w);
    }

    let nf = n as f64;
    let odds = r / (1.0 - r);
    let mode = (((nf + 1.0) * r).floor() as usize).min(len - 1);
    w[mode] = 1.0;
    for k in mode..len - 1 {
        // w[k+1] / w[k] = (N − k)/(k + 1) · r/(1 − r)
        w[k + 1] = w[k] * ((nf - k as f64) / (k as f64 + 1.0)) * odds;
    }
    for k in (0..mode).rev() {
        w[k] = w[k + 1] * ((k as f64 + 1.0) / (nf - k as f64)) / odds;
    }
    let total = compensated_sum(w.iter().copied());
    for x in &mut w {
        *x /= total;
    }
    Ok(w)
}

/// A weighted superposition of unit-norm Gaussians sharing one width.
///
/// The packet is unnormalized: its squared norm is a survival probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Wavepacket {
    weights: Vec<f64>,
    centers: Vec<f64>,
    sigma: f64,
}

impl Wavepacket {
    pub fn new(weights: Vec<f64>, centers: Vec<f64>, sigma: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::domain("weights", 0, "a packet needs at least one component"));
        }
        if weights.len() != centers.len() {
            return Err(Error::domain(
                "centers",
                centers.len(),
                "weights and centers must have equal length",
            ));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::domain("weights", w, "weights must be finite and non-negative"));
        }
        if let Some(c) = centers.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain("centers", c, "centers must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain("sigma", sigma, "pointer width must be positive and finite"));
        }
        Ok(Self {
            weights,
            centers,
            sigma,
        })
    }

    /// The initial pointer state: one Gaussian of weight 1 at the origin.
    pub fn initial(sigma: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![0.0], sigma)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.centers.iter().copied())
    }

    pub fn weight_sum(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Pointer amplitude `Σ w_n Φ(Q − c_n)`.
    pub fn amplitude(&self, q: f64) -> f64 {
        compensated_sum(
            self.components()
                .filter(|(w, _)| *w != 0.0)
                .map(|(w, c)| w * unit_gaussian(q, c, self.sigma)),
        )
    }

    /// Unnormalized pointer density `|f(Q)|²`.
    pub fn density(&self, q: f64) -> f64 {
        let a = self.amplitude(q);
        a * a
    }

    /// Amplitudes at many points.
    ///
    /// For lattice packets the Gaussians at one `Q` are generated outward from
    /// the nearest center by the ratio recurrence
    /// `g_{i±1} = g_i · exp((∓2 d_i h − h²)/(4σ²))`, with `d_i = Q − c_i`, so
    /// only three exponentials are evaluated per point.
    pub fn amplitudes(&self, qs: &[f64]) -> Vec<f64> {
        let Some(h) = self.uniform_spacing() else {
            return qs.iter().map(|&q| self.amplitude(q)).collect();
        };
        let k = 4.0 * self.sigma * self.sigma;
        let norm = (2.0 * PI * self.sigma * self.sigma).powf(-0.25);
        let c0 = self.centers[0];
        let last = self.centers.len() - 1;
        let step_decay = (-2.0 * h * h / k).exp();
        qs.iter()
            .map(|&q| {
                let j = ((q - c0) / h).round().clamp(0.0, last as f64) as usize;
                let d = q - (c0 + j as f64 * h);
                let peak = (-d * d / k).exp();
                let mut total = self.weights[j] * peak;

                let (mut g, mut ratio) = (peak, ((2.0 * d * h - h * h) / k).exp());
                for w in &self.weights[j + 1..] {
                    g *= ratio;
                    if g == 0.0 {
                        break;
                    }
                    total += w * g;
                    ratio *= step_decay;
                }
                let (mut g, mut ratio) = (peak, ((-2.0 * d * h - h * h) / k).exp());
                for w in self.weights[..j].iter().rev() {
                    g *= ratio;
                    if g == 0.0 {
                        break;
                    }
                    total += w * g;
                    ratio *= step_decay;
                }
                norm * total
            })
            .collect()
    }

    /// Common spacing of the centers when they form an increasing arithmetic
    /// progression (to a relative tolerance of 1e-9).
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.centers.len() < 2 {
            return None;
        }
        let h = (self.centers[self.centers.len() - 1] - self.centers[0])
            / (self.centers.len() - 1) as f64;
        if !(h > 0.0) {
            return None;
        }
        let uniform = self
            .centers
            .iter()
            .enumerate()
            .all(|(i, c)| (c - (self.centers[0] + i as f64 * h)).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }
}

/// The exact unnormalized final pointer packet after `N` Zeno stages:
/// weights `C(N,n) rⁿ(1−r)^{N−n}` at centers `(2n−N)/N`.
pub fn exact_final_packet(state: SystemState, config: ZenoConfig) -> Wavepacket {
    let n = config.stages();
    let weights = binomial_weights(n, state.r()).expect("validated state and config");
    let nf = n as f64;
    let centers = (0..=n).map(|k| (2.0 * k as f64 - nf) / nf).collect();
    Wavepacket {
        weights,
        centers,
        sigma: config.sigma(),
    }
}

/// One Zeno stage acting on the pointer: every component `(w, c)` splits into
/// `(r·w, c + shift)` and `((1−r)·w, c − shift)`.
///
/// Coincident centers are merged by adding weights. When all input centers
/// are integer multiples of `shift` the merge uses the integer multiples as
/// keys, so float rounding never splits a bin. Otherwise only bitwise-equal
/// centers are merged. Zero-weight branches are kept so extremal states retain
/// the full lattice. The output is sorted by center.
pub fn stage_recurrence(packet: &Wavepacket, shift: f64, r: f64) -> Wavepacket {
    let lattice: Option<Vec<i64>> = packet
        .centers
        .iter()
        .map(|&c| {
            let k = (c / shift).round();
            ((c - k * shift).abs() <= 1e-9 * shift).then_some(k as i64)
        })
        .collect();

    let (weights, centers) = match lattice {
        Some(keys) => {
            let mut merged: BTreeMap<i64, f64> = BTreeMap::new();
            for (&k, &w) in keys.iter().zip(&packet.weights) {
                *merged.entry(k - 1).or_default() += (1.0 - r) * w;
                *merged.entry(k + 1).or_default() += r * w;
            }
            merged
                .into_iter()
                .map(|(k, w)| (w, k as f64 * shift))
                .unzip()
        }
        None => {
            let mut split: Vec<(f64, f64)> = packet
                .components()
                .flat_map(|(w, c)| [(c - shift, (1.0 - r) * w), (c + shift, r * w)])
                .collect();
            split.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut out: Vec<(f64, f64)> = Vec::with_capacity(split.len());
            for (c, w) in split {
                match out.last_mut() {
                    Some(last) if last.1.to_bits() == c.to_bits() => last.0 += w,
                    _ => out.push((w, c)),
                }
            }
            out.into_iter().unzip()
        }
    };

    Wavepacket {
        weights,
        centers,
        sigma: packet.sigma,
    }
}
