//! Exact cross-checks on the final pointer density `|f_{N,r}(Q)|²`.
//!
//! Every moment of a Gaussian superposition reduces to pairwise overlaps of
//! unit-norm Gaussians of common width `σ`:
//!
//! ```text
//! ∫ Φ(Q−a) Φ(Q−b) dQ      = O_ab = exp(−(a−b)²/(8σ²))
//! ∫ Q  Φ(Q−a) Φ(Q−b) dQ   = O_ab · (a+b)/2
//! ∫ Q² Φ(Q−a) Φ(Q−b) dQ   = O_ab · (σ² + ((a+b)/2)²)
//! ```
//!
//! so the survival probability, conditional mean and conditional variance are
//! double sums over packet components. Grid sampling is provided for plots,
//! quadrature checks and the Monte Carlo sampler.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::approx_final_packet;
use crate::error::{Error, Result};
use crate::model::{binomial_weights, exact_final_packet, SystemState, Wavepacket, ZenoConfig};
use crate::numeric::{trapezoid, CompensatedSum};

/// Default cap on `N` for the quadratic overlap sums.
pub const DEFAULT_MAX_STAGES: u64 = 2000;

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 8192;

/// Weights below this fraction of the largest weight are dropped from the
/// overlap sums. Their contribution is far below double precision of the total.
const NEGLIGIBLE_WEIGHT: f64 = 1e-17;

/// Uniform grid `min, min + h, ..., max` with `points` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    min: f64,
    max: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::domain("grid", format!("[{min}, {max}]"), "bounds must be finite"));
        }
        if !(min < max) {
            return Err(Error::domain("grid", format!("[{min}, {max}]"), "grid-min must be below grid-max"));
        }
        if points < 2 {
            return Err(Error::domain("grid-points", points, "at least two grid points are required"));
        }
        Ok(Self { min, max, points })
    }

    /// `[−1 − 6σ, 1 + 6σ]` with 8192 points: all packet mass lies within 6σ
    /// of the center range `[−1, 1]`.
    pub fn default_for(config: ZenoConfig) -> Self {
        let pad = 6.0 * config.sigma();
        Self {
            min: -1.0 - pad,
            max: 1.0 + pad,
            points: DEFAULT_GRID_POINTS,
        }
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }
}

/// Exact survival probability with the conditional pointer mean and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMoments {
    pub norm: f64,
    pub mean: f64,
    pub variance: f64,
}

impl ExactMoments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

#[inline]
fn overlap(distance: f64, sigma: f64) -> f64 {
    (-distance * distance / (8.0 * sigma * sigma)).exp()
}

fn significant_range(weights: &[f64]) -> Range<usize> {
    let max = weights.iter().copied().fold(0.0, f64::max);
    let floor = max * NEGLIGIBLE_WEIGHT;
    let start = weights.iter().position(|w| *w > floor).unwrap_or(0);
    let end = weights.iter().rposition(|w| *w > floor).map_or(0, |i| i + 1);
    start..end.max(start)
}

/// Overlap moments of an arbitrary packet with no stage cap.
///
/// Centers forming an arithmetic progression use a lag table, so only one
/// exponential per lag is evaluated.
pub fn packet_moments(packet: &Wavepacket) -> ExactMoments {
    let w = packet.weights();
    let c = packet.centers();
    let sigma = packet.sigma();
    let var0 = sigma * sigma;
    let range = significant_range(w);

    let table: Option<Vec<f64>> = packet
        .uniform_spacing()
        .map(|h| (0..range.len()).map(|d| overlap(d as f64 * h, sigma)).collect());

    let mut norm = CompensatedSum::new();
    let mut first = CompensatedSum::new();
    let mut second = CompensatedSum::new();
    for i in range.clone() {
        let wi = w[i];
        if wi == 0.0 {
            continue;
        }
        let diag = wi * wi;
        norm.add(diag);
        first.add(diag * c[i]);
        second.add(diag * (var0 + c[i] * c[i]));

        let (mut row_norm, mut row_first, mut row_second) = (0.0, 0.0, 0.0);
        for j in i + 1..range.end {
            let o = match &table {
                Some(t) => {
                    let o = t[j - i];
                    if o == 0.0 {
                        break;
                    }
                    o
                }
                None => overlap(c[j] - c[i], sigma),
            };
            let m = wi * w[j] * o;
            let mid = 0.5 * (c[i] + c[j]);
            row_norm += m;
            row_first += m * mid;
            row_second += m * (var0 + mid * mid);
        }
        norm.add(2.0 * row_norm);
        first.add(2.0 * row_first);
        second.add(2.0 * row_second);
    }

    let norm = norm.value();
    let mean = first.value() / norm;
    let variance = (second.value() / norm - mean * mean).max(0.0);
    ExactMoments {
        norm,
        mean,
        variance,
    }
}

/// `Σ_{n,m} w_n w_m T[|n−m|]` for a lag table `T`.
fn toeplitz_norm(weights: &[f64], table: &[f64]) -> f64 {
    let range = significant_range(weights);
    let w = &weights[range];
    let mut total = CompensatedSum::new();
    total.add(w.iter().map(|x| x * x).sum());
    for (lag, &o) in table.iter().enumerate().skip(1) {
        if o == 0.0 || lag >= w.len() {
            break;
        }
        let s: f64 = w.iter().zip(&w[lag..]).map(|(a, b)| a * b).sum();
        total.add(2.0 * o * s);
    }
    total.value()
}

/// Runs the overlap sums under a cap on the number of stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oracle {
    max_stages: Option<u64>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            max_stages: Some(DEFAULT_MAX_STAGES),
        }
    }
}

impl Oracle {
    pub fn with_max_stages(max_stages: u64) -> Self {
        Self {
            max_stages: Some(max_stages),
        }
    }

    /// No stage cap; runtime grows quadratically in `N`.
    pub fn unbounded() -> Self {
        Self { max_stages: None }
    }

    fn check(&self, config: ZenoConfig) -> Result<()> {
        match self.max_stages {
            Some(cap) if config.stages() > cap => Err(Error::StageCap {
                stages: config.stages(),
                cap,
            }),
            _ => Ok(()),
        }
    }

    pub fn exact_survival(&self, state: SystemState, config: ZenoConfig) -> Result<f64> {
        Ok(self.exact_moments(state, config)?.norm)
    }

    pub fn exact_moments(&self, state: SystemState, config: ZenoConfig) -> Result<ExactMoments> {
        self.check(config)?;
        Ok(packet_moments(&exact_final_packet(state, config)))
    }

    /// Stage-conditional survival probabilities `s_k = ‖g_k‖² / ‖g_{k−1}‖²`,
    /// `k = 1..=N`, where `g_k` is the unnormalized packet after `k` stages.
    /// Their product is the exact survival probability.
    pub fn stage_survival_profile(&self, state: SystemState, config: ZenoConfig) -> Result<Vec<f64>> {
        self.check(config)?;
        let n = config.stages();
        let sigma = config.sigma();
        // Stage-k centers are (2m − k)/N: spacing 2/N for every k.
        let spacing = 2.0 / n as f64;
        let table: Vec<f64> = (0..=n)
            .map(|d| overlap(d as f64 * spacing, sigma))
            .take_while(|o| *o > 0.0)
            .collect();

        let mut profile = Vec::with_capacity(n as usize);
        let mut previous = 1.0;
        for k in 1..=n {
            let w = binomial_weights(k, state.r())?;
            let norm = toeplitz_norm(&w, &table);
            profile.push(norm / previous);
            previous = norm;
        }
        Ok(profile)
    }
}

/// Exact survival probability `∫|f_{N,r}|² dQ` under the default stage cap.
pub fn exact_survival(state: SystemState, config: ZenoConfig) -> Result<f64> {
    Oracle::default().exact_survival(state, config)
}

/// Exact norm, conditional mean and conditional variance under the default cap.
pub fn exact_moments(state: SystemState, config: ZenoConfig) -> Result<ExactMoments> {
    Oracle::default().exact_moments(state, config)
}

/// A density tabulated on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledDensity {
    pub q: Vec<f64>,
    pub density: Vec<f64>,
    pub step: f64,
}

impl SampledDensity {
    pub fn trapezoid(&self) -> f64 {
        trapezoid(&self.density, self.step)
    }

    /// Node with the largest density.
    pub fn peak(&self) -> f64 {
        let (i, _) = self
            .density
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        self.q[i]
    }

    /// Number of strict interior local maxima.
    pub fn local_maxima(&self) -> usize {
        self.density
            .windows(3)
            .filter(|w| w[1] > w[0] && w[1] > w[2])
            .count()
    }
}

/// Samples `|f_{N,r}(Q)|²` on `grid`.
pub fn grid_density(state: SystemState, config: ZenoConfig, grid: GridSpec) -> SampledDensity {
    let packet = exact_final_packet(state, config);
    let q = grid.nodes();
    let density = q
        .par_chunks(1024)
        .flat_map_iter(|chunk| packet.amplitudes(chunk).into_iter().map(|a| a * a))
        .collect();
    SampledDensity {
        q,
        density,
        step: grid.step(),
    }
}

/// Exact and approximate densities side by side on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityComparison {
    pub q: Vec<f64>,
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
    pub step: f64,
}

pub fn compare_densities(state: SystemState, config: ZenoConfig, grid: GridSpec) -> DensityComparison {
    let exact = grid_density(state, config, grid);
    let approx_packet = approx_final_packet(state, config);
    let approx = exact.q.iter().map(|&x| approx_packet.density(x)).collect();
    DensityComparison {
        q: exact.q,
        exact: exact.density,
        approx,
        step: exact.step,
    }
}

/// Distance between the exact and normal-approximation densities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximationError {
    pub sup_norm: f64,
    pub l1: f64,
    /// `(σN)⁻¹`
    pub weakness: f64,
}

pub fn approximation_error(state: SystemState, config: ZenoConfig, grid: GridSpec) -> ApproximationError {
    let cmp = compare_densities(state, config, grid);
    let diff: Vec<f64> = cmp.exact.iter().zip(&cmp.approx).map(|(e, a)| (e - a).abs()).collect();
    ApproximationError {
        sup_norm: diff.iter().copied().fold(0.0, f64::max),
        l1: trapezoid(&diff, cmp.step),
        weakness: config.weakness(),
    }
}
