//! Ensemble simulation of the two measurement schemes.
//!
//! Protective: each of `M` photons passes `N` Zeno stages, surviving stage `k`
//! with the stage-conditional probability `s_k`; survivors are read out at a
//! pointer position drawn from the exact conditional final density.
//! Projective: each photon yields `+1` with probability `r`, else `−1`.
//!
//! Photons are simulated in parallel, each on its own counter-based stream,
//! and collected in index order before reduction. Results are bit-identical
//! for any worker count.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{SystemState, ZenoConfig};
use crate::numeric::compensated_sum;
use crate::oracle::{grid_density, GridSpec, Oracle, SampledDensity};
use crate::rng::{Purpose, RunSeed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Protective,
    Projective,
}

/// Sample mean of the detected readouts with its spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    /// Bessel-corrected; zero for a single sample.
    pub sample_std: f64,
    /// `sample_std / √survivors`
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub scheme: Scheme,
    pub photons_in: u64,
    pub survivors: u64,
    /// `None` when no photon survived.
    pub estimate: Option<MeanEstimate>,
    /// Photons lost at each Zeno stage; empty for the projective scheme.
    pub stage_losses: Vec<u64>,
}

impl EnsembleStats {
    pub fn is_degenerate(&self) -> bool {
        self.estimate.is_none()
    }

    pub fn survivor_fraction(&self) -> f64 {
        self.survivors as f64 / self.photons_in as f64
    }

    pub fn mean_shift(&self) -> Option<f64> {
        self.estimate.map(|e| e.mean)
    }

    pub fn sample_std(&self) -> Option<f64> {
        self.estimate.map(|e| e.sample_std)
    }

    pub fn mean_std_error(&self) -> Option<f64> {
        self.estimate.map(|e| e.std_error)
    }

    /// Photons still alive after each stage.
    pub fn attrition_curve(&self) -> Vec<u64> {
        self.stage_losses
            .iter()
            .scan(self.photons_in, |alive, lost| {
                *alive -= lost;
                Some(*alive)
            })
            .collect()
    }

    fn from_samples(scheme: Scheme, photons_in: u64, samples: &[f64], stage_losses: Vec<u64>) -> Self {
        let n = samples.len();
        let estimate = (n > 0).then(|| {
            let mean = compensated_sum(samples.iter().copied()) / n as f64;
            let sample_std = if n > 1 {
                let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
                (ss / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            MeanEstimate {
                mean,
                sample_std,
                std_error: sample_std / (n as f64).sqrt(),
            }
        });
        Self {
            scheme,
            photons_in,
            survivors: n as u64,
            estimate,
            stage_losses,
        }
    }
}

/// Inverse-CDF sampler for a density tabulated on a uniform grid.
///
/// The CDF is accumulated with the trapezoid rule and inverted by linear
/// interpolation within each bin.
#[derive(Debug, Clone)]
pub struct TabulatedSampler {
    q: Vec<f64>,
    cdf: Vec<f64>,
}

impl TabulatedSampler {
    pub fn new(q: Vec<f64>, density: &[f64]) -> Result<Self> {
        if q.len() < 2 || q.len() != density.len() {
            return Err(Error::domain("grid", q.len(), "density table needs matching nodes, at least two"));
        }
        let mut cdf = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..q.len() {
            acc += 0.5 * (density[i - 1] + density[i]) * (q[i] - q[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::domain("density", acc, "tabulated density has no mass"));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { q, cdf })
    }

    pub fn from_density(density: &SampledDensity) -> Result<Self> {
        Self::new(density.q.clone(), &density.density)
    }

    /// Maps `u ∈ [0, 1)` to a grid position.
    pub fn sample(&self, u: f64) -> f64 {
        let last = self.q.len() - 2;
        let bin = self.cdf.partition_point(|c| *c <= u).saturating_sub(1).min(last);
        let (c0, c1) = (self.cdf[bin], self.cdf[bin + 1]);
        let t = if c1 > c0 { ((u - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.0 };
        self.q[bin] + t * (self.q[bin + 1] - self.q[bin])
    }

    /// The piecewise-linear CDF that [`sample`](Self::sample) inverts.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.q[0] {
            return 0.0;
        }
        if x >= self.q[self.q.len() - 1] {
            return 1.0;
        }
        let bin = self.q.partition_point(|q| *q <= x) - 1;
        let t = (x - self.q[bin]) / (self.q[bin + 1] - self.q[bin]);
        self.cdf[bin] + t * (self.cdf[bin + 1] - self.cdf[bin])
    }
}

/// Why an empirical performance ratio could not be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    NoSurvivors,
    /// `u_SM = 0`: every projective outcome was identical.
    ZeroProjectiveSpread,
    ZeroProtectiveSpread,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PerformanceEstimate {
    Ratio(f64),
    Degenerate(Degeneracy),
}

impl PerformanceEstimate {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            PerformanceEstimate::Ratio(r) => Some(*r),
            PerformanceEstimate::Degenerate(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeComparison {
    pub projective: EnsembleStats,
    pub protective: EnsembleStats,
    pub performance: PerformanceEstimate,
}

/// Monte Carlo engine. The default uses the oracle's stage cap and the
/// default sampling grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct Simulator {
    oracle: Oracle,
    grid: Option<GridSpec>,
}

fn check_photons(photons: u64) -> Result<()> {
    if photons < 1 {
        return Err(Error::domain("photons", photons, "at least one photon is required"));
    }
    Ok(())
}

enum Photon {
    Lost(usize),
    Detected(f64),
}

impl Simulator {
    pub fn new(oracle: Oracle, grid: Option<GridSpec>) -> Self {
        Self { oracle, grid }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn with_oracle(mut self, oracle: Oracle) -> Self {
        self.oracle = oracle;
        self
    }

    pub fn simulate_projective(&self, state: SystemState, photons: u64, seed: RunSeed) -> Result<EnsembleStats> {
        check_photons(photons)?;
        let r = state.r();
        let outcomes: Vec<f64> = (0..photons)
            .into_par_iter()
            .map(|i| {
                let u: f64 = seed.stream(Purpose::Projective, i).gen();
                if u < r {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        Ok(EnsembleStats::from_samples(Scheme::Projective, photons, &outcomes, Vec::new()))
    }

    pub fn simulate_protective(
        &self,
        state: SystemState,
        config: ZenoConfig,
        photons: u64,
        seed: RunSeed,
    ) -> Result<EnsembleStats> {
        check_photons(photons)?;
        let profile = self.oracle.stage_survival_profile(state, config)?;
        let grid = self.grid.unwrap_or_else(|| GridSpec::default_for(config));
        let sampler = TabulatedSampler::from_density(&grid_density(state, config, grid))?;

        let photons_out: Vec<Photon> = (0..photons)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed.stream(Purpose::Protective, i);
                for (stage, s) in profile.iter().enumerate() {
                    if rng.gen::<f64>() >= *s {
                        return Photon::Lost(stage);
                    }
                }
                Photon::Detected(sampler.sample(rng.gen()))
            })
            .collect();

        let mut stage_losses = vec![0u64; profile.len()];
        let mut positions = Vec::with_capacity(photons_out.len());
        for p in photons_out {
            match p {
                Photon::Lost(stage) => stage_losses[stage] += 1,
                Photon::Detected(q) => positions.push(q),
            }
        }
        Ok(EnsembleStats::from_samples(Scheme::Protective, photons, &positions, stage_losses))
    }

    /// Runs both schemes on independent substreams of `seed` with the same
    /// photon budget and forms `R = u_SM / u_PM` from the empirical standard
    /// errors.
    pub fn compare_schemes(
        &self,
        state: SystemState,
        config: ZenoConfig,
        photons: u64,
        seed: RunSeed,
    ) -> Result<SchemeComparison> {
        let projective = self.simulate_projective(state, photons, seed)?;
        let protective = self.simulate_protective(state, config, photons, seed)?;
        let performance = match (projective.mean_std_error(), protective.mean_std_error()) {
            (_, None) => PerformanceEstimate::Degenerate(Degeneracy::NoSurvivors),
            (Some(0.0), _) => PerformanceEstimate::Degenerate(Degeneracy::ZeroProjectiveSpread),
            (_, Some(0.0)) => PerformanceEstimate::Degenerate(Degeneracy::ZeroProtectiveSpread),
            (Some(sm), Some(pm)) => PerformanceEstimate::Ratio(sm / pm),
            (None, Some(_)) => unreachable!("projective runs detect every photon"),
        };
        Ok(SchemeComparison {
            projective,
            protective,
            performance,
        })
    }

    pub fn empirical_performance(
        &self,
        state: SystemState,
        config: ZenoConfig,
        photons: u64,
        seed: RunSeed,
    ) -> Result<PerformanceEstimate> {
        Ok(self.compare_schemes(state, config, photons, seed)?.performance)
    }
}

pub fn simulate_projective(state: SystemState, photons: u64, seed: RunSeed) -> Result<EnsembleStats> {
    Simulator::default().simulate_projective(state, photons, seed)
}

pub fn simulate_protective(
    state: SystemState,
    config: ZenoConfig,
    photons: u64,
    seed: RunSeed,
) -> Result<EnsembleStats> {
    Simulator::default().simulate_protective(state, config, photons, seed)
}

pub fn empirical_performance(
    state: SystemState,
    config: ZenoConfig,
    photons: u64,
    seed: RunSeed,
) -> Result<PerformanceEstimate> {
    Simulator::default().empirical_performance(state, config, photons, seed)
}

/// Kolmogorov–Smirnov distance between `samples` and a reference CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(r: f64) -> SystemState {
        SystemState::new(r).unwrap()
    }

    #[test]
    fn rejects_empty_budget() {
        assert!(simulate_projective(s(0.5), 0, RunSeed(1)).is_err());
        let c = ZenoConfig::new(5, 0.1).unwrap();
        assert!(simulate_protective(s(0.5), c, 0, RunSeed(1)).is_err());
    }

    #[test]
    fn eigenstate_projective_is_deterministic() {
        let st = simulate_projective(s(1.0), 1000, RunSeed(99)).unwrap();
        assert_eq!(st.survivors, 1000);
        assert_eq!(st.mean_shift(), Some(1.0));
        assert_eq!(st.sample_std(), Some(0.0));
    }

    #[test]
    fn eigenstate_protective_is_translation() {
        let c = ZenoConfig::new(10, 0.1).unwrap();
        let st = simulate_protective(s(1.0), c, 100, RunSeed(5)).unwrap();
        assert_eq!(st.survivors, 100);
        assert!(st.stage_losses.iter().all(|l| *l == 0));
        assert!((st.mean_shift().unwrap() - 1.0).abs() < 4.0 * 0.1 / 10.0);
        assert!((st.sample_std().unwrap() - 0.1).abs() < 0.025);
    }

    #[test]
    fn eigenstate_performance_is_degenerate() {
        let c = ZenoConfig::new(10, 0.1).unwrap();
        let p = empirical_performance(s(1.0), c, 200, RunSeed(3)).unwrap();
        assert_eq!(p, PerformanceEstimate::Degenerate(Degeneracy::ZeroProjectiveSpread));
    }

    #[test]
    fn zero_survivors_is_flagged() {
        let st = EnsembleStats::from_samples(Scheme::Protective, 3, &[], vec![3]);
        assert!(st.is_degenerate());
        assert_eq!(st.mean_std_error(), None);
        assert_eq!(st.attrition_curve(), vec![0]);
    }

    #[test]
    fn sampler_inverts_its_cdf() {
        let q: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let density: Vec<f64> = q.iter().map(|x| 2.0 * x).collect();
        let sampler = TabulatedSampler::new(q, &density).unwrap();
        for u in [0.0, 0.1, 0.25, 0.5, 0.9, 0.999_999] {
            let x = sampler.sample(u);
            assert!((sampler.cdf_at(x) - u).abs() < 1e-12, "u = {u}");
            // Exact CDF x² up to the O(h²) trapezoid error.
            assert!((x * x - u).abs() < 1e-3);
        }
        assert!(TabulatedSampler::new(vec![0.0, 1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn attrition_curve_counts_down() {
        let st = EnsembleStats::from_samples(Scheme::Protective, 10, &[0.1, 0.2], vec![5, 0, 3]);
        assert_eq!(st.attrition_curve(), vec![5, 5, 2]);
    }
}
