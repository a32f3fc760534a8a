//! Parameter sweeps over `(r, N, σ)`, figure data sets and inverse design.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::analytic::{
    final_width, performance_r, performance_r_large_n, protective_uncertainty, strong_uncertainty,
    survival_probability, width_ratio,
};
use crate::error::{Error, Result};
use crate::model::{exact_final_packet, SystemState, ZenoConfig};
use crate::montecarlo::{SchemeComparison, Simulator};
use crate::oracle::{approximation_error, compare_densities, packet_moments, GridSpec, Oracle};
use crate::rng::RunSeed;

/// A value that can be requested from a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    /// `σ_{N,r}`
    Width,
    /// `σ_{N,r} / σ`
    WidthRatio,
    /// Closed-form survival probability.
    Survival,
    /// Survival probability from the exact overlap sums.
    SurvivalExact,
    R,
    RLargeN,
    USm,
    UPm,
    /// L1 distance between exact and approximate densities on the grid.
    ApproxError,
    McSurvival,
    McMean,
    McStd,
    UPmMc,
    USmMc,
    RMc,
}

impl Quantity {
    pub const ALL: [Quantity; 15] = [
        Quantity::Width,
        Quantity::WidthRatio,
        Quantity::Survival,
        Quantity::SurvivalExact,
        Quantity::R,
        Quantity::RLargeN,
        Quantity::USm,
        Quantity::UPm,
        Quantity::ApproxError,
        Quantity::McSurvival,
        Quantity::McMean,
        Quantity::McStd,
        Quantity::UPmMc,
        Quantity::USmMc,
        Quantity::RMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Width => "width",
            Quantity::WidthRatio => "width_ratio",
            Quantity::Survival => "survival",
            Quantity::SurvivalExact => "survival_exact",
            Quantity::R => "R",
            Quantity::RLargeN => "R_largeN",
            Quantity::USm => "u_SM",
            Quantity::UPm => "u_PM",
            Quantity::ApproxError => "approx_error",
            Quantity::McSurvival => "mc_survival",
            Quantity::McMean => "mc_mean",
            Quantity::McStd => "mc_std",
            Quantity::UPmMc => "u_PM_mc",
            Quantity::USmMc => "u_SM_mc",
            Quantity::RMc => "R_mc",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            Quantity::McSurvival | Quantity::McMean | Quantity::McStd | Quantity::UPmMc | Quantity::USmMc | Quantity::RMc
        )
    }

    pub fn needs_photons(self) -> bool {
        self.is_monte_carlo() || matches!(self, Quantity::USm | Quantity::UPm)
    }

    /// Quantities reported by a Monte Carlo run.
    pub fn monte_carlo() -> Vec<Quantity> {
        Self::ALL.into_iter().filter(|q| q.is_monte_carlo()).collect()
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Self::ALL.iter().map(|q| q.name()).collect();
                Error::usage("quantities", format!("unknown quantity '{s}' (known: {})", known.join(", ")))
            })
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Partial grid override; unset fields fall back to [`GridSpec::default_for`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct GridRequest {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
}

impl GridRequest {
    pub fn resolve(&self, config: ZenoConfig) -> Result<GridSpec> {
        let d = GridSpec::default_for(config);
        GridSpec::new(
            self.min.unwrap_or(d.min()),
            self.max.unwrap_or(d.max()),
            self.points.unwrap_or(d.points()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub r_values: Vec<f64>,
    #[serde(rename = "N_values")]
    pub n_values: Vec<u64>,
    pub sigma_values: Vec<f64>,
    pub quantities: Vec<Quantity>,
    pub photons: Option<u64>,
    pub seed: Option<RunSeed>,
    pub grid: GridRequest,
    /// Lifts the stage cap on the exact overlap sums.
    pub allow_large_n: bool,
}

impl SweepSpec {
    pub fn new(r_values: Vec<f64>, n_values: Vec<u64>, sigma_values: Vec<f64>, quantities: Vec<Quantity>) -> Self {
        Self {
            r_values,
            n_values,
            sigma_values,
            quantities,
            photons: None,
            seed: None,
            grid: GridRequest::default(),
            allow_large_n: false,
        }
    }

    pub fn with_monte_carlo(mut self, photons: u64, seed: RunSeed) -> Self {
        self.photons = Some(photons);
        self.seed = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.r_values.is_empty() {
            return Err(Error::usage("r", "at least one value is required"));
        }
        if let Some(r) = self.r_values.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::usage("r", format!("{r} is outside [0, 1]")));
        }
        if self.n_values.is_empty() {
            return Err(Error::usage("stages", "at least one value is required"));
        }
        if self.n_values.contains(&0) {
            return Err(Error::usage("stages", "stage counts must be at least 1"));
        }
        if self.sigma_values.is_empty() {
            return Err(Error::usage("sigma", "at least one value is required"));
        }
        if let Some(s) = self.sigma_values.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::usage("sigma", format!("{s} is not a positive width")));
        }
        if self.quantities.is_empty() {
            return Err(Error::usage("quantities", "at least one quantity is required"));
        }
        if let Some(q) = self.quantities.iter().find(|q| q.needs_photons()) {
            match self.photons {
                None => return Err(Error::usage("photons", format!("quantity {q} requires a photon count"))),
                Some(0) => return Err(Error::usage("photons", "photon count must be at least 1")),
                Some(_) => {}
            }
        }
        if let Some(q) = self.quantities.iter().find(|q| q.is_monte_carlo()) {
            if self.seed.is_none() {
                return Err(Error::usage("seed", format!("quantity {q} requires a seed")));
            }
        }
        Ok(())
    }

    /// Sorted, de-duplicated copy, which fixes the row order.
    fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.r_values.sort_by(f64::total_cmp);
        out.r_values.dedup();
        out.n_values.sort_unstable();
        out.n_values.dedup();
        out.sigma_values.sort_by(f64::total_cmp);
        out.sigma_values.dedup();
        out.quantities.sort_unstable();
        out.quantities.dedup();
        out
    }

    fn oracle(&self) -> Oracle {
        if self.allow_large_n {
            Oracle::unbounded()
        } else {
            Oracle::default()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RowFlags {
    pub strong_regime: bool,
    pub degenerate: bool,
}

impl fmt::Display for RowFlags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<&str> = [(self.strong_regime, "strong-regime"), (self.degenerate, "degenerate")]
            .into_iter()
            .filter_map(|(on, tag)| on.then_some(tag))
            .collect();
        f.write_str(&tags.join(";"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub n: u64,
    pub sigma: f64,
    pub quantity: Quantity,
    /// `None` for degenerate entries.
    pub value: Option<f64>,
    pub weakness: f64,
    pub flags: RowFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Value of `quantity` at one grid point.
    pub fn value(&self, r: f64, n: u64, sigma: f64, quantity: Quantity) -> Option<f64> {
        self.rows
            .iter()
            .find(|row| row.r == r && row.n == n && row.sigma == sigma && row.quantity == quantity)
            .and_then(|row| row.value)
    }
}

/// Evaluates every requested quantity at every `(r, N, σ)` grid point.
///
/// Rows are ordered lexicographically by `(r, N, σ, quantity)`; grid points
/// are evaluated in parallel and collected in that order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let spec = spec.normalized();
    let mut points = Vec::with_capacity(spec.r_values.len() * spec.n_values.len() * spec.sigma_values.len());
    for &r in &spec.r_values {
        for &n in &spec.n_values {
            for &sigma in &spec.sigma_values {
                points.push((r, n, sigma));
            }
        }
    }
    let per_point: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(r, n, sigma)| evaluate_point(&spec, r, n, sigma))
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        rows: per_point.into_iter().flatten().collect(),
        spec,
    })
}

fn evaluate_point(spec: &SweepSpec, r: f64, n: u64, sigma: f64) -> Result<Vec<SweepRow>> {
    let state = SystemState::new(r)?;
    let config = ZenoConfig::new(n, sigma)?;
    let oracle = spec.oracle();
    let photons = spec.photons.unwrap_or(0);

    let needs_grid = spec.quantities.iter().any(|q| q.is_monte_carlo() || *q == Quantity::ApproxError);
    let grid = if needs_grid { Some(spec.grid.resolve(config)?) } else { None };
    let mc: Option<SchemeComparison> = if spec.quantities.iter().any(|q| q.is_monte_carlo()) {
        let sim = Simulator::new(oracle, grid);
        let seed = spec.seed.expect("validated");
        Some(sim.compare_schemes(state, config, photons, seed)?)
    } else {
        None
    };

    spec.quantities
        .iter()
        .map(|&quantity| {
            let value = match quantity {
                Quantity::Width => Some(final_width(state, config)),
                Quantity::WidthRatio => Some(width_ratio(state, config)),
                Quantity::Survival => Some(survival_probability(state, config)),
                Quantity::SurvivalExact => Some(oracle.exact_survival(state, config)?),
                Quantity::R => Some(performance_r(state, config)),
                Quantity::RLargeN => Some(performance_r_large_n(state, sigma)?),
                Quantity::USm => Some(strong_uncertainty(state, photons)?),
                Quantity::UPm => Some(protective_uncertainty(state, config, photons)?),
                Quantity::ApproxError => Some(approximation_error(state, config, grid.expect("resolved")).l1),
                Quantity::McSurvival => mc.as_ref().map(|m| m.protective.survivor_fraction()),
                Quantity::McMean => mc.as_ref().and_then(|m| m.protective.mean_shift()),
                Quantity::McStd => mc.as_ref().and_then(|m| m.protective.sample_std()),
                Quantity::UPmMc => mc.as_ref().and_then(|m| m.protective.mean_std_error()),
                Quantity::USmMc => mc.as_ref().and_then(|m| m.projective.mean_std_error()),
                Quantity::RMc => mc.as_ref().and_then(|m| m.performance.ratio()),
            };
            Ok(SweepRow {
                r,
                n,
                sigma,
                quantity,
                value,
                weakness: config.weakness(),
                flags: RowFlags {
                    strong_regime: config.is_strong_regime(),
                    degenerate: value.is_none(),
                },
            })
        })
        .collect()
}

/// The five figure data sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// Exact vs. approximate final densities at `r = 0.7`.
    Fig1,
    /// Width ratio surface.
    Fig2,
    /// Survival surface.
    Fig3,
    /// Worst-case (`r = 0.5`) survival against `N`.
    Fig4,
    /// Performance ratio surface.
    Fig5,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim_start_matches("fig") {
            "1" => Ok(Figure::Fig1),
            "2" => Ok(Figure::Fig2),
            "3" => Ok(Figure::Fig3),
            "4" => Ok(Figure::Fig4),
            "5" => Ok(Figure::Fig5),
            _ => Err(Error::usage("figure", format!("unknown figure '{s}' (expected fig1..fig5)"))),
        }
    }
}

/// Evenly spaced values `start, start + step, ..., end`, rounded to 12
/// decimals so steps like 0.05 print cleanly.
pub fn linspace_step(start: f64, end: f64, step: f64) -> Vec<f64> {
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect()
}

const SURFACE_SIGMAS: [f64; 3] = [0.05, 0.1, 0.2];

impl Figure {
    /// Caption parameter ranges: `(r values, N values, σ values)`.
    pub fn default_axes(self) -> (Vec<f64>, Vec<u64>, Vec<f64>) {
        let stages: Vec<u64> = (5..=100).collect();
        match self {
            Figure::Fig1 => (vec![0.7], vec![2, 5, 10, 50], vec![0.1, 0.2]),
            Figure::Fig2 | Figure::Fig3 => (linspace_step(0.0, 1.0, 0.05), stages, SURFACE_SIGMAS.to_vec()),
            Figure::Fig4 => (vec![0.5], stages, SURFACE_SIGMAS.to_vec()),
            Figure::Fig5 => (linspace_step(0.0, 0.5, 0.025), stages, vec![0.05, 0.1, 0.2, 0.3]),
        }
    }

    pub fn quantity(self) -> Option<Quantity> {
        match self {
            Figure::Fig1 => None,
            Figure::Fig2 => Some(Quantity::WidthRatio),
            Figure::Fig3 | Figure::Fig4 => Some(Quantity::Survival),
            Figure::Fig5 => Some(Quantity::R),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FigureOverrides {
    pub r_values: Option<Vec<f64>>,
    pub n_values: Option<Vec<u64>>,
    pub sigma_values: Option<Vec<f64>>,
    pub grid: GridRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySpec {
    pub r_values: Vec<f64>,
    #[serde(rename = "N_values")]
    pub n_values: Vec<u64>,
    pub sigma_values: Vec<f64>,
    pub grid: GridRequest,
}

/// One grid node of a density comparison. The `*_normalized` columns are
/// conditional on survival: each density divided by its own norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRow {
    pub q: f64,
    pub exact_density: f64,
    pub approx_density: f64,
    pub r: f64,
    pub n: u64,
    pub sigma: f64,
    pub exact_density_normalized: f64,
    pub approx_density_normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub spec: DensitySpec,
    pub rows: Vec<DensityRow>,
}

/// Tabulates exact and approximate densities for every `(r, N, σ)` in `spec`.
pub fn density_table(spec: &DensitySpec) -> Result<DensityTable> {
    let mut rows = Vec::new();
    for &r in &spec.r_values {
        let state = SystemState::new(r)?;
        for &n in &spec.n_values {
            for &sigma in &spec.sigma_values {
                let config = ZenoConfig::new(n, sigma)?;
                let grid = spec.grid.resolve(config)?;
                let exact_norm = packet_moments(&exact_final_packet(state, config)).norm;
                let approx_norm = survival_probability(state, config);
                let cmp = compare_densities(state, config, grid);
                rows.extend(cmp.q.iter().zip(cmp.exact.iter().zip(&cmp.approx)).map(|(&q, (&e, &a))| DensityRow {
                    q,
                    exact_density: e,
                    approx_density: a,
                    r,
                    n,
                    sigma,
                    exact_density_normalized: e / exact_norm,
                    approx_density_normalized: a / approx_norm,
                }));
            }
        }
    }
    Ok(DensityTable { spec: spec.clone(), rows })
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureData {
    Densities(DensityTable),
    Sweep(SweepResult),
}

/// Data behind one figure, using the caption parameter ranges unless
/// overridden.
pub fn emit_figure_data(figure: Figure, overrides: &FigureOverrides) -> Result<FigureData> {
    let (r, n, sigma) = figure.default_axes();
    let r = overrides.r_values.clone().unwrap_or(r);
    let n = overrides.n_values.clone().unwrap_or(n);
    let sigma = overrides.sigma_values.clone().unwrap_or(sigma);
    match figure.quantity() {
        None => {
            let spec = DensitySpec {
                r_values: r,
                n_values: n,
                sigma_values: sigma,
                grid: overrides.grid,
            };
            // Reuse sweep validation for the axes.
            SweepSpec::new(spec.r_values.clone(), spec.n_values.clone(), spec.sigma_values.clone(), vec![Quantity::Width])
                .validate()?;
            Ok(FigureData::Densities(density_table(&spec)?))
        }
        Some(quantity) => {
            let mut spec = SweepSpec::new(r, n, sigma, vec![quantity]);
            spec.grid = overrides.grid;
            Ok(FigureData::Sweep(run_sweep(&spec)?))
        }
    }
}

/// Outcome of [`inverse_design`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Stages(u64),
    Infeasible,
}

const MAX_DESIGN_STAGES: u64 = 1 << 62;

/// Smallest `N` with `R ≥ target`, found by doubling then bisection.
///
/// `R` increases monotonically in `N` towards `√(4r(1−r))/σ`, so targets at
/// or above that limit, and any target for an extremal state, are infeasible.
pub fn inverse_design(target: f64, state: SystemState, sigma: f64) -> Result<Design> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::domain("target_R", target, "target must be positive and finite"));
    }
    let limit = performance_r_large_n(state, sigma)?;
    if state.is_extremal() || target >= limit {
        return Ok(Design::Infeasible);
    }
    let r_at = |n: u64| -> Result<f64> { Ok(performance_r(state, ZenoConfig::new(n, sigma)?)) };

    if r_at(1)? >= target {
        return Ok(Design::Stages(1));
    }
    let (mut lo, mut hi) = (1u64, 2u64);
    while r_at(hi)? < target {
        if hi >= MAX_DESIGN_STAGES {
            // Below the limit but not resolvable in double precision.
            return Ok(Design::Infeasible);
        }
        lo = hi;
        hi *= 2;
    }
    // Invariant: R(lo) < target ≤ R(hi).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if r_at(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Design::Stages(hi))
}
