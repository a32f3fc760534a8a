//! Simulation of Zeno protective measurements of a two-outcome observable.
//!
//! A qubit `√r |+⟩ + √(1−r) |−⟩` is weakly coupled to a Gaussian pointer over
//! `N` stages, each followed by a projection back onto the prepared state.
//! The crate provides
//!
//! * [`model`]: the exact final pointer packet, a binomially weighted sum of
//!   shifted Gaussians, and the single-stage recurrence that generates it;
//! * [`analytic`]: closed-form width, survival probability, uncertainties and
//!   the performance ratio `R` of protective over projective measurement;
//! * [`oracle`]: exact overlap-sum moments and grid densities that check the
//!   closed forms;
//! * [`montecarlo`]: photon-by-photon ensemble simulation of both schemes;
//! * [`sweep`]: parameter sweeps, figure data sets and inverse design, with
//!   [`output`] writing CSV or JSON.
//!
//! ```
//! use zenopm::{analytic, SystemState, ZenoConfig};
//!
//! let state = SystemState::new(0.5)?;
//! let config = ZenoConfig::new(50, 0.1)?;
//! let p = analytic::survival_probability(state, config);
//! assert!((p - 0.7071).abs() < 1e-4);
//! # Ok::<(), zenopm::Error>(())
//! ```

// Tests compare against published decimal values such as 0.7071.
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod output;
pub mod parallel;
pub mod rng;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{SystemState, Wavepacket, ZenoConfig};
pub use oracle::{ExactMoments, GridSpec};
pub use rng::RunSeed;
