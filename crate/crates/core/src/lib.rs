//! Nonlinear-interference (NLI) and SNR estimation for WDM transmission in
//! low-dispersion bands, built on a Gaussian-noise (GN) description of the
//! Kerr effect with inter-channel stimulated Raman scattering (ISRS).
//!
//! The crate provides two evaluation paths for the per-channel NLI
//! coefficient `η_NLI` (and the SNR derived from it):
//!
//! * [`engine`] — a closed-form model: per-channel ISRS profile fits, a
//!   closed-form link function, analytic four-wave-mixing (FWM) terms over
//!   all contributing frequency triplets, and multi-span coherent
//!   corrections for self- and cross-phase modulation (SPM/XPM). Fast
//!   enough for system optimisation loops.
//! * [`oracle`] — a direct numerical evaluation of the underlying GN
//!   integral (2-D Riemann sum over the spectral plane, z-quadrature of the
//!   link function, exact phased-array factor). Slow, but free of the
//!   closed-form approximations; used as the validation reference.
//!
//! Supporting modules: [`system`] (fibre/grid description and unit
//! conversions), [`isrs`] (signal-power profile evolution and per-channel
//! fitting), [`phase`] (phase mismatch and phased-array factor),
//! [`special`] (numerics kernel: exponential integral, sine integral,
//! quadrature helpers), [`report`] (run orchestration and CSV/JSON
//! emission), [`presets`] (bundled demonstration system).
//!
//! All internal quantities are strict SI (Hz, W, m, s). Engineering units
//! (km, THz, dBm, ps/nm/km) are converted once at the configuration
//! boundary; see [`units`].

pub mod config;
pub mod engine;
pub mod error;
pub mod isrs;
pub mod oracle;
pub mod phase;
pub mod presets;
pub mod report;
pub mod special;
pub mod system;
pub mod units;

pub use config::{load_config, parse_config, EngineSettings};
pub use engine::{CfEngine, NliBreakdown, XpmCoherentPath};
pub use error::ModelError;
pub use isrs::{ChannelFit, ProfileMode};
pub use oracle::{IntegralOracle, QuadratureSettings, RegionFilter};
pub use system::{BetaCoefficients, Channel, FibreSpec, WdmGrid};
