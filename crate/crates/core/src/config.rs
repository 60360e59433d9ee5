//! Configuration ingestion: a JSON key-value tree with `fibre`, `grid`
//! and `engine` sections, converted to strict-SI domain types at load.
//!
//! ```json
//! {
//!   "fibre": {
//!     "span_length_km": 80.0,
//!     "gamma_per_w_per_km": 2.0,
//!     "raman_slope_per_w_per_km_per_thz": 0.025,
//!     "attenuation_db_per_km": 0.32,            // or [[nm, dB/km], ...]
//!     "reference_wavelength_nm": 1302.3,
//!     "dispersion_ps_per_nm_km": 0.0,
//!     "dispersion_slope_ps_per_nm2_km": 0.087,
//!     "dispersion_curvature_ps_per_nm3_km": -9.714e-5
//!   },
//!   "grid": {
//!     "n_spans": 1,
//!     "generator": {
//!       "count": 161, "spacing_hz": 100e9,
//!       "symbol_rate_hz": 96e9, "power_dbm_flat": -2.0
//!     }
//!   },
//!   "engine": { "coherent_corrections": true },
//!   "amplifier": { "noise_figure_db": 5.0 }
//! }
//! ```
//!
//! A grid is either generated (uniform, centred on the reference
//! frequency) or listed explicitly; explicit channels give their position
//! as exactly one of `frequency_offset_hz`, `frequency_hz` (absolute) or
//! `wavelength_nm`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::XpmCoherentPath;
use crate::error::ModelError;
use crate::isrs::ProfileMode;
use crate::oracle::QuadratureSettings;
use crate::system::{AttenuationCurve, Channel, FibreSpec, WdmGrid};
use crate::units;

// ---------------------------------------------------------------------------
// Engine settings
// ---------------------------------------------------------------------------

/// Runtime options of the analytic engine (`engine` config section).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineSettings {
    /// Include the multi-span coherent SPM/XPM corrections.
    pub coherent_corrections: bool,
    /// Include the four-wave-mixing triplet sum.
    pub fwm: bool,
    /// Triplet degeneracy threshold: fall back to quadrature when
    /// min(|φ₁|B_j, |φ₂|B_k) < threshold·min(ã).
    pub degeneracy_threshold: f64,
    /// Base resolution per axis of the SPM/XPM region quadrature.
    pub spm_xpm_resolution: usize,
    /// Gauss–Legendre points per axis of the degenerate-triplet fallback.
    pub fwm_fallback_points: usize,
    /// Evaluation route of the coherent XPM sum.
    pub xpm_coherent_path: XpmCoherentPath,
    /// Use the sine integral instead of its atan surrogate in the
    /// coherent SPM sum.
    pub spm_coherent_si: bool,
    /// Transposed link-function index layout (cross-checking only).
    pub omega1_three_index: bool,
    /// Reference profile driving the per-channel fits.
    pub profile_mode: ProfileMode,
    /// Uniform z samples of the fit residual grid.
    pub fit_z_samples: usize,
    /// Residual RMS above which a fit falls back to physical parameters.
    pub fit_fallback_rms: f64,
    /// Amplifier noise figure [dB]; enables the total-SNR output.
    pub ase_noise_figure_db: Option<f64>,
    /// Numerical-reference (oracle) quadrature settings.
    pub oracle: QuadratureSettings,
}

impl Default for EngineSettings {
    fn default() -> Self {
        EngineSettings {
            coherent_corrections: true,
            fwm: true,
            degeneracy_threshold: 1e-3,
            spm_xpm_resolution: 256,
            fwm_fallback_points: 64,
            xpm_coherent_path: XpmCoherentPath::E1Exact,
            spm_coherent_si: false,
            omega1_three_index: false,
            profile_mode: ProfileMode::Analytic,
            fit_z_samples: 512,
            fit_fallback_rms: 0.05,
            ase_noise_figure_db: None,
            oracle: QuadratureSettings::default(),
        }
    }
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    fibre: FibreSection,
    grid: GridSection,
    #[serde(default)]
    engine: EngineSettings,
    #[serde(default)]
    amplifier: Option<AmplifierSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FibreSection {
    span_length_km: f64,
    gamma_per_w_per_km: f64,
    #[serde(default)]
    raman_slope_per_w_per_km_per_thz: f64,
    attenuation_db_per_km: AttenuationInput,
    reference_wavelength_nm: f64,
    #[serde(default)]
    dispersion_ps_per_nm_km: f64,
    #[serde(default)]
    dispersion_slope_ps_per_nm2_km: f64,
    #[serde(default)]
    dispersion_curvature_ps_per_nm3_km: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AttenuationInput {
    Flat(f64),
    /// (wavelength [nm], loss [dB/km]) samples in any order.
    Curve(Vec<(f64, f64)>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n_spans: u32,
    #[serde(default)]
    generator: Option<GeneratorSection>,
    #[serde(default)]
    channels: Option<Vec<ChannelSection>>,
    #[serde(default)]
    per_span_power_scale: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSection {
    count: usize,
    spacing_hz: f64,
    symbol_rate_hz: f64,
    power_dbm_flat: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelSection {
    #[serde(default)]
    frequency_offset_hz: Option<f64>,
    #[serde(default)]
    frequency_hz: Option<f64>,
    #[serde(default)]
    wavelength_nm: Option<f64>,
    bandwidth_hz: f64,
    power_dbm: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplifierSection {
    noise_figure_db: f64,
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

/// Load and validate a configuration file. All invariants of the domain
/// types are enforced; violations carry the offending field path.
pub fn load_config(path: &Path) -> Result<(FibreSpec, WdmGrid, EngineSettings), ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parse a configuration from its JSON text (see module docs for the
/// schema).
pub fn parse_config(text: &str) -> Result<(FibreSpec, WdmGrid, EngineSettings), ModelError> {
    let file: FileConfig = serde_json::from_str(text)
        .map_err(|e| ModelError::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    build_system(file)
}

fn build_system(file: FileConfig) -> Result<(FibreSpec, WdmGrid, EngineSettings), ModelError> {
    let f = &file.fibre;
    let lambda_ref = f.reference_wavelength_nm * 1e-9;
    if !(lambda_ref > 0.0) {
        return Err(ModelError::Validation {
            field: "fibre.reference_wavelength_nm".into(),
            message: "must be > 0".into(),
        });
    }
    let f_ref = units::wavelength_to_frequency(lambda_ref);
    let attenuation = match &f.attenuation_db_per_km {
        AttenuationInput::Flat(db) => AttenuationCurve::Flat(units::db_per_km_to_inv_m(*db)),
        AttenuationInput::Curve(points) => {
            let mut pts: Vec<(f64, f64)> = points
                .iter()
                .map(|(nm, db)| {
                    let offset = units::wavelength_to_frequency(nm * 1e-9) - f_ref;
                    (offset, units::db_per_km_to_inv_m(*db))
                })
                .collect();
            pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
            AttenuationCurve::Sampled(pts)
        }
    };
    let spec = FibreSpec {
        span_length: f.span_length_km * 1e3,
        gamma: units::gamma_to_si(f.gamma_per_w_per_km),
        raman_slope: units::raman_slope_to_si(f.raman_slope_per_w_per_km_per_thz),
        attenuation,
        dispersion_d: units::dispersion_to_si(f.dispersion_ps_per_nm_km),
        dispersion_s: units::dispersion_slope_to_si(f.dispersion_slope_ps_per_nm2_km),
        dispersion_s_dot: units::dispersion_curvature_to_si(f.dispersion_curvature_ps_per_nm3_km),
        reference_wavelength: lambda_ref,
    };
    spec.validate()?;

    let g = &file.grid;
    let channels: Vec<Channel> = match (&g.generator, &g.channels) {
        (Some(_), Some(_)) => {
            return Err(ModelError::Validation {
                field: "grid".into(),
                message: "specify either `generator` or `channels`, not both".into(),
            })
        }
        (None, None) => {
            return Err(ModelError::Validation {
                field: "grid".into(),
                message: "one of `generator` or `channels` is required".into(),
            })
        }
        (Some(gen), None) => {
            if gen.count == 0 {
                return Err(ModelError::Validation {
                    field: "grid.generator.count".into(),
                    message: "must be >= 1".into(),
                });
            }
            let power = units::dbm_to_watts(gen.power_dbm_flat);
            (0..gen.count)
                .map(|n| Channel {
                    f_offset: (n as f64 - (gen.count as f64 - 1.0) / 2.0) * gen.spacing_hz,
                    bandwidth: gen.symbol_rate_hz,
                    power,
                })
                .collect()
        }
        (None, Some(list)) => {
            let mut channels = Vec::with_capacity(list.len());
            for (idx, c) in list.iter().enumerate() {
                let given = [
                    c.frequency_offset_hz.is_some(),
                    c.frequency_hz.is_some(),
                    c.wavelength_nm.is_some(),
                ]
                .iter()
                .filter(|&&b| b)
                .count();
                if given != 1 {
                    return Err(ModelError::Validation {
                        field: format!("grid.channels[{idx}]"),
                        message: "give exactly one of frequency_offset_hz, frequency_hz, wavelength_nm".into(),
                    });
                }
                let f_offset = if let Some(off) = c.frequency_offset_hz {
                    off
                } else if let Some(abs) = c.frequency_hz {
                    abs - f_ref
                } else {
                    units::wavelength_to_frequency(c.wavelength_nm.unwrap() * 1e-9) - f_ref
                };
                channels.push(Channel {
                    f_offset,
                    bandwidth: c.bandwidth_hz,
                    power: units::dbm_to_watts(c.power_dbm),
                });
            }
            channels.sort_by(|a, b| {
                a.f_offset.partial_cmp(&b.f_offset).unwrap_or(std::cmp::Ordering::Equal)
            });
            channels
        }
    };
    let grid = WdmGrid {
        channels,
        n_spans: g.n_spans,
        per_span_power_scale: g.per_span_power_scale.clone(),
    };
    grid.validate()?;

    let mut settings = file.engine;
    if let Some(amp) = &file.amplifier {
        settings.ase_noise_figure_db = Some(amp.noise_figure_db);
    }
    Ok((spec, grid, settings))
}
