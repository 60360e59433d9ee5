//! Run orchestration and report emission: per-channel estimate tables,
//! engine-vs-reference comparisons, and parameter sweeps, in CSV and JSON
//! with identical numeric payloads.
//!
//! dB conventions: η values are reported as 10·log₁₀(η/1 W⁻²); launch
//! powers enter and leave in dBm. Non-finite or zero quantities are
//! emitted as explicit nulls (empty CSV fields), never silently dropped.

use serde::Serialize;

use crate::config::EngineSettings;
use crate::engine::CfEngine;
use crate::error::ModelError;
use crate::oracle::IntegralOracle;
use crate::system::{FibreSpec, WdmGrid};
use crate::units::{frequency_to_wavelength, linear_to_db, watts_to_dbm};

/// Schema tag embedded in every report.
pub const SCHEMA_ESTIMATE: &str = "oband-gn/estimate.v1";
pub const SCHEMA_COMPARE: &str = "oband-gn/compare.v1";
pub const SCHEMA_SWEEP: &str = "oband-gn/sweep.v1";
pub const SCHEMA_FITS: &str = "oband-gn/fits.v1";

fn db_or_none(x: f64) -> Option<f64> {
    (x > 0.0 && x.is_finite()).then(|| linear_to_db(x))
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn csv_field(v: &Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

// ---------------------------------------------------------------------------
// Estimate
// ---------------------------------------------------------------------------

/// One per-channel row of the estimate report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRow {
    pub channel: usize,
    pub wavelength_nm: f64,
    pub f_offset_hz: f64,
    pub power_dbm: f64,
    pub eta_spm_db: Option<f64>,
    pub eta_xpm_db: Option<f64>,
    pub eta_fwm_db: Option<f64>,
    pub eta_nli_db: Option<f64>,
    pub snr_nli_db: Option<f64>,
    pub snr_total_db: Option<f64>,
    pub eps_spm: f64,
    pub eps_xpm: f64,
    pub eps_fwm: f64,
    pub eps_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub schema: &'static str,
    pub n_spans: u32,
    pub rows: Vec<EstimateRow>,
}

/// Run the analytic engine over every channel.
pub fn run_estimate(
    spec: &FibreSpec,
    grid: &WdmGrid,
    settings: &EngineSettings,
) -> Result<EstimateReport, ModelError> {
    let engine = CfEngine::new(spec, grid, settings.clone())?;
    let f_ref = spec.f_ref();
    let rows = engine
        .evaluate_all()?
        .into_iter()
        .map(|b| EstimateRow {
            channel: b.channel,
            wavelength_nm: frequency_to_wavelength(f_ref + b.f_offset) * 1e9,
            f_offset_hz: b.f_offset,
            power_dbm: watts_to_dbm(grid.channels[b.channel].power),
            eta_spm_db: db_or_none(b.eta_spm_inc + b.eta_spm_cc),
            eta_xpm_db: db_or_none(b.eta_xpm_inc + b.eta_xpm_cc),
            eta_fwm_db: db_or_none(b.eta_fwm),
            eta_nli_db: db_or_none(b.eta_nli),
            snr_nli_db: finite_or_none(b.snr_nli_db),
            snr_total_db: b.snr_total_db.and_then(finite_or_none),
            eps_spm: b.epsilon_spm,
            eps_xpm: b.epsilon_xpm,
            eps_fwm: b.epsilon_fwm,
            eps_total: b.epsilon_total,
        })
        .collect();
    Ok(EstimateReport {
        schema: SCHEMA_ESTIMATE,
        n_spans: grid.n_spans,
        rows,
    })
}

impl EstimateReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        out.push_str(
            "channel,wavelength_nm,f_offset_hz,power_dbm,eta_spm_db,eta_xpm_db,eta_fwm_db,eta_nli_db,snr_nli_db,snr_total_db,eps_spm,eps_xpm,eps_fwm,eps_total\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.channel,
                r.wavelength_nm,
                r.f_offset_hz,
                r.power_dbm,
                csv_field(&r.eta_spm_db),
                csv_field(&r.eta_xpm_db),
                csv_field(&r.eta_fwm_db),
                csv_field(&r.eta_nli_db),
                csv_field(&r.snr_nli_db),
                csv_field(&r.snr_total_db),
                r.eps_spm,
                r.eps_xpm,
                r.eps_fwm,
                r.eps_total,
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub channel: usize,
    pub f_offset_hz: f64,
    pub alpha_per_m: f64,
    pub alpha_tilde_per_m: f64,
    pub cr_per_w_m_hz: f64,
    pub residual_rms: f64,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub schema: &'static str,
    pub rows: Vec<FitRow>,
}

/// Run only the per-channel profile fits.
pub fn run_fit(
    spec: &FibreSpec,
    grid: &WdmGrid,
    settings: &EngineSettings,
) -> Result<FitReport, ModelError> {
    let options = crate::isrs::FitOptions {
        z_samples: settings.fit_z_samples,
        fallback_rms: settings.fit_fallback_rms,
        profile: settings.profile_mode,
        ode_steps_per_km: settings.oracle.z_steps_per_km,
    };
    let rows = crate::isrs::fit_all_channels(grid, spec, &options)?
        .into_iter()
        .enumerate()
        .map(|(channel, f)| FitRow {
            channel,
            f_offset_hz: f.f_offset,
            alpha_per_m: f.alpha,
            alpha_tilde_per_m: f.alpha_tilde,
            cr_per_w_m_hz: f.cr,
            residual_rms: f.residual_rms,
            fallback: f.fallback,
        })
        .collect();
    Ok(FitReport {
        schema: SCHEMA_FITS,
        rows,
    })
}

impl FitReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        out.push_str("channel,f_offset_hz,alpha_per_m,alpha_tilde_per_m,cr_per_w_m_hz,residual_rms,fallback\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.channel,
                r.f_offset_hz,
                r.alpha_per_m,
                r.alpha_tilde_per_m,
                r.cr_per_w_m_hz,
                r.residual_rms,
                r.fallback
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}

// ---------------------------------------------------------------------------
// Oracle table
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub channel: usize,
    pub wavelength_nm: f64,
    pub f_offset_hz: f64,
    pub eta_spm_db: Option<f64>,
    pub eta_xpm_db: Option<f64>,
    pub eta_fwm_db: Option<f64>,
    pub eta_nli_db: Option<f64>,
    pub snr_nli_db: Option<f64>,
    pub eps_spm: f64,
    pub eps_xpm: f64,
    pub eps_fwm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub schema: &'static str,
    pub rows: Vec<OracleRow>,
}

/// Run the numerical reference on a channel subset.
pub fn run_oracle(
    spec: &FibreSpec,
    grid: &WdmGrid,
    settings: &EngineSettings,
    channels: &[usize],
) -> Result<OracleReport, ModelError> {
    validate_subset(grid, channels)?;
    let oracle = IntegralOracle::new(spec, grid, settings.oracle.clone(), settings.profile_mode)?;
    let f_ref = spec.f_ref();
    let n = grid.n_spans;
    let rows = oracle
        .eta_numeric_many(channels)?
        .into_iter()
        .map(|b| OracleRow {
            channel: b.channel,
            wavelength_nm: frequency_to_wavelength(f_ref + b.f_offset) * 1e9,
            f_offset_hz: b.f_offset,
            eta_spm_db: db_or_none(b.eta_spm),
            eta_xpm_db: db_or_none(b.eta_xpm),
            eta_fwm_db: db_or_none(b.eta_fwm),
            eta_nli_db: db_or_none(b.eta_nli),
            snr_nli_db: finite_or_none(b.snr_nli_db),
            eps_spm: b.epsilon(crate::oracle::RegionFilter::Spm, n),
            eps_xpm: b.epsilon(crate::oracle::RegionFilter::Xpm, n),
            eps_fwm: b.epsilon(crate::oracle::RegionFilter::Fwm, n),
        })
        .collect();
    Ok(OracleReport {
        schema: "oband-gn/oracle.v1",
        rows,
    })
}

impl OracleReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        out.push_str("channel,wavelength_nm,f_offset_hz,eta_spm_db,eta_xpm_db,eta_fwm_db,eta_nli_db,snr_nli_db,eps_spm,eps_xpm,eps_fwm\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.channel,
                r.wavelength_nm,
                r.f_offset_hz,
                csv_field(&r.eta_spm_db),
                csv_field(&r.eta_xpm_db),
                csv_field(&r.eta_fwm_db),
                csv_field(&r.eta_nli_db),
                csv_field(&r.snr_nli_db),
                r.eps_spm,
                r.eps_xpm,
                r.eps_fwm
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}

// ---------------------------------------------------------------------------
// Compare
// ---------------------------------------------------------------------------

/// Engine-vs-reference error statistics over a channel subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonStats {
    /// Per-channel SNR_NLI deltas (engine − reference) [dB].
    pub deltas_db: Vec<f64>,
    pub mean_abs_db: f64,
    pub max_abs_db: f64,
    pub argmax_wavelength_nm: f64,
}

impl ComparisonStats {
    fn from_deltas(deltas_db: Vec<f64>, wavelengths: &[f64]) -> Self {
        let mut mean = 0.0;
        let mut max = 0.0f64;
        let mut argmax = f64::NAN;
        for (d, w) in deltas_db.iter().zip(wavelengths) {
            mean += d.abs();
            if d.abs() >= max {
                max = d.abs();
                argmax = *w;
            }
        }
        if !deltas_db.is_empty() {
            mean /= deltas_db.len() as f64;
        }
        ComparisonStats {
            deltas_db,
            mean_abs_db: mean,
            max_abs_db: max,
            argmax_wavelength_nm: argmax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub channel: usize,
    pub wavelength_nm: f64,
    pub snr_nli_engine_db: Option<f64>,
    pub snr_nli_reference_db: Option<f64>,
    pub delta_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: &'static str,
    pub stats: ComparisonStats,
    pub rows: Vec<CompareRow>,
}

fn validate_subset(grid: &WdmGrid, channels: &[usize]) -> Result<(), ModelError> {
    if channels.is_empty() {
        return Err(ModelError::Validation {
            field: "channels".into(),
            message: "channel subset must not be empty".into(),
        });
    }
    for &c in channels {
        if c >= grid.n_channels() {
            return Err(ModelError::Validation {
                field: "channels".into(),
                message: format!("channel {c} out of range (grid has {})", grid.n_channels()),
            });
        }
    }
    Ok(())
}

/// Run both evaluation paths on a channel subset and report per-channel
/// SNR_NLI deltas.
pub fn run_compare(
    spec: &FibreSpec,
    grid: &WdmGrid,
    settings: &EngineSettings,
    channels: &[usize],
) -> Result<CompareReport, ModelError> {
    validate_subset(grid, channels)?;
    let engine = CfEngine::new(spec, grid, settings.clone())?;
    let oracle = IntegralOracle::new(spec, grid, settings.oracle.clone(), settings.profile_mode)?;
    let f_ref = spec.f_ref();
    let mut rows = Vec::with_capacity(channels.len());
    let mut deltas = Vec::with_capacity(channels.len());
    let mut wavelengths = Vec::with_capacity(channels.len());
    for &i in channels {
        let e = engine.evaluate_channel(i)?;
        let o = oracle.eta_numeric(i)?;
        let delta = e.snr_nli_db - o.snr_nli_db;
        let wavelength_nm = frequency_to_wavelength(f_ref + e.f_offset) * 1e9;
        rows.push(CompareRow {
            channel: i,
            wavelength_nm,
            snr_nli_engine_db: finite_or_none(e.snr_nli_db),
            snr_nli_reference_db: finite_or_none(o.snr_nli_db),
            delta_db: finite_or_none(delta),
        });
        deltas.push(delta);
        wavelengths.push(wavelength_nm);
    }
    Ok(CompareReport {
        schema: SCHEMA_COMPARE,
        stats: ComparisonStats::from_deltas(deltas, &wavelengths),
        rows,
    })
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        out.push_str(&format!(
            "# mean_abs_db={} max_abs_db={} argmax_wavelength_nm={}\n",
            self.stats.mean_abs_db, self.stats.max_abs_db, self.stats.argmax_wavelength_nm
        ));
        out.push_str("channel,wavelength_nm,snr_nli_engine_db,snr_nli_reference_db,delta_db\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.channel,
                r.wavelength_nm,
                csv_field(&r.snr_nli_engine_db),
                csv_field(&r.snr_nli_reference_db),
                csv_field(&r.delta_db)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

/// Swept parameter of [`run_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Span count; values are positive integers.
    Spans,
    /// Channel count of a uniform grid (optical bandwidth).
    Bandwidth,
    /// Flat per-channel launch power [dBm].
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummaryRow {
    pub axis_value: f64,
    pub mean_abs_db: f64,
    pub max_abs_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEstimateRow {
    pub axis_value: f64,
    pub channel: usize,
    pub wavelength_nm: f64,
    pub eta_nli_db: Option<f64>,
    pub snr_nli_db: Option<f64>,
    pub eps_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub axis: SweepAxis,
    /// One row per axis value when a comparison subset was given.
    pub summary: Vec<SweepSummaryRow>,
    /// Long-format per-channel rows (always emitted).
    pub rows: Vec<SweepEstimateRow>,
}

/// Rebuild the grid for one sweep point.
fn grid_for_value(grid: &WdmGrid, axis: SweepAxis, value: f64) -> Result<WdmGrid, ModelError> {
    let mut out = grid.clone();
    match axis {
        SweepAxis::Spans => {
            if value < 1.0 || value.fract() != 0.0 {
                return Err(ModelError::Validation {
                    field: "sweep.values".into(),
                    message: format!("span count must be a positive integer, got {value}"),
                });
            }
            out.n_spans = value as u32;
            out.per_span_power_scale = None;
        }
        SweepAxis::Bandwidth => {
            let count = value as usize;
            if value < 1.0 || value.fract() != 0.0 {
                return Err(ModelError::Validation {
                    field: "sweep.values".into(),
                    message: format!("channel count must be a positive integer, got {value}"),
                });
            }
            let spacing = if grid.n_channels() >= 2 {
                grid.channels[1].f_offset - grid.channels[0].f_offset
            } else {
                return Err(ModelError::Validation {
                    field: "sweep.values".into(),
                    message: "bandwidth sweep needs a uniform multi-channel template grid".into(),
                });
            };
            let bw = grid.channels[0].bandwidth;
            let power = grid.channels[0].power;
            out.channels = (0..count)
                .map(|n| crate::system::Channel {
                    f_offset: (n as f64 - (count as f64 - 1.0) / 2.0) * spacing,
                    bandwidth: bw,
                    power,
                })
                .collect();
        }
        SweepAxis::Power => {
            let watts = crate::units::dbm_to_watts(value);
            for c in &mut out.channels {
                c.power = watts;
            }
        }
    }
    out.validate()?;
    Ok(out)
}

/// Repeated estimates (and optional comparisons) along one axis.
pub fn run_sweep(
    spec: &FibreSpec,
    grid: &WdmGrid,
    settings: &EngineSettings,
    axis: SweepAxis,
    values: &[f64],
    compare_channels: Option<&[usize]>,
) -> Result<SweepReport, ModelError> {
    if values.is_empty() {
        return Err(ModelError::Validation {
            field: "sweep.values".into(),
            message: "at least one axis value required".into(),
        });
    }
    let mut summary = Vec::new();
    let mut rows = Vec::new();
    for &value in values {
        let point_grid = grid_for_value(grid, axis, value)?;
        let estimate = run_estimate(spec, &point_grid, settings)?;
        for r in &estimate.rows {
            rows.push(SweepEstimateRow {
                axis_value: value,
                channel: r.channel,
                wavelength_nm: r.wavelength_nm,
                eta_nli_db: r.eta_nli_db,
                snr_nli_db: r.snr_nli_db,
                eps_total: r.eps_total,
            });
        }
        if let Some(channels) = compare_channels {
            let cmp = run_compare(spec, &point_grid, settings, channels)?;
            summary.push(SweepSummaryRow {
                axis_value: value,
                mean_abs_db: cmp.stats.mean_abs_db,
                max_abs_db: cmp.stats.max_abs_db,
            });
        }
    }
    Ok(SweepReport {
        schema: SCHEMA_SWEEP,
        axis,
        summary,
        rows,
    })
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        if !self.summary.is_empty() {
            out.push_str("axis_value,mean_abs_db,max_abs_db\n");
            for s in &self.summary {
                out.push_str(&format!("{},{},{}\n", s.axis_value, s.mean_abs_db, s.max_abs_db));
            }
            out.push('\n');
        }
        out.push_str("axis_value,channel,wavelength_nm,eta_nli_db,snr_nli_db,eps_total\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.axis_value,
                r.channel,
                r.wavelength_nm,
                csv_field(&r.eta_nli_db),
                csv_field(&r.snr_nli_db),
                r.eps_total
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialisation is infallible")
    }
}
