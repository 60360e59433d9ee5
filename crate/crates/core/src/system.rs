//! System description: fibre parameters, WDM channel plan, and the
//! dispersion-coefficient conversions.
//!
//! # Dispersion conversion
//!
//! The fibre is described by the dispersion parameter `D`, slope `S` and
//! curvature `Ṡ` at a reference wavelength λ_c, i.e.
//! `D(λ) = D + S·(λ−λ_c) + ½·Ṡ·(λ−λ_c)²`. The propagation-constant
//! derivatives about ω_c = 2πc/λ_c follow from β₂(ω) = −D(λ)·λ²/(2πc) and
//! the chain rule dλ/dω = −λ²/(2πc):
//!
//! ```text
//! β₂ = −D λ_c² / (2πc)
//! β₃ =  λ_c³ (λ_c S + 2 D) / (2πc)²
//! β₄ = −(λ_c⁶ Ṡ + 6 λ_c⁵ S + 6 λ_c⁴ D) / (2πc)³
//! ```
//!
//! The inverse map (used by the round-trip tests) is
//!
//! ```text
//! D(λ_c)  = −(2πc) β₂ / λ_c²
//! S(λ_c)  =  2(2πc) β₂ / λ_c³ + (2πc)² β₃ / λ_c⁴
//! Ṡ(λ_c)  = −6(2πc) β₂ / λ_c⁴ − 6(2πc)² β₃ / λ_c⁵ − (2πc)³ β₄ / λ_c⁶
//! ```
//!
//! All frequencies in the model are offsets from f_ref = c/λ_c, so the
//! β-expansion of the phase mismatch is taken about the reference.

use crate::error::ModelError;
use crate::units::{db_to_linear, C_LIGHT, H_PLANCK};

// ---------------------------------------------------------------------------
// Fibre
// ---------------------------------------------------------------------------

/// Fibre power attenuation versus frequency offset from the reference.
#[derive(Debug, Clone, PartialEq)]
pub enum AttenuationCurve {
    /// Flat loss coefficient [1/m].
    Flat(f64),
    /// Piecewise-linear samples of (frequency offset [Hz], loss [1/m]),
    /// strictly increasing in offset. Queries outside the sampled range
    /// clamp to the end values.
    Sampled(Vec<(f64, f64)>),
}

impl AttenuationCurve {
    /// Loss coefficient [1/m] at the given frequency offset from f_ref.
    pub fn alpha_at(&self, f_offset: f64) -> f64 {
        match self {
            AttenuationCurve::Flat(a) => *a,
            AttenuationCurve::Sampled(pts) => {
                if f_offset <= pts[0].0 {
                    return pts[0].1;
                }
                if f_offset >= pts[pts.len() - 1].0 {
                    return pts[pts.len() - 1].1;
                }
                let idx = pts.partition_point(|p| p.0 <= f_offset);
                let (f0, a0) = pts[idx - 1];
                let (f1, a1) = pts[idx];
                a0 + (a1 - a0) * (f_offset - f0) / (f1 - f0)
            }
        }
    }
}

/// Per-span physical fibre description. All quantities in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct FibreSpec {
    /// Span length [m].
    pub span_length: f64,
    /// Nonlinearity coefficient γ [1/(W·m)].
    pub gamma: f64,
    /// Raman gain slope C_r of the triangular gain approximation
    /// [1/(W·m·Hz)]. Zero disables ISRS.
    pub raman_slope: f64,
    /// Power loss coefficient α(f) [1/m].
    pub attenuation: AttenuationCurve,
    /// Dispersion D at λ_c [s/m²].
    pub dispersion_d: f64,
    /// Dispersion slope S at λ_c [s/m³].
    pub dispersion_s: f64,
    /// Dispersion curvature Ṡ at λ_c [s/m⁴].
    pub dispersion_s_dot: f64,
    /// Reference wavelength λ_c [m].
    pub reference_wavelength: f64,
}

impl FibreSpec {
    /// Reference frequency f_ref = c/λ_c [Hz].
    pub fn f_ref(&self) -> f64 {
        C_LIGHT / self.reference_wavelength
    }

    /// Loss coefficient [1/m] at frequency offset `f` from f_ref.
    pub fn alpha_at(&self, f: f64) -> f64 {
        self.attenuation.alpha_at(f)
    }

    /// Group-velocity-dispersion coefficients about ω_c (see module docs).
    pub fn betas(&self) -> BetaCoefficients {
        let lam = self.reference_wavelength;
        let u = 2.0 * std::f64::consts::PI * C_LIGHT;
        let beta2 = -self.dispersion_d * lam * lam / u;
        let beta3 = lam.powi(3) * (lam * self.dispersion_s + 2.0 * self.dispersion_d) / (u * u);
        let beta4 = -(lam.powi(6) * self.dispersion_s_dot
            + 6.0 * lam.powi(5) * self.dispersion_s
            + 6.0 * lam.powi(4) * self.dispersion_d)
            / (u * u * u);
        BetaCoefficients {
            beta2,
            beta3,
            beta4,
            f_ref: self.f_ref(),
        }
    }

    /// Validate the physical invariants, returning the first violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        let field = |name: &str, message: String| ModelError::Validation {
            field: format!("fibre.{name}"),
            message,
        };
        if !(self.span_length > 0.0) {
            return Err(field("span_length", "must be > 0".into()));
        }
        if self.gamma < 0.0 {
            return Err(field("gamma", "must be >= 0".into()));
        }
        if !(self.reference_wavelength > 0.0) {
            return Err(field("reference_wavelength", "must be > 0".into()));
        }
        match &self.attenuation {
            AttenuationCurve::Flat(a) => {
                if !(*a > 0.0) {
                    return Err(field("attenuation", "loss coefficient must be > 0".into()));
                }
            }
            AttenuationCurve::Sampled(pts) => {
                if pts.len() < 2 {
                    return Err(field(
                        "attenuation",
                        "sampled curve needs at least 2 points".into(),
                    ));
                }
                for w in pts.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(field(
                            "attenuation",
                            "curve offsets must be strictly increasing".into(),
                        ));
                    }
                }
                if pts.iter().any(|p| !(p.1 > 0.0)) {
                    return Err(field("attenuation", "loss values must be > 0".into()));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// GVD coefficients
// ---------------------------------------------------------------------------

/// Second-, third- and fourth-order group-velocity-dispersion parameters
/// about the reference frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaCoefficients {
    /// β₂ [s²/m]. Exactly zero when D(λ_c) = 0.
    pub beta2: f64,
    /// β₃ [s³/m].
    pub beta3: f64,
    /// β₄ [s⁴/m].
    pub beta4: f64,
    /// Absolute reference frequency [Hz].
    pub f_ref: f64,
}

/// Reconstruct (D, S, Ṡ) at wavelength λ from β₂, β₃, β₄ taken about
/// ω(λ). Exact inverse of [`FibreSpec::betas`] at λ = λ_c; used by the
/// round-trip consistency tests.
pub fn betas_to_dispersion(betas: &BetaCoefficients, lambda: f64) -> (f64, f64, f64) {
    let u = 2.0 * std::f64::consts::PI * C_LIGHT;
    let d = -u * betas.beta2 / (lambda * lambda);
    let s = 2.0 * u * betas.beta2 / lambda.powi(3) + u * u * betas.beta3 / lambda.powi(4);
    let sdot = -6.0 * u * betas.beta2 / lambda.powi(4)
        - 6.0 * u * u * betas.beta3 / lambda.powi(5)
        - u * u * u * betas.beta4 / lambda.powi(6);
    (d, s, sdot)
}

// ---------------------------------------------------------------------------
// WDM grid
// ---------------------------------------------------------------------------

/// One WDM channel. Frequencies are offsets from f_ref.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Centre frequency offset from f_ref [Hz].
    pub f_offset: f64,
    /// Signal bandwidth (symbol rate) [Hz].
    pub bandwidth: f64,
    /// Launch power [W].
    pub power: f64,
}

/// Channel plan: ordered channels, span count, optional per-span power
/// scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct WdmGrid {
    /// Channels sorted by strictly increasing centre frequency.
    pub channels: Vec<Channel>,
    /// Number of identical spans N_s (≥ 1).
    pub n_spans: u32,
    /// Optional per-span factors (P_{i,q}/P_i)²; defaults to 1 for every
    /// span (transparent amplification).
    pub per_span_power_scale: Option<Vec<f64>>,
}

impl WdmGrid {
    /// Build a validated grid.
    pub fn new(channels: Vec<Channel>, n_spans: u32) -> Result<Self, ModelError> {
        let grid = WdmGrid {
            channels,
            n_spans,
            per_span_power_scale: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Validate ordering, non-overlap and positivity invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let field = |name: String, message: String| ModelError::Validation {
            field: format!("grid.{name}"),
            message,
        };
        if self.n_spans == 0 {
            return Err(field("n_spans".into(), "must be >= 1".into()));
        }
        if self.channels.is_empty() {
            return Err(field("channels".into(), "at least one channel required".into()));
        }
        for (idx, ch) in self.channels.iter().enumerate() {
            if !(ch.bandwidth > 0.0) {
                return Err(field(format!("channels[{idx}].bandwidth"), "must be > 0".into()));
            }
            if !(ch.power > 0.0) {
                return Err(field(format!("channels[{idx}].power"), "must be > 0".into()));
            }
            if !ch.f_offset.is_finite() {
                return Err(field(format!("channels[{idx}].f_offset"), "must be finite".into()));
            }
        }
        for idx in 1..self.channels.len() {
            let a = &self.channels[idx - 1];
            let b = &self.channels[idx];
            if b.f_offset <= a.f_offset {
                return Err(field(
                    format!("channels[{}]", idx),
                    format!(
                        "centre frequencies must be strictly increasing (channels {} and {})",
                        idx - 1,
                        idx
                    ),
                ));
            }
            if b.f_offset - a.f_offset < (a.bandwidth + b.bandwidth) / 2.0 {
                return Err(field(
                    format!("channels[{}]", idx),
                    format!("channels {} and {} overlap", idx - 1, idx),
                ));
            }
        }
        if let Some(scales) = &self.per_span_power_scale {
            if scales.len() != self.n_spans as usize {
                return Err(field(
                    "per_span_power_scale".into(),
                    format!("expected {} entries, got {}", self.n_spans, scales.len()),
                ));
            }
            if scales.iter().any(|s| !(*s >= 0.0)) {
                return Err(field("per_span_power_scale".into(), "must be >= 0".into()));
            }
        }
        Ok(())
    }

    /// Number of channels.
    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Total launch power [W].
    pub fn total_power(&self) -> f64 {
        self.channels.iter().map(|c| c.power).sum()
    }

    /// Occupied optical bandwidth [Hz]: distance between the outermost
    /// channel edges.
    pub fn total_bandwidth(&self) -> f64 {
        let first = &self.channels[0];
        let last = &self.channels[self.channels.len() - 1];
        (last.f_offset + last.bandwidth / 2.0) - (first.f_offset - first.bandwidth / 2.0)
    }

    /// Index of the channel whose band contains the frequency offset `f`,
    /// if any (band edges inclusive).
    pub fn channel_containing(&self, f: f64) -> Option<usize> {
        let idx = self.channels.partition_point(|c| c.f_offset + c.bandwidth / 2.0 < f);
        let ch = self.channels.get(idx)?;
        if f >= ch.f_offset - ch.bandwidth / 2.0 && f <= ch.f_offset + ch.bandwidth / 2.0 {
            Some(idx)
        } else {
            None
        }
    }

    /// Index of the channel whose centre is within `tol` of `f`, if any.
    pub fn channel_with_centre(&self, f: f64, tol: f64) -> Option<usize> {
        let idx = self.channels.partition_point(|c| c.f_offset < f);
        for cand in [idx.wrapping_sub(1), idx] {
            if let Some(ch) = self.channels.get(cand) {
                if (ch.f_offset - f).abs() <= tol {
                    return Some(cand);
                }
            }
        }
        None
    }

    /// Power spectral density [W/Hz] at frequency offset `f` (rectangular
    /// per-channel spectra).
    pub fn psd(&self, f: f64) -> f64 {
        match self.channel_containing(f) {
            Some(i) => self.channels[i].power / self.channels[i].bandwidth,
            None => 0.0,
        }
    }

    /// Sum over spans of (P_{i,q}/P_i)²; equals N_s for identical spans.
    pub fn span_power_scale_sum(&self) -> f64 {
        match &self.per_span_power_scale {
            Some(scales) => scales.iter().sum(),
            None => self.n_spans as f64,
        }
    }
}

// ---------------------------------------------------------------------------
// ASE
// ---------------------------------------------------------------------------

/// Dual-polarisation ASE noise power [W] of a lumped amplifier with noise
/// figure `noise_figure_db`, gain `gain_db`, at absolute frequency `f_abs`,
/// in the reference bandwidth `ref_bandwidth`:
///
/// P_ASE = NF_lin · h · f · (G − 1) · B_ref
///
/// (spontaneous-emission factor n_sp = NF_lin/2 per polarisation, two
/// polarisations). A transparent amplifier (0 dB gain) emits no noise.
pub fn ase_power(noise_figure_db: f64, gain_db: f64, f_abs: f64, ref_bandwidth: f64) -> f64 {
    let g = db_to_linear(gain_db);
    let nf = db_to_linear(noise_figure_db);
    nf * H_PLANCK * f_abs * (g - 1.0).max(0.0) * ref_bandwidth
}
