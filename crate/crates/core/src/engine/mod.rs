//! The analytic (closed-form) NLI engine: per-channel assembly of SPM,
//! XPM and FWM contributions, multi-span coherent corrections, and the
//! SNR outputs.
//!
//! η_NLI(f_i) = N_s·(η_SPM,1 + η_XPM,1) + η_SPM,cc + η_XPM,cc + η_FWM
//!
//! with the FWM triplet sum accumulated incoherently over spans
//! (Σ_q (P_{i,q}/P_i)², which is N_s for identical spans). The coherence
//! factor of each contribution is ε = ln(1 + η_cc/η_inc)/ln(N_s), the
//! exponent excess of the P_NLI ∝ N_s^{1+ε} accumulation law.

pub mod fwm;
pub mod linkfn;
pub mod spm_xpm;
pub mod triplets;

pub use fwm::{eta_fwm_triplet, fwm_rect_integral, EvalPath, FallbackRule, TripletContribution};
pub use linkfn::{link_fn_closed, link_fn_complex_route, link_fn_z_quadrature, LinkFnTerms};
pub use spm_xpm::XpmCoherentPath;
pub use triplets::{enumerate_triplets, OmegaSet, Triplet};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::EngineSettings;
use crate::error::ModelError;
use crate::isrs::{fit_all_channels, ChannelFit, FitOptions};
use crate::system::{ase_power, BetaCoefficients, FibreSpec, WdmGrid};
use crate::units::{inv_m_to_db_per_km, linear_to_db};

/// Per-channel NLI decomposition and SNR.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NliBreakdown {
    /// Channel index within the grid.
    pub channel: usize,
    /// Centre frequency offset from the reference [Hz].
    pub f_offset: f64,
    /// Incoherently accumulated SPM, N_s·η_SPM,1 [1/W²].
    pub eta_spm_inc: f64,
    /// Coherent SPM correction [1/W²].
    pub eta_spm_cc: f64,
    /// Incoherently accumulated XPM, N_s·η_XPM,1 [1/W²].
    pub eta_xpm_inc: f64,
    /// Coherent XPM correction [1/W²].
    pub eta_xpm_cc: f64,
    /// FWM total over spans [1/W²].
    pub eta_fwm: f64,
    /// Total nonlinear coefficient [1/W²].
    pub eta_nli: f64,
    pub epsilon_spm: f64,
    pub epsilon_xpm: f64,
    pub epsilon_fwm: f64,
    pub epsilon_total: f64,
    /// 1/(η_NLI·P_i²) in dB.
    pub snr_nli_db: f64,
    /// Total SNR per the transparent-link budget, when an amplifier noise
    /// figure is configured.
    pub snr_total_db: Option<f64>,
}

/// Closed-form engine bound to one system description. Immutable after
/// construction; per-channel evaluations are independent and run
/// concurrently in [`CfEngine::evaluate_all`].
pub struct CfEngine<'a> {
    spec: &'a FibreSpec,
    grid: &'a WdmGrid,
    settings: EngineSettings,
    betas: BetaCoefficients,
    fits: Vec<ChannelFit>,
    fallback: FallbackRule,
}

impl<'a> CfEngine<'a> {
    /// Build the engine: converts dispersion, runs the per-channel
    /// profile fits.
    pub fn new(
        spec: &'a FibreSpec,
        grid: &'a WdmGrid,
        settings: EngineSettings,
    ) -> Result<Self, ModelError> {
        spec.validate()?;
        grid.validate()?;
        let fit_options = FitOptions {
            z_samples: settings.fit_z_samples,
            fallback_rms: settings.fit_fallback_rms,
            profile: settings.profile_mode,
            ode_steps_per_km: settings.oracle.z_steps_per_km,
        };
        let fits = fit_all_channels(grid, spec, &fit_options)?;
        let fallback = FallbackRule::new(settings.fwm_fallback_points);
        Ok(CfEngine {
            spec,
            grid,
            betas: spec.betas(),
            settings,
            fits,
            fallback,
        })
    }

    pub fn fits(&self) -> &[ChannelFit] {
        &self.fits
    }

    pub fn betas(&self) -> &BetaCoefficients {
        &self.betas
    }

    pub fn settings(&self) -> &EngineSettings {
        &self.settings
    }

    /// FWM triplet breakdown of one channel (single-span values).
    pub fn fwm_contributions(&self, i: usize) -> Result<Vec<TripletContribution>, ModelError> {
        let triplets = enumerate_triplets(self.grid, i);
        let (_, contributions) = fwm::eta_fwm_channel(
            i,
            &triplets,
            &self.fits,
            self.grid,
            self.spec,
            &self.betas,
            self.settings.degeneracy_threshold,
            self.settings.omega1_three_index,
            &self.fallback,
        )?;
        Ok(contributions)
    }

    /// Evaluate the full decomposition of channel `i`.
    pub fn evaluate_channel(&self, i: usize) -> Result<NliBreakdown, ModelError> {
        let grid = self.grid;
        let n_spans = grid.n_spans;
        let ns = n_spans as f64;
        let (spm1, xpm1) = spm_xpm::eta_spm_xpm_incoherent(
            i,
            grid,
            self.spec,
            &self.betas,
            &self.fits,
            self.settings.spm_xpm_resolution,
        )?;
        let eta_spm_inc = ns * spm1;
        let eta_xpm_inc = ns * xpm1;

        let (eta_spm_cc, eta_xpm_cc) = if self.settings.coherent_corrections && n_spans > 1 {
            let spm_cc = spm_xpm::eta_spm_coherent(
                i,
                grid,
                self.spec,
                &self.betas,
                &self.fits,
                self.settings.spm_coherent_si,
            );
            let xpm_cc = spm_xpm::eta_xpm_coherent_total(
                i,
                grid,
                self.spec,
                &self.betas,
                &self.fits,
                self.settings.xpm_coherent_path,
            )?;
            (spm_cc, xpm_cc)
        } else {
            (0.0, 0.0)
        };

        let eta_fwm = if self.settings.fwm {
            let triplets = enumerate_triplets(grid, i);
            let (single_span, _) = fwm::eta_fwm_channel(
                i,
                &triplets,
                &self.fits,
                grid,
                self.spec,
                &self.betas,
                self.settings.degeneracy_threshold,
                self.settings.omega1_three_index,
                &self.fallback,
            )?;
            grid.span_power_scale_sum() * single_span
        } else {
            0.0
        };

        let eta_nli = eta_spm_inc + eta_spm_cc + eta_xpm_inc + eta_xpm_cc + eta_fwm;
        let epsilon = |cc: f64, inc: f64| -> f64 {
            if n_spans <= 1 || cc == 0.0 || inc <= 0.0 {
                0.0
            } else {
                (1.0 + cc / inc).ln() / ns.ln()
            }
        };
        let epsilon_spm = epsilon(eta_spm_cc, eta_spm_inc);
        let epsilon_xpm = epsilon(eta_xpm_cc, eta_xpm_inc);
        let epsilon_fwm = 0.0; // accumulated incoherently by construction
        let epsilon_total = epsilon(eta_spm_cc + eta_xpm_cc, eta_spm_inc + eta_xpm_inc + eta_fwm);

        let p_i = grid.channels[i].power;
        let snr_nli_db = -linear_to_db(eta_nli * p_i * p_i);
        let snr_total_db = self.settings.ase_noise_figure_db.map(|nf| {
            let f_abs = self.betas.f_ref + grid.channels[i].f_offset;
            let alpha = self.spec.alpha_at(grid.channels[i].f_offset);
            let gain_db = inv_m_to_db_per_km(alpha) * self.spec.span_length / 1e3;
            let p_ase = ase_power(nf, gain_db, f_abs, grid.channels[i].bandwidth);
            linear_to_db(p_i / (ns * p_ase + eta_nli * p_i * p_i * p_i))
        });

        Ok(NliBreakdown {
            channel: i,
            f_offset: grid.channels[i].f_offset,
            eta_spm_inc,
            eta_spm_cc,
            eta_xpm_inc,
            eta_xpm_cc,
            eta_fwm,
            eta_nli,
            epsilon_spm,
            epsilon_xpm,
            epsilon_fwm,
            epsilon_total,
            snr_nli_db,
            snr_total_db,
        })
    }

    /// Evaluate every channel concurrently. Results are indexed by
    /// channel, independent of scheduling order.
    pub fn evaluate_all(&self) -> Result<Vec<NliBreakdown>, ModelError> {
        (0..self.grid.n_channels())
            .into_par_iter()
            .map(|i| self.evaluate_channel(i))
            .collect()
    }
}
