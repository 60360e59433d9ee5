//! Closed-form link function (FWM efficiency) built from per-channel
//! profile fits.
//!
//! With the first-order √ρ profile of each participating channel written
//! as T·(1 − (T̃/T)e^{−α̃z})·e^{−αz/2}, the z-integral defining the link
//! function becomes a finite sum of exponentials; each term
//! (1 − e^{−aL+jφL})/(−a + jφ) is then replaced by κ/(−ã + jφ), where ã
//! and κ are chosen so both sides agree to first order in φ about φ = 0:
//!
//! ```text
//! ã(a) = a·(1 − e^{−aL}) / (1 − e^{−aL} − aL·e^{−aL})
//! κ(a) = ã·(1 − e^{−aL}) / a
//! ```
//!
//! The resulting efficiency is
//!
//! μ(φ) = Σ_{ℓ,ℓ′} 𝒯_ℓ 𝒯_ℓ′ κ_ℓ κ_ℓ′ (ã_ℓ ã_ℓ′ + φ²) /
//!        ((ã_ℓ² + φ²)(ã_ℓ′² + φ²))  =  |Σ_ℓ 𝒯_ℓ κ_ℓ / (−ã_ℓ + jφ)|².
//!
//! For a triplet with the pump pair symmetric about the channel of
//! interest (m = i, [`OmegaSet::One`]) the m and i profiles cancel and ℓ
//! runs over (l_j, l_k) ∈ {0,1}²; otherwise ([`OmegaSet::Two`]) the
//! channel-of-interest profile is reduced to its pure-loss part and ℓ
//! runs over (l_j, l_k, l_m) ∈ {0,1}³. The transposed layout (the
//! 3-index sum on Ω₁ and 2-index on Ω₂) is retained behind a flag for
//! cross-checking; the default is the one that matches the z-quadrature
//! of the underlying integral (see `omega_layout_pinned_by_z_quadrature`).

use num_complex::Complex64;

use crate::engine::triplets::{OmegaSet, Triplet};
use crate::isrs::{sqrt_rho_taylor, ChannelFit};

/// ã(a): the effective decay rate of the fraction approximation.
pub fn fraction_alpha_tilde(a: f64, span_length: f64) -> f64 {
    let t = a * span_length;
    let one_m_e = -(-t).exp_m1();
    a * one_m_e / (one_m_e - t * (-t).exp())
}

/// κ(a): the matched numerator of the fraction approximation,
/// κ = ã·(1 − e^{−aL})/a (dimensionless).
pub fn fraction_kappa(a: f64, a_tilde: f64, span_length: f64) -> f64 {
    a_tilde / a * -(-a * span_length).exp_m1()
}

/// Per-ℓ terms of the closed-form link function for one interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkFnTerms {
    /// Signed profile weights 𝒯_ℓ (dimensionless).
    pub t_factor: Vec<f64>,
    /// Matched numerators κ_ℓ (dimensionless).
    pub kappa: Vec<f64>,
    /// Effective decay rates ã_ℓ [1/m].
    pub alpha_tilde: Vec<f64>,
    /// Exponent rates a_ℓ of the underlying z-integral [1/m].
    pub alpha: Vec<f64>,
}

impl LinkFnTerms {
    fn from_components(span_length: f64, weights: Vec<f64>, rates: Vec<f64>) -> Self {
        let alpha_tilde: Vec<f64> =
            rates.iter().map(|&a| fraction_alpha_tilde(a, span_length)).collect();
        let kappa: Vec<f64> = rates
            .iter()
            .zip(&alpha_tilde)
            .map(|(&a, &at)| fraction_kappa(a, at, span_length))
            .collect();
        LinkFnTerms {
            t_factor: weights,
            kappa,
            alpha_tilde,
            alpha: rates,
        }
    }

    /// Terms for an FWM triplet. `three_index_on_omega1` selects the
    /// transposed index layout (cross-check only; default `false`).
    pub fn for_triplet(
        triplet: &Triplet,
        fits: &[ChannelFit],
        span_length: f64,
        three_index_on_omega1: bool,
    ) -> Self {
        let fj = &fits[triplet.j];
        let fk = &fits[triplet.k];
        let fm = &fits[triplet.m];
        let fi = &fits[triplet.i];
        // (1 − (T̃/T)e^{−α̃z})·T expands to the two weights {T... , −T̃}.
        let pick = |fit: &ChannelFit, l: usize| -> (f64, f64) {
            if l == 0 {
                (fit.t, 0.0)
            } else {
                (-fit.t_tilde, fit.alpha_tilde)
            }
        };
        let two_index = |a_base: f64| -> (Vec<f64>, Vec<f64>) {
            let mut weights = Vec::with_capacity(4);
            let mut rates = Vec::with_capacity(4);
            for lj in 0..2 {
                for lk in 0..2 {
                    let (wj, rj) = pick(fj, lj);
                    let (wk, rk) = pick(fk, lk);
                    weights.push(wj * wk);
                    rates.push(a_base + rj + rk);
                }
            }
            (weights, rates)
        };
        let three_index = |a_base: f64, third: &ChannelFit| -> (Vec<f64>, Vec<f64>) {
            let mut weights = Vec::with_capacity(8);
            let mut rates = Vec::with_capacity(8);
            for lj in 0..2 {
                for lk in 0..2 {
                    for lm in 0..2 {
                        let (wj, rj) = pick(fj, lj);
                        let (wk, rk) = pick(fk, lk);
                        let (wm, rm) = pick(third, lm);
                        weights.push(wj * wk * wm);
                        rates.push(a_base + rj + rk + rm);
                    }
                }
            }
            (weights, rates)
        };
        let (weights, rates) = match (triplet.set, three_index_on_omega1) {
            (OmegaSet::One, false) | (OmegaSet::Two, true) => {
                // Pair sum: the m and i profiles drop out of the ratio.
                two_index((fj.alpha + fk.alpha) / 2.0)
            }
            (OmegaSet::Two, false) => {
                three_index((fj.alpha + fk.alpha + fm.alpha - fi.alpha) / 2.0, fm)
            }
            (OmegaSet::One, true) => {
                three_index((fj.alpha + fk.alpha) / 2.0, fi)
            }
        };
        LinkFnTerms::from_components(span_length, weights, rates)
    }

    /// Terms for the self- or cross-channel efficiency of a single
    /// channel's power profile ρ = T′·(1 − (T̃′/T′)e^{−α̃z})·e^{−αz}
    /// (ℓ ∈ {0,1}).
    pub fn for_single_channel(fit: &ChannelFit, span_length: f64) -> Self {
        let weights = vec![fit.t_prime, -fit.t_tilde_prime];
        let rates = vec![fit.alpha, fit.alpha + fit.alpha_tilde];
        LinkFnTerms::from_components(span_length, weights, rates)
    }

    /// Smallest effective decay rate; sets the φ scale of the efficiency.
    pub fn min_alpha_tilde(&self) -> f64 {
        self.alpha_tilde.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Closed-form link function μ(φ) [m²] as the double sum over (ℓ, ℓ′).
pub fn link_fn_closed(terms: &LinkFnTerms, phi: f64) -> f64 {
    let n = terms.t_factor.len();
    let p2 = phi * phi;
    let mut total = 0.0;
    for a in 0..n {
        let ca = terms.t_factor[a] * terms.kappa[a];
        let ata = terms.alpha_tilde[a];
        let da = ata * ata + p2;
        for b in 0..n {
            let cb = terms.t_factor[b] * terms.kappa[b];
            let atb = terms.alpha_tilde[b];
            total += ca * cb * (ata * atb + p2) / (da * (atb * atb + p2));
        }
    }
    total
}

/// Independent algebraic route: μ(φ) = |Σ_ℓ 𝒯_ℓ κ_ℓ/(−ã_ℓ + jφ)|².
pub fn link_fn_complex_route(terms: &LinkFnTerms, phi: f64) -> f64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for l in 0..terms.t_factor.len() {
        sum += terms.t_factor[l] * terms.kappa[l]
            / Complex64::new(-terms.alpha_tilde[l], phi);
    }
    sum.norm_sqr()
}

/// Reference z-quadrature of the link function with the first-order √ρ
/// profiles and exact phase rotation:
/// |∫₀ᴸ √ρ_j √ρ_k √ρ_m / √ρ_i · e^{jφζ} dζ|² (composite Simpson).
///
/// For [`OmegaSet::Two`] the channel-of-interest profile is reduced to
/// its pure-loss part e^{−α_i ζ/2}, matching the closed form's
/// convention; `coi_full_profile` keeps the full denominator instead.
#[allow(clippy::too_many_arguments)]
pub fn link_fn_z_quadrature(
    fit_j: &ChannelFit,
    fit_k: &ChannelFit,
    fit_m: &ChannelFit,
    fit_i: &ChannelFit,
    set: OmegaSet,
    phi: f64,
    span_length: f64,
    steps: usize,
    coi_full_profile: bool,
) -> f64 {
    let n = if steps % 2 == 0 { steps.max(2) } else { steps + 1 };
    let h = span_length / n as f64;
    let integrand = |z: f64| -> Complex64 {
        let num = sqrt_rho_taylor(z, fit_j) * sqrt_rho_taylor(z, fit_k) * sqrt_rho_taylor(z, fit_m);
        let den = match set {
            OmegaSet::One => sqrt_rho_taylor(z, fit_i),
            OmegaSet::Two => {
                if coi_full_profile {
                    sqrt_rho_taylor(z, fit_i)
                } else {
                    (-0.5 * fit_i.alpha * z).exp()
                }
            }
        };
        Complex64::from_polar(1.0, phi * z) * (num / den)
    };
    let mut sum = integrand(0.0) + integrand(span_length);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += integrand(k as f64 * h) * w;
    }
    (sum * h / 3.0).norm_sqr()
}
