//! Analytic four-wave-mixing contribution of one channel triplet, and the
//! incoherent accumulation over triplets and spans.
//!
//! Linearising the phase mismatch over the triplet's spectral rectangle
//! (φ ≈ φ₀ + φ₁f₁ + φ₂f₂, f₁ ∈ ±B_j/2, f₂ ∈ ±B_k/2) makes the double
//! integral of the closed-form link function solvable in terms of
//! F(x) = x·atan(x) − ½ln(1+x²):
//!
//! ∬ μ df₁df₂ = Σ_{ℓ,ℓ′} 𝒯𝒯′κκ′ / (φ₁φ₂(ã_ℓ+ã_ℓ′)) ·
//!     [ ã_ℓ·(F(u₊)−F(u₋)−F(v₊)+F(v₋))
//!     + ã_ℓ′·(F(u′₊)−F(u′₋)−F(v′₊)+F(v′₋)) ]
//!
//! with u± = (2φ₀+φ₁B_j±φ₂B_k)/(2ã_ℓ), v± = (2φ₀−φ₁B_j±φ₂B_k)/(2ã_ℓ)
//! and primes for ã_ℓ′. Note the diagonal pairing (the ã_ℓ bracket holds
//! the u/v groups of ã_ℓ itself): each diagonal term ℓ = ℓ′ is a perfect
//! square of the underlying complex sum and must not cancel.
//!
//! When a Taylor slope degenerates (|φ₁|B_j or |φ₂|B_k small against the
//! smallest decay rate — zero-dispersion triplets), the analytic form is
//! ill-conditioned and the term falls back to Gauss–Legendre quadrature
//! of the closed link function over the same rectangle, with the exact
//! mismatch. The same fallback fires when the linearisation itself is
//! poor: far-out pump pairs make the omitted bilinear mismatch term swing
//! by a sizeable fraction of the smallest decay rate across the
//! rectangle, which would otherwise smear the efficiency resonance.

use crate::engine::linkfn::{link_fn_closed, LinkFnTerms};
use crate::engine::triplets::Triplet;
use crate::error::ModelError;
use crate::phase::{phi_exact, taylor_phase, TaylorPhase};
use crate::special::{big_f, gauss_legendre};
use crate::system::{BetaCoefficients, FibreSpec, WdmGrid};
use crate::ChannelFit;

/// Which evaluation route produced a triplet's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    ClosedForm,
    QuadratureFallback,
}

/// One evaluated triplet contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletContribution {
    pub triplet: Triplet,
    pub taylor: TaylorPhase,
    /// Single-span contribution to η_FWM [1/W²].
    pub eta: f64,
    pub path: EvalPath,
}

/// Shared Gauss–Legendre rule for the degenerate fallback.
pub struct FallbackRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl FallbackRule {
    pub fn new(points_per_axis: usize) -> Self {
        let (nodes, weights) = gauss_legendre(points_per_axis.max(4));
        FallbackRule { nodes, weights }
    }

    /// ∬ over [−bj/2, bj/2]×[−bk/2, bk/2] of μ(φ(f₁, f₂)).
    fn integrate<F: Fn(f64, f64) -> f64>(
        &self,
        terms: &LinkFnTerms,
        phi: F,
        bj: f64,
        bk: f64,
    ) -> f64 {
        let mut total = 0.0;
        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
            let f1 = 0.5 * bj * xi;
            let mut row = 0.0;
            for (xj, wj) in self.nodes.iter().zip(&self.weights) {
                let f2 = 0.5 * bk * xj;
                row += wj * link_fn_closed(terms, phi(f1, f2));
            }
            total += wi * row;
        }
        total * 0.25 * bj * bk
    }
}

/// Analytic rectangle integral ∬ μ df₁ df₂ of the closed-form link
/// function under the linearised phase.
pub fn fwm_rect_integral(terms: &LinkFnTerms, tp: &TaylorPhase, bj: f64, bk: f64) -> f64 {
    let n = terms.t_factor.len();
    // Per-ℓ F-brackets: a(ℓ) over the +φ₁B_j edge pair, b(ℓ) over −φ₁B_j.
    let mut edge = Vec::with_capacity(n);
    for l in 0..n {
        let at = terms.alpha_tilde[l];
        let u_plus = (2.0 * tp.phi0 + tp.phi1 * bj + tp.phi2 * bk) / (2.0 * at);
        let u_minus = (2.0 * tp.phi0 + tp.phi1 * bj - tp.phi2 * bk) / (2.0 * at);
        let v_plus = (2.0 * tp.phi0 - tp.phi1 * bj + tp.phi2 * bk) / (2.0 * at);
        let v_minus = (2.0 * tp.phi0 - tp.phi1 * bj - tp.phi2 * bk) / (2.0 * at);
        edge.push((big_f(u_plus) - big_f(u_minus), big_f(v_plus) - big_f(v_minus)));
    }
    let mut total = 0.0;
    for a in 0..n {
        let ca = terms.t_factor[a] * terms.kappa[a];
        let ata = terms.alpha_tilde[a];
        let bracket_a = ata * (edge[a].0 - edge[a].1);
        for b in 0..n {
            let cb = terms.t_factor[b] * terms.kappa[b];
            let atb = terms.alpha_tilde[b];
            let bracket_b = atb * (edge[b].0 - edge[b].1);
            total += ca * cb * (bracket_a + bracket_b) / (ata + atb);
        }
    }
    total / (tp.phi1 * tp.phi2)
}

/// Evaluate one folded triplet. The prefactor normalises the pump powers
/// to the channel of interest, P_jP_kP_m/P_i³, so a Raman-free system is
/// launch-power invariant bit for bit.
#[allow(clippy::too_many_arguments)]
pub fn eta_fwm_triplet(
    triplet: &Triplet,
    fits: &[ChannelFit],
    grid: &WdmGrid,
    spec: &FibreSpec,
    betas: &BetaCoefficients,
    degeneracy_threshold: f64,
    three_index_on_omega1: bool,
    fallback: &FallbackRule,
) -> Result<TripletContribution, ModelError> {
    let ch = &grid.channels;
    let (j, k, m, i) = (triplet.j, triplet.k, triplet.m, triplet.i);
    let tp = taylor_phase(
        ch[j].f_offset,
        ch[k].f_offset,
        ch[m].f_offset,
        ch[i].f_offset,
        betas,
    )?;
    let terms = LinkFnTerms::for_triplet(triplet, fits, spec.span_length, three_index_on_omega1);
    let (bj, bk, bm, bi) = (ch[j].bandwidth, ch[k].bandwidth, ch[m].bandwidth, ch[i].bandwidth);

    let at_min = terms.min_alpha_tilde();
    let degenerate = (tp.phi1.abs() * bj).min(tp.phi2.abs() * bk) < degeneracy_threshold * at_min;
    // The linearisation drops the bilinear (and higher) mismatch terms;
    // when those swing by a sizeable fraction of the resonance width over
    // the rectangle (checked at the corners, where the deviation peaks)
    // AND the rectangle's mismatch interval comes near the resonance,
    // integrate the exact mismatch instead. Far off resonance both forms
    // share the same smooth 1/φ² tail and the deviation is immaterial.
    let exact_phi =
        |f1: f64, f2: f64| phi_exact(f1 + ch[j].f_offset, f2 + ch[k].f_offset, ch[i].f_offset, betas);
    let curved = {
        let mut max_dev = 0.0f64;
        for f1 in [-bj / 2.0, bj / 2.0] {
            for f2 in [-bk / 2.0, bk / 2.0] {
                let linear = tp.phi0 + tp.phi1 * f1 + tp.phi2 * f2;
                max_dev = max_dev.max((exact_phi(f1, f2) - linear).abs());
            }
        }
        let phi_span = 0.5 * (tp.phi1.abs() * bj + tp.phi2.abs() * bk);
        let near_resonance = tp.phi0.abs() <= phi_span + max_dev + 20.0 * at_min;
        max_dev > 0.5 * at_min && near_resonance
    };
    let (integral, path) = if degenerate || curved {
        (fallback.integrate(&terms, exact_phi, bj, bk), EvalPath::QuadratureFallback)
    } else {
        (fwm_rect_integral(&terms, &tp, bj, bk), EvalPath::ClosedForm)
    };

    let p_i = ch[i].power;
    let power_ratio = (ch[j].power / p_i) * (ch[k].power / p_i) * (ch[m].power / p_i);
    let psd_norm = bj * bk * bj.max(bk).max(bm);
    let eta = 16.0 / 27.0 * triplet.tau as f64 * spec.gamma * spec.gamma * bi * power_ratio
        / psd_norm
        * integral;
    Ok(TripletContribution {
        triplet: *triplet,
        taylor: tp,
        eta,
        path,
    })
}

/// Single-span FWM total for channel `i` with per-triplet breakdown,
/// summed in the deterministic lexicographic triplet order.
#[allow(clippy::too_many_arguments)]
pub fn eta_fwm_channel(
    i: usize,
    triplets: &[Triplet],
    fits: &[ChannelFit],
    grid: &WdmGrid,
    spec: &FibreSpec,
    betas: &BetaCoefficients,
    degeneracy_threshold: f64,
    three_index_on_omega1: bool,
    fallback: &FallbackRule,
) -> Result<(f64, Vec<TripletContribution>), ModelError> {
    debug_assert!(triplets.iter().all(|t| t.i == i));
    let mut contributions = Vec::with_capacity(triplets.len());
    let mut total = 0.0;
    for t in triplets {
        let c = eta_fwm_triplet(
            t,
            fits,
            grid,
            spec,
            betas,
            degeneracy_threshold,
            three_index_on_omega1,
            fallback,
        )?;
        total += c.eta;
        contributions.push(c);
    }
    Ok((total, contributions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::triplets::enumerate_triplets;
    use crate::isrs::{fit_all_channels, FitOptions};
    use crate::presets;

    fn system_with_fits(
        count: usize,
        power_dbm: f64,
    ) -> (crate::FibreSpec, crate::WdmGrid, crate::BetaCoefficients, Vec<ChannelFit>) {
        let (spec, grid) = presets::demo_system(count, power_dbm, 1);
        let betas = spec.betas();
        let fits = fit_all_channels(&grid, &spec, &FitOptions::default()).unwrap();
        (spec, grid, betas, fits)
    }

    /// Midpoint Riemann sum of the same rectangle integral; the analytic
    /// form is an exact antiderivative of this integrand, so the two must
    /// agree to quadrature accuracy.
    fn riemann_rect(terms: &LinkFnTerms, tp: &TaylorPhase, bj: f64, bk: f64, n: usize) -> f64 {
        let (h1, h2) = (bj / n as f64, bk / n as f64);
        let mut total = 0.0;
        for a in 0..n {
            let f1 = -bj / 2.0 + (a as f64 + 0.5) * h1;
            let base = tp.phi0 + tp.phi1 * f1;
            let mut row = 0.0;
            for b in 0..n {
                let f2 = -bk / 2.0 + (b as f64 + 0.5) * h2;
                row += link_fn_closed(terms, base + tp.phi2 * f2);
            }
            total += row;
        }
        total * h1 * h2
    }

    #[test]
    fn rect_integral_matches_riemann_oracle() {
        let (spec, grid, betas, fits) = system_with_fits(9, 0.0);
        let mut checked = 0;
        for i in [0usize, 4, 8] {
            for t in enumerate_triplets(&grid, i) {
                let tp = taylor_phase(
                    grid.channels[t.j].f_offset,
                    grid.channels[t.k].f_offset,
                    grid.channels[t.m].f_offset,
                    grid.channels[t.i].f_offset,
                    &betas,
                )
                .unwrap();
                let terms = LinkFnTerms::for_triplet(&t, &fits, spec.span_length, false);
                let (bj, bk) = (grid.channels[t.j].bandwidth, grid.channels[t.k].bandwidth);
                if (tp.phi1.abs() * bj).min(tp.phi2.abs() * bk) < 1e-3 * terms.min_alpha_tilde() {
                    continue; // degenerate: covered by the fallback test
                }
                let analytic = fwm_rect_integral(&terms, &tp, bj, bk);
                let oracle = riemann_rect(&terms, &tp, bj, bk, 800);
                assert!(
                    ((analytic - oracle) / oracle).abs() < 1e-3,
                    "triplet {t:?}: analytic {analytic} vs Riemann {oracle}"
                );
                checked += 1;
            }
        }
        assert!(checked > 10, "too few non-degenerate triplets exercised: {checked}");
    }

    #[test]
    fn diagonal_terms_do_not_cancel_without_raman() {
        // With C_r = 0 only the ℓ = ℓ′ = 0 term survives; the integral
        // must stay strictly positive.
        let (mut spec, grid) = presets::demo_system(9, -2.0, 1);
        spec.raman_slope = 0.0;
        let betas = spec.betas();
        let fits = fit_all_channels(&grid, &spec, &FitOptions::default()).unwrap();
        let fallback = FallbackRule::new(64);
        let triplets = enumerate_triplets(&grid, 0);
        let (total, contributions) = eta_fwm_channel(
            0, &triplets, &fits, &grid, &spec, &betas, 1e-3, false, &fallback,
        )
        .unwrap();
        assert!(total > 0.0, "Raman-free FWM must be positive, got {total}");
        for c in &contributions {
            assert!(c.eta >= 0.0, "negative triplet contribution {c:?}");
        }
    }

    #[test]
    fn mirrored_triplet_bookkeeping() {
        // Evaluating both unfolded triplets with τ = 1 equals evaluating
        // one folded with τ = 2.
        let (spec, grid, betas, fits) = system_with_fits(9, 0.0);
        let fallback = FallbackRule::new(64);
        let folded = enumerate_triplets(&grid, 4)
            .into_iter()
            .find(|t| t.tau == 2)
            .unwrap();
        let c_folded = eta_fwm_triplet(
            &folded, &fits, &grid, &spec, &betas, 1e-3, false, &fallback,
        )
        .unwrap();
        let unfold = |j: usize, k: usize| Triplet {
            j,
            k,
            m: folded.m,
            i: folded.i,
            tau: 1,
            set: folded.set,
        };
        let a = eta_fwm_triplet(
            &unfold(folded.j, folded.k), &fits, &grid, &spec, &betas, 1e-3, false, &fallback,
        )
        .unwrap();
        let b = eta_fwm_triplet(
            &unfold(folded.k, folded.j), &fits, &grid, &spec, &betas, 1e-3, false, &fallback,
        )
        .unwrap();
        let sum = a.eta + b.eta;
        assert!(
            ((c_folded.eta - sum) / sum).abs() < 1e-12,
            "folded {} vs unfolded sum {}",
            c_folded.eta,
            sum
        );
    }

    #[test]
    fn zero_power_interferer_contributes_nothing() {
        let (spec, mut grid, betas, fits) = system_with_fits(5, -2.0);
        let t = enumerate_triplets(&grid, 2)[0];
        grid.channels[t.j].power = 0.0;
        let fallback = FallbackRule::new(64);
        let c =
            eta_fwm_triplet(&t, &fits, &grid, &spec, &betas, 1e-3, false, &fallback).unwrap();
        assert_eq!(c.eta, 0.0);
    }

    #[test]
    fn degenerate_triplets_route_to_fallback_and_match_refinement() {
        // On the zero-dispersion grid some triplets have vanishing Taylor
        // slopes; those must use the quadrature path and agree with a
        // refined rule.
        let (spec, grid, betas, fits) = system_with_fits(9, -2.0);
        let coarse = FallbackRule::new(64);
        let fine = FallbackRule::new(192);
        let mut fallback_seen = 0;
        for i in 0..grid.n_channels() {
            for t in enumerate_triplets(&grid, i) {
                let c = eta_fwm_triplet(&t, &fits, &grid, &spec, &betas, 1e-3, false, &coarse)
                    .unwrap();
                if c.path == EvalPath::QuadratureFallback {
                    fallback_seen += 1;
                    let refined =
                        eta_fwm_triplet(&t, &fits, &grid, &spec, &betas, 1e-3, false, &fine)
                            .unwrap();
                    assert!(
                        ((c.eta - refined.eta) / refined.eta.abs().max(1e-300)).abs() < 1e-3,
                        "fallback not converged for {t:?}: {} vs {}",
                        c.eta,
                        refined.eta
                    );
                }
            }
        }
        assert!(fallback_seen > 0, "expected degenerate triplets on a zero-dispersion grid");
    }

    #[test]
    fn two_span_scaling_is_exact() {
        let (spec, grid, betas, fits) = system_with_fits(5, -2.0);
        let fallback = FallbackRule::new(64);
        let triplets = enumerate_triplets(&grid, 2);
        let (total, _) = eta_fwm_channel(
            2, &triplets, &fits, &grid, &spec, &betas, 1e-3, false, &fallback,
        )
        .unwrap();
        let two_span = 2.0 * total;
        // Identical spans: the span accumulation is a pure scale factor.
        let mut grid2 = grid.clone();
        grid2.n_spans = 2;
        assert_eq!(grid2.span_power_scale_sum() * total, two_span);
    }
}
