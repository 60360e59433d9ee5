//! Self- and cross-phase-modulation contributions: single-span values by
//! deterministic 2-D quadrature of the GN integrand over the SPM square
//! and XPM strips (closed-form link function, exact phase mismatch), and
//! the multi-span coherent corrections.
//!
//! # Coherent corrections
//!
//! For N_s identical spans the phased-array factor splits into N_s
//! (incoherent) plus an oscillating part 2Σ_{n=1}^{N_s−1}(N_s−n)cos(nφL).
//! Carrying that part through the same closed-form machinery gives, with
//! per-channel factors T̃′ = −P_tot·C_r·f/α̃, T′ = 1 + T̃′ and the
//! fraction-matched ã_l, κ_l of the single-channel profile (l ∈ {0,1}):
//!
//! SPM: η_cc = (16/27)(γ²/B_i²)·[Σ_l T′(−T̃′/T′)^l κ_l/ã_l]² ·
//!             (1/(φ_i L))·Σ_n (8(N_s−n)/n)·atan(n·φ_i·L·B_i²/4)
//!
//! (optionally with Si instead of atan), and per interferer k:
//!
//! XPM: η_cc = (32/27)(γ²/B_k²)(P_k/P_i)²·T′_i² Σ_{l,l′} (−T̃′_k/T′_k)^{l+l′}
//!             κ_l κ_l′ · Σ_n 2(N_s−n)·2B_k·I_n,
//! I_n = ∫₀^{B_i/2} cos(n·φ_{i,k}·L·f)/(ã_l ã_l′ + φ_{i,k}²f²) df.
//!
//! I_n is evaluated exactly through the complex exponential integral
//! (including its branch-cut term, which is what keeps the expression
//! finite as φ_{i,k} → 0), or through the cheaper large-argument form
//! sign(φ)πe^{−a} + 2a·sin(X)/(a²+X²) with a = nL√(ã_l ã_l′),
//! X = n·φ_{i,k}·L·B_i/2.

use num_complex::Complex64;

use crate::engine::linkfn::{link_fn_closed, LinkFnTerms};
use crate::error::ModelError;
use crate::isrs::ChannelFit;
use crate::phase::{phi_exact, phi_spm, phi_xpm};
use crate::special::{exp_integral_e1_scaled, sine_integral, sine_integral_atan_approx};
use crate::system::{BetaCoefficients, FibreSpec, WdmGrid};

/// Evaluation route for the coherent XPM sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XpmCoherentPath {
    /// Exact exponential-integral form, branch-cut term included (default).
    E1Exact,
    /// Large-argument surrogate with the sine term taken real.
    PublishedSin,
}

// ---------------------------------------------------------------------------
// Incoherent single-span quadrature
// ---------------------------------------------------------------------------

/// Relative power (vs the channel of interest) and bandwidth of the
/// channel covering f₃, walked incrementally along a row of samples.
struct PsdCursor<'a> {
    grid: &'a WdmGrid,
    idx: usize,
}

impl<'a> PsdCursor<'a> {
    fn new(grid: &'a WdmGrid) -> Self {
        PsdCursor { grid, idx: 0 }
    }

    /// `f` must be non-decreasing between calls for a given cursor.
    fn weight(&mut self, f: f64, p_i: f64) -> f64 {
        let ch = &self.grid.channels;
        while self.idx < ch.len() && ch[self.idx].f_offset + ch[self.idx].bandwidth / 2.0 < f {
            self.idx += 1;
        }
        if self.idx >= ch.len() {
            return 0.0;
        }
        let c = &ch[self.idx];
        if f >= c.f_offset - c.bandwidth / 2.0 {
            (c.power / p_i) / c.bandwidth
        } else {
            0.0
        }
    }
}

/// Midpoint f₁ samples over `range`, graded around `peak` when the
/// efficiency ridge there is narrow: the mismatch vanishes on the line
/// f₁ = f_i, so far-detuned strips concentrate their weight in a window
/// of width ~ã/|∂φ/∂f₁| that a uniform mesh cannot resolve. Half the
/// samples go to an inner window of ±16 window-widths, a quarter to each
/// outer flank. Returns (position, weight) pairs in increasing order.
fn f1_samples(range: (f64, f64), peak: f64, ridge_width: Option<f64>, res: usize) -> Vec<(f64, f64)> {
    let uniform = |lo: f64, hi: f64, n: usize, out: &mut Vec<(f64, f64)>| {
        let h = (hi - lo) / n as f64;
        for a in 0..n {
            out.push((lo + (a as f64 + 0.5) * h, h));
        }
    };
    let mut out = Vec::with_capacity(res);
    match ridge_width {
        Some(w) if w < (range.1 - range.0) / 4.0 => {
            // Panels: [lo, peak−w] | [peak−w, peak+w] | [peak+w, hi].
            let n_outer = (res / 4).max(8);
            let n_inner = (res / 2).max(16);
            uniform(range.0, peak - w, n_outer, &mut out);
            uniform(peak - w, peak + w, n_inner, &mut out);
            uniform(peak + w, range.1, n_outer, &mut out);
        }
        _ => uniform(range.0, range.1, res, &mut out),
    }
    out
}

/// Midpoint sum of μ(φ_exact)·G₃-weight over a rectangle with the given
/// f₁ samples and `res` uniform f₂ samples. Returns Σ·w₁·Δf₂ with the G₃
/// weight in relative power units (P₃/P_i)/B₃.
#[allow(clippy::too_many_arguments)]
fn integrate_rectangle(
    grid: &WdmGrid,
    betas: &BetaCoefficients,
    i: usize,
    terms: &LinkFnTerms,
    f1: &[(f64, f64)],
    f2_range: (f64, f64),
    res: usize,
) -> f64 {
    let f_i = grid.channels[i].f_offset;
    let p_i = grid.channels[i].power;
    let h2 = (f2_range.1 - f2_range.0) / res as f64;
    let mut total = 0.0;
    for &(f1v, w1) in f1 {
        let mut cursor = PsdCursor::new(grid);
        // Pre-position the cursor for this row's lowest f₃.
        let f3_start = f1v + f2_range.0 + 0.5 * h2 - f_i;
        cursor.idx = grid
            .channels
            .partition_point(|c| c.f_offset + c.bandwidth / 2.0 < f3_start);
        let mut row = 0.0;
        for b in 0..res {
            let f2 = f2_range.0 + (b as f64 + 0.5) * h2;
            let w3 = cursor.weight(f1v + f2 - f_i, p_i);
            if w3 != 0.0 {
                row += w3 * link_fn_closed(terms, phi_exact(f1v, f2, f_i, betas));
            }
        }
        total += row * w1;
    }
    total * h2
}

/// Single-span SPM and XPM contributions (η_SPM,1, η_XPM,1) [1/W²] for
/// channel `i`: 2-D midpoint quadrature at `resolution` and 2×resolution
/// per axis with one Richardson extrapolation. Errors if the two
/// resolutions disagree by more than 0.05 dB.
pub fn eta_spm_xpm_incoherent(
    i: usize,
    grid: &WdmGrid,
    spec: &FibreSpec,
    betas: &BetaCoefficients,
    fits: &[ChannelFit],
    resolution: usize,
) -> Result<(f64, f64), ModelError> {
    let ch = &grid.channels;
    let f_i = ch[i].f_offset;
    let b_i = ch[i].bandwidth;
    let gn_prefactor = 16.0 / 27.0 * spec.gamma * spec.gamma;

    let richardson = |coarse: f64, fine: f64, what: &str| -> Result<f64, ModelError> {
        if coarse > 0.0 && fine > 0.0 {
            let shift_db = 10.0 * (fine / coarse).log10().abs();
            if shift_db > 0.05 {
                return Err(ModelError::QuadratureNonConvergence(format!(
                    "{what} changed by {shift_db:.3} dB when doubling the resolution"
                )));
            }
        }
        Ok((4.0 * fine - coarse) / 3.0)
    };

    // SPM square: f₁, f₂ over the channel's own band; the link function of
    // the channel's own power profile. The G₃ weight keeps the corner cut
    // and neighbour slivers of the true integrand.
    let spm_terms = LinkFnTerms::for_single_channel(&fits[i], spec.span_length);
    let square = (f_i - b_i / 2.0, f_i + b_i / 2.0);
    let spm_raw = richardson(
        integrate_rectangle(
            grid,
            betas,
            i,
            &spm_terms,
            &f1_samples(square, f_i, None, resolution),
            square,
            resolution,
        ),
        integrate_rectangle(
            grid,
            betas,
            i,
            &spm_terms,
            &f1_samples(square, f_i, None, 2 * resolution),
            square,
            2 * resolution,
        ),
        "SPM quadrature",
    )?;
    // (16/27)γ²(B_i/P_i³)·(P_i/B_i)²·Σ = (16/27)γ²/B_i·Σ (weight carries P₃/P_i/B₃)
    let eta_spm = gn_prefactor / b_i * spm_raw;

    // XPM strips: f₁ over the COI band, f₂ over each interferer's band,
    // doubled for the mirrored strip. The f₁ mesh is graded around the
    // efficiency ridge at f₁ = f_i.
    let mut eta_xpm = 0.0;
    for k in 0..ch.len() {
        if k == i {
            continue;
        }
        let b_k = ch[k].bandwidth;
        let f_k = ch[k].f_offset;
        let strip_terms = LinkFnTerms::for_single_channel(&fits[k], spec.span_length);
        let strip = (f_k - b_k / 2.0, f_k + b_k / 2.0);
        let slope = phi_xpm(f_i, f_k, betas)?.abs();
        let ridge = (slope > 0.0).then(|| 16.0 * strip_terms.min_alpha_tilde() / slope);
        let raw = richardson(
            integrate_rectangle(
                grid,
                betas,
                i,
                &strip_terms,
                &f1_samples(square, f_i, ridge, resolution),
                strip,
                resolution,
            ),
            integrate_rectangle(
                grid,
                betas,
                i,
                &strip_terms,
                &f1_samples(square, f_i, ridge, 2 * resolution),
                strip,
                2 * resolution,
            ),
            "XPM quadrature",
        )?;
        // (16/27)γ²(B_i/P_i³)(P_i/B_i)(P_k/B_k)·Σs; ×2 for the mirror strip.
        eta_xpm += 2.0 * gn_prefactor * (ch[k].power / ch[i].power) / b_k * raw;
    }
    Ok((eta_spm, eta_xpm))
}

// ---------------------------------------------------------------------------
// Coherent corrections
// ---------------------------------------------------------------------------

/// Single-channel fraction terms (ã_l, κ_l) for l ∈ {0, 1} and the
/// signed weights of the ρ-profile expansion.
fn single_channel_cc_terms(fit: &ChannelFit, span_length: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
    use crate::engine::linkfn::{fraction_alpha_tilde, fraction_kappa};
    let rates = [fit.alpha, fit.alpha + fit.alpha_tilde];
    let mut at = [0.0; 2];
    let mut kap = [0.0; 2];
    for l in 0..2 {
        at[l] = fraction_alpha_tilde(rates[l], span_length);
        kap[l] = fraction_kappa(rates[l], at[l], span_length);
    }
    let weights = [fit.t_prime, -fit.t_tilde_prime];
    (weights, at, kap)
}

/// Coherent SPM correction with an explicit mismatch factor (testing
/// hook; production callers use [`eta_spm_coherent`]).
pub fn eta_spm_coherent_with_phi(
    fit: &ChannelFit,
    phi_i: f64,
    b_i: f64,
    span_length: f64,
    n_spans: u32,
    gamma: f64,
    use_si: bool,
) -> f64 {
    if n_spans <= 1 {
        return 0.0;
    }
    let (weights, at, kap) = single_channel_cc_terms(fit, span_length);
    let base: f64 = (0..2).map(|l| weights[l] * kap[l] / at[l]).sum();
    let arg1 = phi_i * span_length * b_i * b_i / 4.0;
    let n_spans_f = n_spans as f64;
    let phase_sum = if arg1.abs() < 1e-6 {
        // atan(x) ≈ Si(x) ≈ x: Σ 8(N−n)/n · n·L·B²/4 / (L) = B²·N(N−1)
        b_i * b_i * n_spans_f * (n_spans_f - 1.0)
    } else {
        let g = if use_si { sine_integral } else { sine_integral_atan_approx };
        let mut s = 0.0;
        for n in 1..n_spans {
            s += 8.0 * (n_spans - n) as f64 / n as f64 * g(n as f64 * arg1);
        }
        s / (phi_i * span_length)
    };
    16.0 / 27.0 * gamma * gamma / (b_i * b_i) * base * base * phase_sum
}

/// Multi-span coherent SPM correction [1/W²] for channel `i`. Zero for a
/// single span.
pub fn eta_spm_coherent(
    i: usize,
    grid: &WdmGrid,
    spec: &FibreSpec,
    betas: &BetaCoefficients,
    fits: &[ChannelFit],
    use_si: bool,
) -> f64 {
    let ch = &grid.channels[i];
    eta_spm_coherent_with_phi(
        &fits[i],
        phi_spm(ch.f_offset, betas),
        ch.bandwidth,
        spec.span_length,
        grid.n_spans,
        spec.gamma,
        use_si,
    )
}

/// I_n = ∫₀^{B_i/2} cos(nφLf)/(ã_l·ã_l′ + φ²f²) df for one (l, l′, n).
fn xpm_cc_integral(
    at_l: f64,
    at_lp: f64,
    phi: f64,
    b_i: f64,
    span_length: f64,
    n: u32,
    path: XpmCoherentPath,
) -> f64 {
    let root = (at_l * at_lp).sqrt();
    let x = n as f64 * phi * span_length * b_i / 2.0;
    if x.abs() < 1e-6 {
        // φ → 0 (or perfectly matched): the integrand loses its phase and
        // the branch-cut and oscillating parts cancel analytically.
        return b_i / (2.0 * at_l * at_lp);
    }
    let a = n as f64 * span_length * root;
    let bracket = match path {
        XpmCoherentPath::E1Exact => {
            let rot = Complex64::new(0.0, x).exp();
            let s_plus = exp_integral_e1_scaled(Complex64::new(a, -x)).expect("a > 0");
            let s_minus = exp_integral_e1_scaled(Complex64::new(-a, -x)).expect("a > 0");
            (rot * (s_plus - s_minus)).im + x.signum() * std::f64::consts::PI * (-a).exp()
        }
        XpmCoherentPath::PublishedSin => {
            x.signum() * std::f64::consts::PI * (-a).exp()
                + 2.0 * a * x.sin() / (a * a + x * x)
        }
    };
    bracket / (2.0 * phi * root)
}

/// Coherent XPM correction of interferer `k` with an explicit mismatch
/// factor (testing hook).
#[allow(clippy::too_many_arguments)]
pub fn eta_xpm_coherent_with_phi(
    fit_i: &ChannelFit,
    fit_k: &ChannelFit,
    phi_ik: f64,
    b_i: f64,
    b_k: f64,
    power_ratio_ki: f64,
    span_length: f64,
    n_spans: u32,
    gamma: f64,
    path: XpmCoherentPath,
) -> f64 {
    if n_spans <= 1 {
        return 0.0;
    }
    let (_, at, kap) = single_channel_cc_terms(fit_k, span_length);
    let ratio = -fit_k.t_tilde_prime / fit_k.t_prime;
    let pre = 32.0 / 27.0 * gamma * gamma / (b_k * b_k)
        * power_ratio_ki
        * power_ratio_ki
        * fit_i.t_prime
        * fit_i.t_prime;
    let mut total = 0.0;
    for l in 0..2 {
        for lp in 0..2 {
            let weight = ratio.powi((l + lp) as i32) * kap[l] * kap[lp];
            let mut n_sum = 0.0;
            for n in 1..n_spans {
                n_sum += 2.0 * (n_spans - n) as f64
                    * 2.0
                    * b_k
                    * xpm_cc_integral(at[l], at[lp], phi_ik, b_i, span_length, n, path);
            }
            total += weight * n_sum;
        }
    }
    pre * total
}

/// Multi-span coherent XPM correction [1/W²] for channel `i`, summed over
/// every interferer. Zero for a single span.
pub fn eta_xpm_coherent_total(
    i: usize,
    grid: &WdmGrid,
    spec: &FibreSpec,
    betas: &BetaCoefficients,
    fits: &[ChannelFit],
    path: XpmCoherentPath,
) -> Result<f64, ModelError> {
    if grid.n_spans <= 1 {
        return Ok(0.0);
    }
    let ch = &grid.channels;
    let mut total = 0.0;
    for k in 0..ch.len() {
        if k == i {
            continue;
        }
        let phi_ik = phi_xpm(ch[i].f_offset, ch[k].f_offset, betas)?;
        total += eta_xpm_coherent_with_phi(
            &fits[i],
            &fits[k],
            phi_ik,
            ch[i].bandwidth,
            ch[k].bandwidth,
            ch[k].power / ch[i].power,
            spec.span_length,
            grid.n_spans,
            spec.gamma,
            path,
        );
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isrs::{fit_all_channels, FitOptions};
    use crate::presets;

    fn fits_for(
        spec: &crate::FibreSpec,
        grid: &crate::WdmGrid,
    ) -> Vec<ChannelFit> {
        fit_all_channels(grid, spec, &FitOptions::default()).unwrap()
    }

    // -- incoherent quadrature ---------------------------------------------

    #[test]
    fn single_channel_has_no_xpm() {
        let (spec, mut grid) = presets::demo_system(3, -2.0, 1);
        grid.channels.drain(1..);
        let betas = spec.betas();
        let fits = fits_for(&spec, &grid);
        let (spm, xpm) = eta_spm_xpm_incoherent(0, &grid, &spec, &betas, &fits, 128).unwrap();
        assert!(spm > 0.0);
        assert_eq!(xpm, 0.0);
    }

    #[test]
    fn incoherent_is_power_invariant_without_raman() {
        let (mut spec, _) = presets::demo_system(5, -2.0, 1);
        spec.raman_slope = 0.0;
        let betas = spec.betas();
        let mut results = Vec::new();
        for power_dbm in [-6.0, -2.0, 2.0] {
            let grid = presets::demo_grid(5, power_dbm, 1);
            let fits = fits_for(&spec, &grid);
            results.push(eta_spm_xpm_incoherent(2, &grid, &spec, &betas, &fits, 96).unwrap());
        }
        assert_eq!(results[0], results[1], "η must not depend on flat launch power");
        assert_eq!(results[1], results[2]);
    }

    #[test]
    fn xpm_strips_shrink_with_detuning() {
        // Far interferers contribute less than near ones on a dispersive
        // grid (narrower efficiency peak).
        let (mut spec, grid) = presets::demo_system(9, -2.0, 1);
        spec.dispersion_d = crate::units::dispersion_to_si(3.0);
        let betas = spec.betas();
        let fits = fits_for(&spec, &grid);
        // Compare XPM totals of an edge channel vs the centre channel:
        // the edge channel sees more far interferers, so less XPM.
        let (_, xpm_centre) = eta_spm_xpm_incoherent(4, &grid, &spec, &betas, &fits, 96).unwrap();
        let (_, xpm_edge) = eta_spm_xpm_incoherent(0, &grid, &spec, &betas, &fits, 96).unwrap();
        assert!(
            xpm_edge < xpm_centre,
            "edge XPM {xpm_edge} should be below centre XPM {xpm_centre}"
        );
    }

    // -- coherent SPM --------------------------------------------------------

    #[test]
    fn coherent_terms_vanish_for_single_span() {
        let (spec, grid) = presets::demo_system(5, -2.0, 1);
        let betas = spec.betas();
        let fits = fits_for(&spec, &grid);
        assert_eq!(eta_spm_coherent(2, &grid, &spec, &betas, &fits, false), 0.0);
        assert_eq!(
            eta_xpm_coherent_total(2, &grid, &spec, &betas, &fits, XpmCoherentPath::E1Exact)
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn spm_coherent_matched_limit() {
        // φ_i → 0 must approach the analytic limit smoothly and stay
        // finite and positive. At φ = 1e-30 the atan arguments are ~2e-4,
        // so the atan path itself is still exercised.
        let (spec, grid) = presets::demo_system(5, -2.0, 10);
        let fits = fits_for(&spec, &grid);
        let b_i = grid.channels[2].bandwidth;
        let limit = eta_spm_coherent_with_phi(&fits[2], 0.0, b_i, spec.span_length, 10, spec.gamma, false);
        let tiny = eta_spm_coherent_with_phi(&fits[2], 1e-30, b_i, spec.span_length, 10, spec.gamma, false);
        assert!(limit > 0.0);
        assert!(
            ((limit - tiny) / limit).abs() < 1e-5,
            "limit {limit} vs φ=1e-30 value {tiny}"
        );
        // Just above the switch threshold the two routes coincide tightly.
        let small = eta_spm_coherent_with_phi(&fits[2], 1e-32, b_i, spec.span_length, 10, spec.gamma, false);
        assert!(((limit - small) / limit).abs() < 1e-9, "near-threshold value {small}");
    }

    #[test]
    fn spm_coherent_perfectly_matched_equals_ns_squared_scaling() {
        // At φ_i = 0 the coherent term must complete the incoherent part
        // to N_s² scaling of the full-square efficiency: cc/limit-base
        // equals N(N−1) relative to a single span with the same terms.
        let (spec, grid) = presets::demo_system(5, -2.0, 10);
        let fits = fits_for(&spec, &grid);
        let b_i = grid.channels[2].bandwidth;
        let (weights, at, kap) = single_channel_cc_terms(&fits[2], spec.span_length);
        let base: f64 = (0..2).map(|l| weights[l] * kap[l] / at[l]).sum();
        let expected = 16.0 / 27.0 * spec.gamma * spec.gamma / (b_i * b_i)
            * base
            * base
            * b_i
            * b_i
            * 10.0
            * 9.0;
        let got = eta_spm_coherent_with_phi(&fits[2], 0.0, b_i, spec.span_length, 10, spec.gamma, false);
        assert!(((got - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn spm_coherent_si_and_atan_agree_at_small_mismatch() {
        let (spec, grid) = presets::demo_system(5, -2.0, 10);
        let fits = fits_for(&spec, &grid);
        let b_i = grid.channels[2].bandwidth;
        // Small argument: Si ≈ atan ≈ x.
        let phi = 1e-18;
        let a = eta_spm_coherent_with_phi(&fits[2], phi, b_i, spec.span_length, 10, spec.gamma, false);
        let s = eta_spm_coherent_with_phi(&fits[2], phi, b_i, spec.span_length, 10, spec.gamma, true);
        assert!(((a - s) / a).abs() < 1e-3, "atan {a} vs Si {s}");
    }

    // -- coherent XPM ---------------------------------------------------------

    #[test]
    fn xpm_cc_integral_matches_direct_quadrature() {
        // The exact path must reproduce a brute-force integral of
        // cos(nφLf)/(ãã′ + φ²f²) over [0, B_i/2].
        let (at_l, at_lp) = (7.6e-5, 1.5e-4);
        let b_i = 96e9;
        let l = 80e3;
        for &phi in &[3e-18, 1e-16, -4e-16, 2e-15] {
            for n in [1u32, 3, 9] {
                let got = xpm_cc_integral(at_l, at_lp, phi, b_i, l, n, XpmCoherentPath::E1Exact);
                let oracle = crate::special::integrate_simpson(
                    |f| (n as f64 * phi * l * f).cos() / (at_l * at_lp + phi * phi * f * f),
                    0.0,
                    b_i / 2.0,
                    200_000,
                );
                assert!(
                    ((got - oracle) / oracle).abs() < 1e-7,
                    "n={n} phi={phi}: got {got} vs oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn xpm_cc_integral_published_path_tracks_exact_at_large_argument() {
        // The published surrogate keeps only the leading asymptotic order
        // of each exponential-integral term, so its error scales as
        // 1/(nL√(ãã′)): ~15% at a ≈ 6 and ~2% at a ≈ 48.
        let b_i = 96e9;
        let l = 80e3;
        for &(at, tol) in &[(7.7e-5_f64, 0.25), (6e-4, 0.05)] {
            for &phi in &[5e-16, -2e-15] {
                for n in [1u32, 4] {
                    let exact = xpm_cc_integral(at, at, phi, b_i, l, n, XpmCoherentPath::E1Exact);
                    let fast =
                        xpm_cc_integral(at, at, phi, b_i, l, n, XpmCoherentPath::PublishedSin);
                    assert!(
                        ((exact - fast) / exact).abs() < tol,
                        "a={:.1} n={n} phi={phi}: exact {exact} vs published {fast}",
                        n as f64 * l * at
                    );
                }
            }
        }
    }

    #[test]
    fn far_detuned_interferer_coherence_is_negligible() {
        // High-|β₂| fibre, interferer 8 THz away: its coherence survives
        // only through the branch-cut floor π·e^{−nL√(ãã′)}, which is
        // negligible against the channel's incoherent XPM.
        let (mut spec, _) = presets::demo_system(3, -2.0, 10);
        spec.dispersion_d = crate::units::dispersion_to_si(17.0);
        let betas = spec.betas();
        let ch = |f: f64| crate::system::Channel {
            f_offset: f,
            bandwidth: 96e9,
            power: 1e-3,
        };
        let grid = crate::system::WdmGrid {
            channels: vec![ch(0.0), ch(100e9), ch(8e12)],
            n_spans: 10,
            per_span_power_scale: None,
        };
        let fits = fits_for(&spec, &grid);
        let phi_far = phi_xpm(0.0, 8e12, &betas).unwrap();
        assert!(
            phi_far.abs() * spec.span_length * 96e9 / 2.0 > 100.0,
            "test premise: strongly mismatched pair"
        );
        let cc_far = eta_xpm_coherent_with_phi(
            &fits[0], &fits[2], phi_far, 96e9, 96e9, 1.0, spec.span_length, 10, spec.gamma,
            XpmCoherentPath::E1Exact,
        );
        let (_, xpm1) = eta_spm_xpm_incoherent(0, &grid, &spec, &betas, &fits, 128).unwrap();
        let incoherent_total = 10.0 * xpm1;
        assert!(
            cc_far.abs() < 1e-3 * incoherent_total,
            "coherent/incoherent = {}",
            cc_far.abs() / incoherent_total
        );
    }
}
