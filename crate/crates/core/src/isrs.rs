//! Signal-power profile evolution under inter-channel stimulated Raman
//! scattering (ISRS) and the per-channel effective-parameter fits.
//!
//! The normalised profile of a channel at frequency offset f along a span,
//! with x(z) = P_tot·C_r·L_eff(z) and L_eff(z) = (1 − e^{−α̃z})/α̃, is
//!
//! ρ(z, f) = B_tot·x·e^{−x·f} / (2·sinh(B_tot·x/2)) · e^{−αz}
//!
//! (triangular Raman gain; power flows towards lower frequencies). The
//! analytic engine works with the first-order form of its square root,
//!
//! √ρ(z, f) ≈ e^{−αz/2}·(1 − P_tot·C_r·f·L_eff(z)/2),
//!
//! whose effective parameters (α_i, α̃_i, C_{r,i}) are fitted per channel
//! against the reference profile so the simple form tracks the full one.
//! A coupled-ODE solver (dP_n/dz = −α_n·P_n + Σ_m C_r·(f_m−f_n)·P_m·P_n)
//! is available as a higher-fidelity reference profile.

use rayon::prelude::*;

use crate::error::ModelError;
use crate::system::{FibreSpec, WdmGrid};

/// Which reference profile the fits (and the numerical model) use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    /// Closed-form profile with physical parameters (fast, default).
    Analytic,
    /// Coupled-power ODE with triangular Raman exchange.
    Ode,
}

// ---------------------------------------------------------------------------
// Closed-form profile
// ---------------------------------------------------------------------------

/// Effective length (1 − e^{−α̃z})/α̃ [m].
pub fn effective_length(z: f64, alpha_tilde: f64) -> f64 {
    if alpha_tilde == 0.0 {
        return z;
    }
    -(-alpha_tilde * z).exp_m1() / alpha_tilde
}

/// Normalised power profile ρ(z, f) of the channel at offset `f_offset`,
/// using physical fibre parameters (α(f), C_r). Strictly positive; equals
/// 1 at z = 0.
pub fn rho_closed(z: f64, f_offset: f64, grid: &WdmGrid, spec: &FibreSpec) -> f64 {
    let alpha = spec.alpha_at(f_offset);
    let x = grid.total_power() * spec.raman_slope * effective_length(z, alpha);
    let u = grid.total_bandwidth() * x / 2.0;
    // B_tot·x / (2·sinh(B_tot·x/2)) = u/sinh(u); removable singularity at 0.
    let depletion = if u.abs() < 1e-6 {
        1.0 - u * u / 6.0
    } else {
        u / u.sinh()
    };
    depletion * (-x * f_offset).exp() * (-alpha * z).exp()
}

// ---------------------------------------------------------------------------
// Per-channel fit
// ---------------------------------------------------------------------------

/// Effective per-channel ISRS parameters and the dimensionless factors
/// derived from them.
///
/// `t_tilde`/`t` belong to the √ρ expansion (√ρ = T·(1 − (T̃/T)e^{−α̃z})·
/// e^{−αz/2}); `t_tilde_prime`/`t_prime` to the expansion of ρ itself,
/// used by the coherent SPM/XPM terms.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFit {
    /// Channel centre frequency offset [Hz].
    pub f_offset: f64,
    /// Effective loss α_i [1/m].
    pub alpha: f64,
    /// Effective auxiliary loss α̃_i [1/m].
    pub alpha_tilde: f64,
    /// Effective Raman slope C_{r,i} [1/(W·m·Hz)].
    pub cr: f64,
    /// T̃_i = −P_tot·C_{r,i}·f_i / (2·α̃_i).
    pub t_tilde: f64,
    /// T_i = 1 + T̃_i.
    pub t: f64,
    /// T̃′_i = −P_tot·C_{r,i}·f_i / α̃_i.
    pub t_tilde_prime: f64,
    /// T′_i = 1 + T̃′_i.
    pub t_prime: f64,
    /// RMS of √ρ residuals over the fit z-grid.
    pub residual_rms: f64,
    /// True when the optimiser failed to reach the acceptance threshold
    /// and physical parameters were substituted.
    pub fallback: bool,
}

impl ChannelFit {
    /// Build a fit record from raw parameters, populating the T factors.
    pub fn from_parameters(
        f_offset: f64,
        alpha: f64,
        alpha_tilde: f64,
        cr: f64,
        p_tot: f64,
        residual_rms: f64,
        fallback: bool,
    ) -> Self {
        let t_tilde = -p_tot * cr * f_offset / (2.0 * alpha_tilde);
        let t_tilde_prime = 2.0 * t_tilde;
        ChannelFit {
            f_offset,
            alpha,
            alpha_tilde,
            cr,
            t_tilde,
            t: 1.0 + t_tilde,
            t_tilde_prime,
            t_prime: 1.0 + t_tilde_prime,
            residual_rms,
            fallback,
        }
    }
}

/// First-order square-root profile e^{−αz/2}·(1 − P_tot·C_r·f·L_eff(z)/2)
/// evaluated from a channel fit. Equal to
/// e^{−αz/2}·(1 + T̃·(1 − e^{−α̃z})).
pub fn sqrt_rho_taylor(z: f64, fit: &ChannelFit) -> f64 {
    (-0.5 * fit.alpha * z).exp() * (1.0 + fit.t_tilde * -(-fit.alpha_tilde * z).exp_m1())
}

/// Options controlling [`fit_channel`].
#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Uniform z samples over [0, span_length].
    pub z_samples: usize,
    /// Residual RMS above which the fit falls back to physical parameters.
    pub fallback_rms: f64,
    /// Reference profile the fit targets.
    pub profile: ProfileMode,
    /// z resolution of the ODE reference [steps per km].
    pub ode_steps_per_km: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            z_samples: 512,
            fallback_rms: 0.05,
            profile: ProfileMode::Analytic,
            ode_steps_per_km: 2.0,
        }
    }
}

/// Fit (α_i, α̃_i, C_{r,i}) for channel `idx` by least squares of the
/// first-order √ρ form against the reference profile on a uniform z-grid.
/// Deterministic for fixed inputs. If the optimiser cannot reach
/// `fallback_rms`, physical parameters are returned with the `fallback`
/// flag set.
pub fn fit_channel(
    idx: usize,
    grid: &WdmGrid,
    spec: &FibreSpec,
    options: &FitOptions,
    ode: Option<&OdeProfiles>,
) -> ChannelFit {
    let f_i = grid.channels[idx].f_offset;
    let p_tot = grid.total_power();
    let alpha0 = spec.alpha_at(f_i);
    let cr0 = spec.raman_slope;
    let n = options.z_samples.max(2);
    let l = spec.span_length;
    let zs: Vec<f64> = (0..n).map(|k| l * k as f64 / (n - 1) as f64).collect();
    let target: Vec<f64> = zs
        .iter()
        .map(|&z| match (options.profile, ode) {
            (ProfileMode::Ode, Some(profiles)) => profiles.rho_at(z, idx).sqrt(),
            _ => rho_closed(z, f_i, grid, spec).sqrt(),
        })
        .collect();

    let residual_rms = |alpha: f64, alpha_tilde: f64, cr: f64| -> f64 {
        let mut acc = 0.0;
        for (k, &z) in zs.iter().enumerate() {
            let model = (-0.5 * alpha * z).exp()
                * (1.0 - 0.5 * p_tot * cr * f_i * effective_length(z, alpha_tilde));
            let r = model - target[k];
            acc += r * r;
        }
        (acc / n as f64).sqrt()
    };

    if cr0 == 0.0 {
        // Pure exponential decay: physical parameters are already exact
        // against the analytic reference.
        let rms = residual_rms(alpha0, alpha0, 0.0);
        return ChannelFit::from_parameters(f_i, alpha0, alpha0, 0.0, p_tot, rms, false);
    }

    let lo = [0.5 * alpha0, 0.5 * alpha0, 0.0];
    let hi = [2.0 * alpha0, 2.0 * alpha0, 4.0 * cr0];
    let (best, best_rms) = nelder_mead(
        |p| residual_rms(p[0], p[1], p[2]),
        [alpha0, alpha0, cr0],
        lo,
        hi,
        600,
    );

    if best_rms > options.fallback_rms {
        let rms = residual_rms(alpha0, alpha0, cr0);
        return ChannelFit::from_parameters(f_i, alpha0, alpha0, cr0, p_tot, rms, true);
    }
    ChannelFit::from_parameters(f_i, best[0], best[1], best[2], p_tot, best_rms, false)
}

/// Fit every channel (independently, in parallel). One ODE solve is shared
/// when the reference profile is [`ProfileMode::Ode`].
pub fn fit_all_channels(
    grid: &WdmGrid,
    spec: &FibreSpec,
    options: &FitOptions,
) -> Result<Vec<ChannelFit>, ModelError> {
    let ode = match options.profile {
        ProfileMode::Ode => Some(solve_power_ode(grid, spec, options.ode_steps_per_km)?),
        ProfileMode::Analytic => None,
    };
    Ok((0..grid.n_channels())
        .into_par_iter()
        .map(|idx| fit_channel(idx, grid, spec, options, ode.as_ref()))
        .collect())
}

// ---------------------------------------------------------------------------
// Coupled-power ODE reference
// ---------------------------------------------------------------------------

/// Per-channel normalised profiles from the coupled-power ODE, sampled on
/// a fixed z-grid.
#[derive(Debug, Clone)]
pub struct OdeProfiles {
    z: Vec<f64>,
    /// rho[channel][z_index] = P_n(z)/P_n(0)
    rho: Vec<Vec<f64>>,
}

impl OdeProfiles {
    /// Linear interpolation of channel `idx`'s profile at distance `z`.
    pub fn rho_at(&self, z: f64, idx: usize) -> f64 {
        let zs = &self.z;
        if z <= zs[0] {
            return self.rho[idx][0];
        }
        let last = zs.len() - 1;
        if z >= zs[last] {
            return self.rho[idx][last];
        }
        let k = zs.partition_point(|&v| v <= z) - 1;
        let w = (z - zs[k]) / (zs[k + 1] - zs[k]);
        self.rho[idx][k] * (1.0 - w) + self.rho[idx][k + 1] * w
    }

    /// Sampled z positions [m].
    pub fn z_grid(&self) -> &[f64] {
        &self.z
    }
}

/// Solve dP_n/dz = −α(f_n)·P_n + Σ_m C_r·(f_m−f_n)·P_m·P_n with a fixed-
/// step 4th-order Runge–Kutta scheme at `steps_per_km` (minimum 2). The
/// triangular exchange term is antisymmetric, so Σ_n P_n is conserved
/// apart from the loss term. Errors if any power becomes non-positive.
pub fn solve_power_ode(
    grid: &WdmGrid,
    spec: &FibreSpec,
    steps_per_km: f64,
) -> Result<OdeProfiles, ModelError> {
    let n_ch = grid.n_channels();
    let l = spec.span_length;
    let steps = ((steps_per_km.max(2.0) * l / 1e3).ceil() as usize).max(1);
    let h = l / steps as f64;
    let alphas: Vec<f64> = grid.channels.iter().map(|c| spec.alpha_at(c.f_offset)).collect();
    let freqs: Vec<f64> = grid.channels.iter().map(|c| c.f_offset).collect();
    let p0: Vec<f64> = grid.channels.iter().map(|c| c.power).collect();
    let cr = spec.raman_slope;

    let derivative = |p: &[f64], out: &mut [f64]| {
        // Σ_m C_r (f_m − f_n) P_m = C_r (M1 − f_n·M0)
        let m0: f64 = p.iter().sum();
        let m1: f64 = p.iter().zip(&freqs).map(|(pm, fm)| pm * fm).sum();
        for n in 0..p.len() {
            out[n] = (-alphas[n] + cr * (m1 - freqs[n] * m0)) * p[n];
        }
    };

    let mut p = p0.clone();
    let mut z = Vec::with_capacity(steps + 1);
    let mut rho = vec![Vec::with_capacity(steps + 1); n_ch];
    let record = |p: &[f64], rho: &mut Vec<Vec<f64>>| {
        for n in 0..n_ch {
            rho[n].push(p[n] / p0[n]);
        }
    };
    z.push(0.0);
    record(&p, &mut rho);

    let mut k1 = vec![0.0; n_ch];
    let mut k2 = vec![0.0; n_ch];
    let mut k3 = vec![0.0; n_ch];
    let mut k4 = vec![0.0; n_ch];
    let mut tmp = vec![0.0; n_ch];
    for step in 0..steps {
        derivative(&p, &mut k1);
        for n in 0..n_ch {
            tmp[n] = p[n] + 0.5 * h * k1[n];
        }
        derivative(&tmp, &mut k2);
        for n in 0..n_ch {
            tmp[n] = p[n] + 0.5 * h * k2[n];
        }
        derivative(&tmp, &mut k3);
        for n in 0..n_ch {
            tmp[n] = p[n] + h * k3[n];
        }
        derivative(&tmp, &mut k4);
        for n in 0..n_ch {
            p[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
        }
        let z_now = (step + 1) as f64 * h;
        for (n, &pn) in p.iter().enumerate() {
            if !(pn > 0.0) {
                return Err(ModelError::OdeInstability {
                    channel: n,
                    z_m: z_now,
                });
            }
        }
        z.push(z_now);
        record(&p, &mut rho);
    }
    Ok(OdeProfiles { z, rho })
}

// ---------------------------------------------------------------------------
// Bounded Nelder–Mead
// ---------------------------------------------------------------------------

/// Deterministic bounded Nelder–Mead over 3 parameters (projection onto
/// the box at every evaluation).
fn nelder_mead<F: Fn(&[f64; 3]) -> f64>(
    f: F,
    x0: [f64; 3],
    lo: [f64; 3],
    hi: [f64; 3],
    max_iters: usize,
) -> ([f64; 3], f64) {
    let clamp = |x: &[f64; 3]| -> [f64; 3] {
        let mut y = *x;
        for d in 0..3 {
            y[d] = y[d].clamp(lo[d], hi[d]);
        }
        y
    };
    let eval = |x: &[f64; 3]| f(&clamp(x));

    // Initial simplex: x0 plus one vertex per axis at 10% of the box span.
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    let x0 = clamp(&x0);
    simplex.push((x0, eval(&x0)));
    for d in 0..3 {
        let mut v = x0;
        let span = hi[d] - lo[d];
        let step = if span > 0.0 { 0.1 * span } else { 0.1 * x0[d].abs().max(1e-12) };
        v[d] = if v[d] + step <= hi[d] { v[d] + step } else { v[d] - step };
        let v = clamp(&v);
        simplex.push((v, eval(&v)));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].1;
        let worst = simplex[3].1;
        if (worst - best).abs() <= 1e-15 * (1.0 + best.abs()) {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = [0.0; 3];
        for v in &simplex[0..3] {
            for d in 0..3 {
                centroid[d] += v.0[d] / 3.0;
            }
        }
        let worst_x = simplex[3].0;
        let dir = |t: f64| -> [f64; 3] {
            let mut y = [0.0; 3];
            for d in 0..3 {
                y[d] = centroid[d] + t * (centroid[d] - worst_x[d]);
            }
            clamp(&y)
        };
        let reflect = dir(1.0);
        let f_reflect = eval(&reflect);
        if f_reflect < simplex[0].1 {
            let expand = dir(2.0);
            let f_expand = eval(&expand);
            simplex[3] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[2].1 {
            simplex[3] = (reflect, f_reflect);
        } else {
            let contract = if f_reflect < simplex[3].1 { dir(0.5) } else { dir(-0.5) };
            let f_contract = eval(&contract);
            if f_contract < simplex[3].1.min(f_reflect) {
                simplex[3] = (contract, f_contract);
            } else {
                // Shrink towards the best vertex.
                let best_x = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    for d in 0..3 {
                        v.0[d] = best_x[d] + 0.5 * (v.0[d] - best_x[d]);
                    }
                    v.0 = clamp(&v.0);
                    v.1 = eval(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    (simplex[0].0, simplex[0].1)
}
