//! Phase mismatch of four-wave-mixing triplets and the multi-span
//! phased-array factor.
//!
//! The mismatch φ(f₁, f₂, f_i) of the interaction producing distortion at
//! f_i from spectral components at f₁, f₂ (and f₁+f₂−f_i) is expanded
//! about the reference frequency and includes β₂, β₃ and β₄. For the
//! analytic four-wave-mixing terms, φ is linearised about a channel-triplet
//! centre: φ(f₁+f_j, f₂+f_k, f_i) ≈ φ₀ + φ₁·f₁ + φ₂·f₂ with Δf_j = f_j−f_i
//! and Δf_k = f_k−f_i. The reduced per-channel factors φ_i (self-phase) and
//! φ_{i,k} (cross-phase) are the corresponding local expansions on the SPM
//! square and XPM strips: φ ≈ φ_i·f₁·f₂ and φ ≈ φ_{i,k}·f₁.

use crate::error::ModelError;
use crate::system::BetaCoefficients;

/// Absolute tolerance [Hz] on the mixing condition f_j + f_k − f_m = f_i.
/// Grid frequencies are constructed, not measured, so this is effectively
/// an exactness check that tolerates rounding.
pub const TRIPLET_TOL_HZ: f64 = 1e-3;

const FOUR_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// Exact phase mismatch [rad/m] at frequency offsets (f₁, f₂) for the
/// channel of interest at offset f_i:
///
/// φ = −4π²(f₁−f_i)(f₂−f_i)·[β₂ + πβ₃(f₁+f₂)
///     + (2π²/3)β₄·((f₁−f_i)² + 3/2(f₁−f_i)(f₂−f_i) + 3(f₁−f_i)f_i
///                  + (f₂−f_i)² + 3(f₂−f_i)f_i + 3f_i²)]
pub fn phi_exact(f1: f64, f2: f64, f_i: f64, betas: &BetaCoefficients) -> f64 {
    let d1 = f1 - f_i;
    let d2 = f2 - f_i;
    let quartic = d1 * d1
        + 1.5 * d1 * d2
        + 3.0 * d1 * f_i
        + d2 * d2
        + 3.0 * d2 * f_i
        + 3.0 * f_i * f_i;
    let bracket = betas.beta2
        + std::f64::consts::PI * betas.beta3 * (f1 + f2)
        + (2.0 * std::f64::consts::PI * std::f64::consts::PI / 3.0) * betas.beta4 * quartic;
    -FOUR_PI_SQ * d1 * d2 * bracket
}

/// First-order 2-D Taylor coefficients of the mismatch about a triplet
/// centre: φ(f₁+f_j, f₂+f_k, f_i) ≈ phi0 + phi1·f₁ + phi2·f₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorPhase {
    /// Constant term [rad/m].
    pub phi0: f64,
    /// Slope along f₁ [rad·s/m].
    pub phi1: f64,
    /// Slope along f₂ [rad·s/m].
    pub phi2: f64,
}

/// Taylor coefficients for the triplet (f_j, f_k, f_m) → f_i. The centre
/// frequencies must satisfy f_j + f_k − f_m = f_i within
/// [`TRIPLET_TOL_HZ`].
pub fn taylor_phase(
    f_j: f64,
    f_k: f64,
    f_m: f64,
    f_i: f64,
    betas: &BetaCoefficients,
) -> Result<TaylorPhase, ModelError> {
    let gap = (f_j + f_k - f_m - f_i).abs();
    if gap > TRIPLET_TOL_HZ {
        return Err(ModelError::TripletMismatch {
            gap_hz: gap,
            tol_hz: TRIPLET_TOL_HZ,
        });
    }
    let dj = f_j - f_i;
    let dk = f_k - f_i;
    let q0 = dj * dj + 1.5 * dj * dk + 3.0 * dj * f_i + dk * dk + 3.0 * dk * f_i + 3.0 * f_i * f_i;
    let q1 = 2.0 * dj + 1.5 * dk + 3.0 * f_i;
    let q2 = 2.0 * dk + 1.5 * dj + 3.0 * f_i;
    let pi = std::f64::consts::PI;
    let b4 = 2.0 * pi * pi / 3.0 * betas.beta4;
    let phi0 = -FOUR_PI_SQ * dj * dk * (betas.beta2 + pi * betas.beta3 * (f_j + f_k) + b4 * q0);
    let phi1 = -FOUR_PI_SQ
        * dk
        * (betas.beta2 + pi * betas.beta3 * (f_j + f_k + dj) + b4 * (q0 + dj * q1));
    let phi2 = -FOUR_PI_SQ
        * dj
        * (betas.beta2 + pi * betas.beta3 * (f_j + f_k + dk) + b4 * (q0 + dk * q2));
    Ok(TaylorPhase { phi0, phi1, phi2 })
}

/// Self-phase mismatch factor φ_i [rad·s²/m]: the coefficient of f₁·f₂ in
/// the expansion of φ about (f_i, f_i), i.e. the mixed partial
/// ∂²φ/∂f₁∂f₂ at the channel centre:
///
/// φ_i = −4π²·(β₂ + 2πβ₃·f_i + 2π²β₄·f_i²)
pub fn phi_spm(f_i: f64, betas: &BetaCoefficients) -> f64 {
    let pi = std::f64::consts::PI;
    -FOUR_PI_SQ * (betas.beta2 + 2.0 * pi * betas.beta3 * f_i + 2.0 * pi * pi * betas.beta4 * f_i * f_i)
}

/// Cross-phase mismatch factor φ_{i,k} [rad·s/m]: the f₁-slope of φ on the
/// XPM strip of interferer k (triplet (f_i, f_k, f_k)); equals the `phi1`
/// Taylor coefficient with Δf_j = 0. Errors when f_k = f_i.
pub fn phi_xpm(f_i: f64, f_k: f64, betas: &BetaCoefficients) -> Result<f64, ModelError> {
    if f_k == f_i {
        return Err(ModelError::Degenerate(
            "phi_xpm requires a distinct interferer (f_k != f_i)".into(),
        ));
    }
    let dk = f_k - f_i;
    let pi = std::f64::consts::PI;
    // Δf_j = 0: Q0 = dk² + 3·dk·f_i + 3f_i², and the Q1 correction drops.
    let q0 = dk * dk + 3.0 * dk * f_i + 3.0 * f_i * f_i;
    Ok(-FOUR_PI_SQ * dk * (betas.beta2 + pi * betas.beta3 * (f_i + f_k) + 2.0 * pi * pi / 3.0 * betas.beta4 * q0))
}

/// Phased-array factor χ = |sin(N_s·φL/2) / sin(φL/2)|² describing the
/// coherent interference of the distortion generated in N_s identical
/// spans. Returns N_s² on the removable singularities φL = 2πk.
pub fn phased_array(phi: f64, span_length: f64, n_spans: u32) -> f64 {
    if n_spans <= 1 {
        return 1.0;
    }
    let half = 0.5 * phi * span_length;
    let denom = half.sin();
    if denom.abs() < 1e-12 {
        return (n_spans as f64) * (n_spans as f64);
    }
    let ratio = (n_spans as f64 * half).sin() / denom;
    ratio * ratio
}

/// Cosine-sum form of the phased-array factor:
/// χ = N_s + 2·Σ_{n=1}^{N_s−1} (N_s−n)·cos(n·φ·L).
/// Equal to [`phased_array`] everywhere; kept as the independent algebraic
/// route for consistency checks and for the coherent-correction sums.
pub fn phased_array_sum(phi: f64, span_length: f64, n_spans: u32) -> f64 {
    let mut sum = n_spans as f64;
    for n in 1..n_spans {
        sum += 2.0 * (n_spans - n) as f64 * (n as f64 * phi * span_length).cos();
    }
    sum
}
