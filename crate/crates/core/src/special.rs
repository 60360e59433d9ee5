//! Numerics kernel: F(x) = x·atan(x) − ½ln(1+x²), the complex-argument
//! exponential integral E₁, the sine integral Si, closed-form integral
//! identities used by the analytic engine, and small quadrature helpers.
//!
//! E₁ uses the principal branch (cut along the negative real axis); the
//! branch matters because the coherent XPM terms evaluate E₁ at arguments
//! −a ∓ jx with a > 0. A scaled variant e^z·E₁(z) is provided so that
//! products like e^{±a}·Im{E₁(∓a − jx)} can be formed without overflow.

use num_complex::Complex64;

use crate::error::ModelError;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// ---------------------------------------------------------------------------
// F(x)
// ---------------------------------------------------------------------------

/// F(x) = x·atan(x) − ½·ln(1 + x²). Even, nonnegative, monotone increasing
/// for x ≥ 0; F(x) → (π/2)|x| − ln|x| − 1 + o(1) for large |x|.
pub fn big_f(x: f64) -> f64 {
    x * x.atan() - 0.5 * (x * x).ln_1p()
}

// ---------------------------------------------------------------------------
// Exponential integral E1 (complex, principal branch)
// ---------------------------------------------------------------------------

/// E₁(z) on the principal branch. Errors at z = 0.
///
/// Strategy: power series −γ − ln z + Σ (−1)^{k+1} z^k/(k·k!) near the
/// origin and in the left half plane (where the sum is not cancellation
/// limited), a modified-Lentz continued fraction for moderate-to-large |z|
/// away from the cut, and the divergent asymptotic series (optimally
/// truncated) deep in the left wedge around the cut.
pub fn exp_integral_e1(z: Complex64) -> Result<Complex64, ModelError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(ModelError::Domain("E1 is singular at z = 0".into()));
    }
    Ok(match branch(z) {
        E1Branch::Series => e1_series(z),
        E1Branch::ContinuedFraction => (-z).exp() * e1_cf_scaled(z),
        E1Branch::Asymptotic => (-z).exp() * e1_asymptotic_scaled(z),
    })
}

/// Scaled exponential integral e^z·E₁(z); O(1/|z|) for large |z|, so the
/// engine can form e^{±a}·E₁(∓a − jx) products without overflow.
pub fn exp_integral_e1_scaled(z: Complex64) -> Result<Complex64, ModelError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(ModelError::Domain("E1 is singular at z = 0".into()));
    }
    Ok(match branch(z) {
        E1Branch::Series => z.exp() * e1_series(z),
        E1Branch::ContinuedFraction => e1_cf_scaled(z),
        E1Branch::Asymptotic => e1_asymptotic_scaled(z),
    })
}

enum E1Branch {
    Series,
    ContinuedFraction,
    Asymptotic,
}

fn branch(z: Complex64) -> E1Branch {
    let r = z.norm();
    if z.re >= 0.0 {
        if r <= 4.0 {
            E1Branch::Series
        } else {
            E1Branch::ContinuedFraction
        }
    } else if z.im.abs() > z.re.abs() && r > 4.0 {
        // More than 45 degrees away from the cut: the continued fraction
        // still converges quickly.
        E1Branch::ContinuedFraction
    } else if r <= 30.0 {
        // Near the cut the sum is large (~e^|z|), so the series keeps
        // relative accuracy.
        E1Branch::Series
    } else {
        E1Branch::Asymptotic
    }
}

fn e1_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    for k in 1..=200 {
        term *= -z / k as f64;
        let contribution = -term / k as f64;
        sum += contribution;
        if contribution.norm() < 1e-17 * (1.0 + sum.norm()) {
            break;
        }
    }
    -Complex64::new(EULER_GAMMA, 0.0) - z.ln() + sum
}

/// Modified Lentz evaluation of e^z·E₁(z) = 1/(z+1− 1²/(z+3− 2²/(z+5−…))).
fn e1_cf_scaled(z: Complex64) -> Complex64 {
    const TINY: f64 = 1e-290;
    let mut f = z + 1.0;
    if f.norm() < TINY {
        f = Complex64::new(TINY, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..=1000u32 {
        let a = Complex64::new(-((k as f64) * (k as f64)), 0.0);
        let b = z + (2 * k + 1) as f64;
        d = b + a * d;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + a / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-15 {
            break;
        }
    }
    f.inv()
}

/// Optimally truncated asymptotic series e^z·E₁(z) ≈ (1/z)·Σ (−1)^k k!/z^k.
fn e1_asymptotic_scaled(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev_norm = f64::INFINITY;
    for k in 1..=60u32 {
        term *= -(k as f64) / z;
        let n = term.norm();
        if n > prev_norm {
            break; // smallest term reached; stop before divergence
        }
        sum += term;
        prev_norm = n;
        if n < 1e-17 {
            break;
        }
    }
    sum / z
}

// ---------------------------------------------------------------------------
// Sine integral
// ---------------------------------------------------------------------------

/// Si(x) = ∫₀ˣ sin(ξ)/ξ dξ. Odd; Si(x) → π/2 as x → ∞.
pub fn sine_integral(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 16.0 {
        // Σ (−1)^k x^{2k+1} / ((2k+1)·(2k+1)!)
        let x2 = ax * ax;
        let mut u = ax; // x^{2k+1}/(2k+1)!
        let mut sum = ax;
        for k in 1..=40 {
            u *= -x2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            let contribution = u / (2 * k + 1) as f64;
            sum += contribution;
            if contribution.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // Si(x) = π/2 + Im{E1(jx)} for x > 0.
        let e1 = exp_integral_e1(Complex64::new(0.0, ax)).expect("jx != 0");
        std::f64::consts::FRAC_PI_2 + e1.im
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Cheap surrogate Si(x) ≈ atan(x): exact to O(x³) near the origin and
/// sharing the odd symmetry and the saturation to ±π/2, but without the
/// oscillating tail. Kept separate so callers opt in explicitly.
pub fn sine_integral_atan_approx(x: f64) -> f64 {
    x.atan()
}

// ---------------------------------------------------------------------------
// Closed-form integral identities
// ---------------------------------------------------------------------------

/// ∫₀ˣ (ab + c²ξ²) / ((a²+c²ξ²)(b²+c²ξ²)) dξ
///   = [atan(cx/a) + atan(cx/b)] / (c(a+b)).
///
/// Requires c ≠ 0, a ≠ 0, b ≠ 0 and a + b ≠ 0.
pub fn atan_rect_identity(a: f64, b: f64, c: f64, x: f64) -> Result<f64, ModelError> {
    if c == 0.0 || a == 0.0 || b == 0.0 || a + b == 0.0 {
        return Err(ModelError::Degenerate(
            "atan_rect_identity requires c != 0, a != 0, b != 0, a+b != 0".into(),
        ));
    }
    Ok(((c * x / a).atan() + (c * x / b).atan()) / (c * (a + b)))
}

/// ∫_{−x}^{x} atan(a + bξ) dξ = [F(a+bx) − F(a−bx)] / b with
/// F(u) = u·atan(u) − ½ln(1+u²). Requires b ≠ 0.
pub fn atan_strip_integral(a: f64, b: f64, x: f64) -> Result<f64, ModelError> {
    if b == 0.0 {
        return Err(ModelError::Degenerate("atan_strip_integral requires b != 0".into()));
    }
    Ok((big_f(a + b * x) - big_f(a - b * x)) / b)
}

/// ∫₀ˣ cos(ξ) / (a² + ξ²) dξ, evaluated through E₁:
///
/// (1/2a)·[ e^{a}·Im{E₁(a − jx)} − e^{−a}·Im{E₁(−a − jx)}
///          + sign(a)·sign(x)·π·e^{−|a|} ].
///
/// Computed via the scaled E₁ so that the e^{±a} factors never overflow.
/// Requires a ≠ 0.
pub fn cos_lorentzian_integral(a: f64, x: f64) -> Result<f64, ModelError> {
    if a == 0.0 {
        return Err(ModelError::Degenerate("cos_lorentzian_integral requires a != 0".into()));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // e^{a}·E₁(a − jx) = e^{jx}·s(a − jx) and e^{−a}·E₁(−a − jx) =
    // e^{jx}·s(−a − jx) with s(z) = e^z·E₁(z).
    let rot = Complex64::new(0.0, x).exp();
    let s_plus = exp_integral_e1_scaled(Complex64::new(a, -x))?;
    let s_minus = exp_integral_e1_scaled(Complex64::new(-a, -x))?;
    let branch_term = a.signum() * x.signum() * std::f64::consts::PI * (-a.abs()).exp();
    Ok(((rot * (s_plus - s_minus)).im + branch_term) / (2.0 * a))
}

// ---------------------------------------------------------------------------
// Quadrature helpers
// ---------------------------------------------------------------------------

/// Composite Simpson rule with `n` panels (rounded up to even).
pub fn integrate_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n.max(2) } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Gauss–Legendre nodes and weights on (−1, 1), computed by Newton
/// iteration on the Legendre recurrence. Deterministic for fixed `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and derivative by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
