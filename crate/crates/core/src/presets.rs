//! Bundled demonstration system: an O-band fibre around the 1302.3 nm
//! zero-dispersion wavelength and a uniform 96 GBd / 100 GHz grid builder.
//!
//! The attenuation curve and Raman slope are representative values with a
//! Rayleigh-like wavelength dependence, NOT a measured dataset; treat them
//! as placeholders to be replaced with characterised fibre data when
//! available. Dispersion slope/curvature and the nonlinearity coefficient
//! follow common O-band single-mode-fibre figures.

use crate::system::{AttenuationCurve, Channel, FibreSpec, WdmGrid};
use crate::units::{
    db_per_km_to_inv_m, dbm_to_watts, dispersion_curvature_to_si, dispersion_slope_to_si,
    gamma_to_si, raman_slope_to_si, wavelength_to_frequency, C_LIGHT,
};

/// Reference (zero-dispersion) wavelength [m].
pub const REFERENCE_WAVELENGTH: f64 = 1302.3e-9;

/// Demo Raman gain slope [1/(W·km·THz)] of the triangular approximation.
/// A conservative effective value for a wide O-band window; the linear
/// slope fitted over 16 THz sits well below the peak-based C-band figure.
pub const DEMO_RAMAN_SLOPE_PER_W_KM_THZ: f64 = 0.013;

/// Demo attenuation at λ [dB/km]: Rayleigh term plus a flat floor,
/// 0.2814/λ⁴ + 0.2397 (λ in µm). About 0.34 dB/km at the reference,
/// 0.32–0.36 dB/km across the O-band.
pub fn demo_attenuation_db_per_km(lambda_m: f64) -> f64 {
    let um = lambda_m * 1e6;
    0.2814 / (um * um * um * um) + 0.2397
}

/// Demo attenuation curve sampled over 1250–1360 nm, as (frequency offset
/// from the reference [Hz], loss [1/m]) pairs sorted by offset.
pub fn demo_attenuation_curve() -> AttenuationCurve {
    let f_ref = wavelength_to_frequency(REFERENCE_WAVELENGTH);
    let mut pts: Vec<(f64, f64)> = (0..=22)
        .map(|k| {
            let lambda = (1250.0 + 5.0 * k as f64) * 1e-9;
            let offset = C_LIGHT / lambda - f_ref;
            (offset, db_per_km_to_inv_m(demo_attenuation_db_per_km(lambda)))
        })
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    AttenuationCurve::Sampled(pts)
}

/// Demo O-band fibre: 80 km spans, γ = 2 /W/km, zero dispersion at the
/// reference with S = 0.087 ps/nm²/km and Ṡ = −9.714e-5 ps/nm³/km.
pub fn demo_fibre() -> FibreSpec {
    FibreSpec {
        span_length: 80e3,
        gamma: gamma_to_si(2.0),
        raman_slope: raman_slope_to_si(DEMO_RAMAN_SLOPE_PER_W_KM_THZ),
        attenuation: demo_attenuation_curve(),
        dispersion_d: 0.0,
        dispersion_s: dispersion_slope_to_si(0.087),
        dispersion_s_dot: dispersion_curvature_to_si(-9.714e-5),
        reference_wavelength: REFERENCE_WAVELENGTH,
    }
}

/// Uniform grid centred on the reference: `count` channels, 100 GHz
/// spacing, 96 GBd, flat `power_dbm` per channel.
pub fn demo_grid(count: usize, power_dbm: f64, n_spans: u32) -> WdmGrid {
    uniform_grid(count, 100e9, 96e9, power_dbm, n_spans)
}

/// Uniform grid centred on the reference frequency (odd `count` puts a
/// channel exactly at offset 0).
pub fn uniform_grid(
    count: usize,
    spacing_hz: f64,
    symbol_rate_hz: f64,
    power_dbm: f64,
    n_spans: u32,
) -> WdmGrid {
    let power = dbm_to_watts(power_dbm);
    let channels: Vec<Channel> = (0..count)
        .map(|n| Channel {
            f_offset: (n as f64 - (count as f64 - 1.0) / 2.0) * spacing_hz,
            bandwidth: symbol_rate_hz,
            power,
        })
        .collect();
    WdmGrid::new(channels, n_spans).expect("uniform grid is valid by construction")
}

/// Convenience pair used throughout the tests: demo fibre plus a demo grid.
pub fn demo_system(count: usize, power_dbm: f64, n_spans: u32) -> (FibreSpec, WdmGrid) {
    (demo_fibre(), demo_grid(count, power_dbm, n_spans))
}
