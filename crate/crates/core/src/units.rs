//! Physical constants and unit conversions.
//!
//! Everything inside the model is strict SI: frequencies in Hz, powers in
//! W, lengths in m, dispersion in s/m², s/m³, s/m⁴. The conversions below
//! are applied exactly once, at the configuration boundary.

/// Speed of light in vacuum [m/s].
pub const C_LIGHT: f64 = 299_792_458.0;

/// Planck constant [J·s].
pub const H_PLANCK: f64 = 6.626_070_15e-34;

/// dB → linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power ratio → dB.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dBm → W.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * db_to_linear(dbm)
}

/// W → dBm.
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

/// Fibre power attenuation, dB/km → 1/m (field intensity decays as e^{-αz}).
pub fn db_per_km_to_inv_m(db_per_km: f64) -> f64 {
    db_per_km / 10.0 * std::f64::consts::LN_10 / 1e3
}

/// 1/m → dB/km.
pub fn inv_m_to_db_per_km(alpha: f64) -> f64 {
    alpha * 1e3 * 10.0 / std::f64::consts::LN_10
}

/// Dispersion, ps/(nm·km) → s/m².
pub fn dispersion_to_si(d: f64) -> f64 {
    // 1 ps/(nm·km) = 1e-12 s / (1e-9 m · 1e3 m)
    d * 1e-6
}

/// Dispersion slope, ps/(nm²·km) → s/m³.
pub fn dispersion_slope_to_si(s: f64) -> f64 {
    s * 1e3
}

/// Dispersion curvature, ps/(nm³·km) → s/m⁴.
pub fn dispersion_curvature_to_si(sd: f64) -> f64 {
    sd * 1e12
}

/// Nonlinearity coefficient, 1/(W·km) → 1/(W·m).
pub fn gamma_to_si(g: f64) -> f64 {
    g * 1e-3
}

/// Raman gain slope, 1/(W·km·THz) → 1/(W·m·Hz).
pub fn raman_slope_to_si(cr: f64) -> f64 {
    cr * 1e-3 * 1e-12
}

/// Wavelength [m] → absolute frequency [Hz].
pub fn wavelength_to_frequency(lambda: f64) -> f64 {
    C_LIGHT / lambda
}

/// Absolute frequency [Hz] → wavelength [m].
pub fn frequency_to_wavelength(f: f64) -> f64 {
    C_LIGHT / f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db_round_trip() {
        assert!((linear_to_db(db_to_linear(-3.7)) - -3.7).abs() < 1e-12);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        assert!((watts_to_dbm(1e-3)).abs() < 1e-12);
    }

    #[test]
    fn attenuation_conversion() {
        // 0.2 dB/km over 80 km is 16 dB, i.e. a factor 10^-1.6 in power.
        let alpha = db_per_km_to_inv_m(0.2);
        let loss = (-alpha * 80e3).exp();
        assert!((linear_to_db(loss) + 16.0).abs() < 1e-9);
        assert!((inv_m_to_db_per_km(alpha) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn dispersion_conversion_scale() {
        // 17 ps/nm/km = 17e-6 s/m^2
        assert!((dispersion_to_si(17.0) - 17e-6).abs() < 1e-18);
        assert!((dispersion_slope_to_si(0.087) - 87.0).abs() < 1e-9);
        assert!((dispersion_curvature_to_si(-9.714e-5) - -9.714e7).abs() < 1e-3);
    }

    #[test]
    fn wavelength_frequency() {
        let f = wavelength_to_frequency(1302.3e-9);
        assert!((f - 230.202e12).abs() < 0.05e12, "f = {f}");
        assert!((frequency_to_wavelength(f) - 1302.3e-9).abs() < 1e-18);
    }
}
