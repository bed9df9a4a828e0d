//! Conversions from laboratory units into the internal unit system.

use std::f64::consts::PI;

/// Angular frequency in rad/μs for a cyclic frequency in kHz (2π·f).
pub fn khz_to_rad_per_us(f_khz: f64) -> f64 {
    2.0 * PI * f_khz * 1e-3
}

pub fn hz_to_rad_per_us(f_hz: f64) -> f64 {
    2.0 * PI * f_hz * 1e-6
}

pub fn rad_per_us_to_khz(w: f64) -> f64 {
    w / (2.0 * PI * 1e-3)
}

pub fn rad_per_us_to_hz(w: f64) -> f64 {
    w / (2.0 * PI * 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_mass_frequency() {
        assert!((khz_to_rad_per_us(1.3) - 0.008168).abs() < 1e-6);
    }

    #[test]
    fn round_trip() {
        for f in [0.0, 0.65, 17.5, 76.0] {
            assert!((rad_per_us_to_khz(khz_to_rad_per_us(f)) - f).abs() < 1e-12);
        }
        assert!((rad_per_us_to_hz(hz_to_rad_per_us(73.0)) - 73.0).abs() < 1e-9);
    }
}
