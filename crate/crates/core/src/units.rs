//! Conversions between ordinary frequencies and internal angular rates (rad·µs⁻¹).

use std::f64::consts::TAU;

pub fn ghz(f: f64) -> f64 {
    TAU * 1e3 * f
}

pub fn mhz(f: f64) -> f64 {
    TAU * f
}

pub fn khz(f: f64) -> f64 {
    TAU * 1e-3 * f
}

pub fn hz(f: f64) -> f64 {
    TAU * 1e-6 * f
}

/// Angular rate (rad·µs⁻¹) back to ordinary MHz.
pub fn to_mhz(omega: f64) -> f64 {
    omega / TAU
}

pub fn to_khz(omega: f64) -> f64 {
    omega / TAU * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        assert!((to_mhz(mhz(1.25)) - 1.25).abs() < 1e-15);
        assert!((to_khz(khz(10.0)) - 10.0).abs() < 1e-12);
        assert!((ghz(1e-5) - khz(10.0)).abs() < 1e-15);
        assert!((hz(1e6) - mhz(1.0)).abs() < 1e-15);
    }
}
