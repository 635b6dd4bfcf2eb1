//! Wavelength/frequency conversions. Internally every spectral quantity is
//! an angular frequency in rad/s; lengths are metres.

use core::f64::consts::PI;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// ω = 2πc/λ.
pub fn wavelength_to_omega(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Narrowband conversion of a wavelength width at `wavelength` into an
/// angular-frequency width: Δω = 2πc·Δλ/λ².
pub fn bandwidth_to_omega(bandwidth: f64, wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * bandwidth / (wavelength * wavelength)
}

/// Inverse of [`bandwidth_to_omega`].
pub fn omega_to_bandwidth(width: f64, wavelength: f64) -> f64 {
    width * wavelength * wavelength / (2.0 * PI * SPEED_OF_LIGHT)
}

pub fn ghz_to_omega(ghz: f64) -> f64 {
    2.0 * PI * ghz * 1e9
}
