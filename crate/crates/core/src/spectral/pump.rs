use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::units::{bandwidth_to_omega, wavelength_to_omega};
use crate::{Error, Result};

/// Spectral intensity profile of the pump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpShape {
    Gaussian,
    /// Transform-limited soliton-like pulse: power spectrum ∝ sech².
    Sech,
}

/// Coherent pump pulse.
///
/// `fwhm_bandwidth` is the full width at half maximum of the *power*
/// spectrum, in wavelength units. `amplitude` is the coherent-state amplitude
/// α; the spectral envelope carries |α|² in total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpPulse {
    center_wavelength: f64,
    fwhm_bandwidth: f64,
    shape: PumpShape,
    amplitude: Complex64,
}

impl PumpPulse {
    pub fn new(
        center_wavelength: f64,
        fwhm_bandwidth: f64,
        shape: PumpShape,
        amplitude: Complex64,
    ) -> Result<Self> {
        if !center_wavelength.is_finite() || !(center_wavelength > 0.0) {
            return Err(Error::param("center_wavelength", "must be positive"));
        }
        if !fwhm_bandwidth.is_finite() || !(fwhm_bandwidth > 0.0) {
            return Err(Error::param("fwhm_bandwidth", "must be positive"));
        }
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::NonFinite("pump amplitude"));
        }
        Ok(Self {
            center_wavelength,
            fwhm_bandwidth,
            shape,
            amplitude,
        })
    }

    /// Unit-amplitude gaussian pulse.
    pub fn gaussian(center_wavelength: f64, fwhm_bandwidth: f64) -> Result<Self> {
        Self::new(
            center_wavelength,
            fwhm_bandwidth,
            PumpShape::Gaussian,
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn center_wavelength(&self) -> f64 {
        self.center_wavelength
    }

    pub fn fwhm_bandwidth(&self) -> f64 {
        self.fwhm_bandwidth
    }

    pub fn shape(&self) -> PumpShape {
        self.shape
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn center_omega(&self) -> f64 {
        wavelength_to_omega(self.center_wavelength)
    }

    /// Power FWHM in angular frequency.
    pub fn fwhm_omega(&self) -> f64 {
        bandwidth_to_omega(self.fwhm_bandwidth, self.center_wavelength)
    }

    /// Envelope at detuning `x = ω − ω_p`, normalised so that
    /// ∫|α(ω)|²dω = |amplitude|².
    pub fn envelope_at_detuning(&self, x: f64) -> Complex64 {
        let fwhm = self.fwhm_omega();
        let real = match self.shape {
            PumpShape::Gaussian => {
                // |α|² ∝ exp(−4 ln2 x²/Δω²)
                let norm = libm::pow(4.0 * LN_2 / PI, 0.25) / libm::sqrt(fwhm);
                norm * libm::exp(-2.0 * LN_2 * x * x / (fwhm * fwhm))
            }
            PumpShape::Sech => {
                // |α|² ∝ sech²(x/w), FWHM = 2w·ln(1+√2)
                let w = fwhm / (2.0 * libm::log(1.0 + core::f64::consts::SQRT_2));
                let norm = 1.0 / libm::sqrt(2.0 * w);
                norm / libm::cosh(x / w)
            }
        };
        self.amplitude * real
    }
}

/// Pump spectral envelope α(ω) at absolute angular frequency `omega`.
pub fn pump_envelope(pulse: &PumpPulse, omega: f64) -> Complex64 {
    pulse.envelope_at_detuning(omega - pulse.center_omega())
}
