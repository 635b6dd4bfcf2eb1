use alloc::format;
use alloc::vec::Vec;

use crate::spectral::PumpPulse;
use crate::{Error, Result};

const UNIFORMITY_TOL: f64 = 1e-12;

/// A uniformly sampled frequency axis stored as offsets from a band centre.
///
/// Absolute optical angular frequencies are ~1e15 rad/s while grid steps are
/// ~1e9 rad/s, so the samples are kept relative to `center` to keep the
/// spacing exact to double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAxis {
    center: f64,
    offsets: Vec<f64>,
    step: f64,
}

impl SpectralAxis {
    /// `n` points spanning `center ± half_span`.
    pub fn uniform(center: f64, half_span: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis needs at least 2 points, got {n}"
            )));
        }
        if !(half_span > 0.0) || !half_span.is_finite() || !center.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "axis half span must be positive and finite, got {half_span}"
            )));
        }
        let step = 2.0 * half_span / (n - 1) as f64;
        let mid = (n - 1) as f64 / 2.0;
        let offsets = (0..n).map(|k| (k as f64 - mid) * step).collect();
        Ok(Self {
            center,
            offsets,
            step,
        })
    }

    pub fn from_offsets(center: f64, offsets: Vec<f64>) -> Result<Self> {
        let n = offsets.len();
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "axis needs at least 2 points, got {n}"
            )));
        }
        if !center.is_finite() || offsets.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("spectral axis"));
        }
        let step = (offsets[n - 1] - offsets[0]) / (n - 1) as f64;
        if !(step > 0.0) {
            return Err(Error::InvalidGrid(
                "axis must be strictly increasing".into(),
            ));
        }
        for w in offsets.windows(2) {
            let d = w[1] - w[0];
            if !(d > 0.0) {
                return Err(Error::InvalidGrid(
                    "axis must be strictly increasing".into(),
                ));
            }
            if ((d - step) / step).abs() >= UNIFORMITY_TOL {
                return Err(Error::InvalidGrid(format!(
                    "axis spacing not uniform (step {d} vs mean {step})"
                )));
            }
        }
        Ok(Self {
            center,
            offsets,
            step,
        })
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Absolute angular frequency of sample `k`.
    pub fn omega(&self, k: usize) -> f64 {
        self.center + self.offsets[k]
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.omega(k)).collect()
    }

    pub fn first_offset(&self) -> f64 {
        self.offsets[0]
    }

    pub fn last_offset(&self) -> f64 {
        self.offsets[self.len() - 1]
    }

    /// Offsets of this axis measured from `reference` instead of the axis centre.
    pub fn detunings_from(&self, reference: f64) -> Vec<f64> {
        let shift = self.center - reference;
        self.offsets.iter().map(|o| shift + o).collect()
    }
}

/// Two-dimensional (signal × idler) frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    signal: SpectralAxis,
    idler: SpectralAxis,
}

impl SpectralGrid {
    pub fn new(signal: SpectralAxis, idler: SpectralAxis) -> Self {
        Self { signal, idler }
    }

    /// Square `n × n` grid with the same half span on both axes.
    pub fn square(center_signal: f64, center_idler: f64, half_span: f64, n: usize) -> Result<Self> {
        Ok(Self {
            signal: SpectralAxis::uniform(center_signal, half_span, n)?,
            idler: SpectralAxis::uniform(center_idler, half_span, n)?,
        })
    }

    /// Grid centred on the energy-conserving channel pair `ω_p ± detuning`,
    /// spanning `± span_fwhm` pump power-FWHM on each axis.
    pub fn around_pump(pulse: &PumpPulse, detuning: f64, span_fwhm: f64, n: usize) -> Result<Self> {
        let wp = pulse.center_omega();
        Self::square(
            wp + detuning,
            wp - detuning,
            span_fwhm * pulse.fwhm_omega(),
            n,
        )
    }

    pub fn signal(&self) -> &SpectralAxis {
        &self.signal
    }

    pub fn idler(&self) -> &SpectralAxis {
        &self.idler
    }

    pub fn step_s(&self) -> f64 {
        self.signal.step
    }

    pub fn step_i(&self) -> f64 {
        self.idler.step
    }

    /// Area element dω_s·dω_i.
    pub fn cell_area(&self) -> f64 {
        self.signal.step * self.idler.step
    }

    /// Number of samples (signal × idler).
    pub fn len(&self) -> usize {
        self.signal.len() * self.idler.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.signal.len(), self.idler.len())
    }

    pub(crate) fn equal_steps(&self) -> bool {
        ((self.signal.step - self.idler.step) / self.signal.step).abs() <= UNIFORMITY_TOL
    }
}
