use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::spectral::{BiphotonAmplitude, SpectralAxis};
use crate::{Error, Result};

const ZERO_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterShape {
    /// Flat-top passband, transmission 1 within ±width/2 (edges included).
    Rectangular,
    /// Gaussian power transmission with the given FWHM.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterTarget {
    Signal,
    Idler,
}

/// Power-transmission filter acting on one photon of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFilter {
    center: f64,
    full_width: f64,
    shape: FilterShape,
    target: FilterTarget,
}

impl SpectralFilter {
    /// `full_width` may be `f64::INFINITY` for an all-pass filter.
    pub fn new(
        center: f64,
        full_width: f64,
        shape: FilterShape,
        target: FilterTarget,
    ) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("filter center"));
        }
        if !(full_width > 0.0) {
            return Err(Error::param("filter full_width", "must be positive"));
        }
        Ok(Self {
            center,
            full_width,
            shape,
            target,
        })
    }

    pub fn all_pass(target: FilterTarget) -> Self {
        Self {
            center: 0.0,
            full_width: f64::INFINITY,
            shape: FilterShape::Rectangular,
            target,
        }
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn full_width(&self) -> f64 {
        self.full_width
    }

    pub fn shape(&self) -> FilterShape {
        self.shape
    }

    pub fn target(&self) -> FilterTarget {
        self.target
    }

    pub fn is_all_pass(&self) -> bool {
        self.full_width.is_infinite()
    }

    /// Power transmission at detuning `d` from the filter centre.
    pub fn transmission_at_detuning(&self, d: f64) -> f64 {
        if self.is_all_pass() {
            return 1.0;
        }
        match self.shape {
            FilterShape::Rectangular => {
                if d.abs() <= 0.5 * self.full_width {
                    1.0
                } else {
                    0.0
                }
            }
            FilterShape::Gaussian => {
                libm::exp(-4.0 * LN_2 * d * d / (self.full_width * self.full_width))
            }
        }
    }

    pub fn transmission(&self, omega: f64) -> f64 {
        self.transmission_at_detuning(omega - self.center)
    }

    /// Power transmission sampled on `axis`.
    pub fn sample(&self, axis: &SpectralAxis) -> Vec<f64> {
        if self.is_all_pass() {
            return alloc::vec![1.0; axis.len()];
        }
        axis.detunings_from(self.center)
            .into_iter()
            .map(|d| self.transmission_at_detuning(d))
            .collect()
    }
}

/// Multiplies Φ by √t_s(ω_s)·√t_i(ω_i) given power transmissions sampled on
/// the two axes. Returns the renormalised amplitude and the fraction of pair
/// probability that survived.
pub fn apply_transmission(
    a: &BiphotonAmplitude,
    t_signal: &[f64],
    t_idler: &[f64],
) -> Result<(BiphotonAmplitude, f64)> {
    let (ns, ni) = a.grid().shape();
    if t_signal.len() != ns || t_idler.len() != ni {
        return Err(Error::InvalidGrid(
            "transmission length does not match grid".into(),
        ));
    }
    if t_signal
        .iter()
        .chain(t_idler)
        .any(|t| !(0.0..=1.0).contains(t))
    {
        return Err(Error::param("transmission", "must lie in [0, 1]"));
    }
    let before = a.norm_sqr();
    let rs: Vec<f64> = t_signal.iter().map(|t| libm::sqrt(*t)).collect();
    let ri: Vec<f64> = t_idler.iter().map(|t| libm::sqrt(*t)).collect();
    let src = a.values();
    let filtered =
        BiphotonAmplitude::from_fn(a.grid().clone(), |j, k| src[j * ni + k] * (rs[j] * ri[k]))?;
    let fraction = filtered.norm_sqr() / before;
    if !(fraction >= ZERO_FRACTION) {
        return Err(Error::ZeroState(format!(
            "filter transmits a fraction {fraction:e} of the pairs"
        )));
    }
    Ok((filtered.normalized()?, fraction))
}

/// Filters the signal photon with `signal` and the idler with `idler`.
pub fn apply_filter(
    a: &BiphotonAmplitude,
    signal: &SpectralFilter,
    idler: &SpectralFilter,
) -> Result<(BiphotonAmplitude, f64)> {
    if signal.target != FilterTarget::Signal || idler.target != FilterTarget::Idler {
        return Err(Error::param(
            "filter target",
            "expected (signal, idler) filters",
        ));
    }
    let grid = a.grid();
    apply_transmission(
        a,
        &signal.sample(grid.signal()),
        &idler.sample(grid.idler()),
    )
}
