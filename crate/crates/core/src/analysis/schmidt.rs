use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::circuit::TwoPhotonState;
use crate::linalg::singular_values;
use crate::spectral::BiphotonAmplitude;
use crate::{Error, Result};

/// Singular values below this fraction of the largest are discarded.
const DISCARD_RATIO: f64 = 1e-12;

/// Spectral purity of one photon of a pair, with its Schmidt spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityReport {
    pub purity: f64,
    /// Non-increasing, Σλ² = 1.
    pub schmidt_coefficients: Vec<f64>,
    pub schmidt_number: f64,
    /// Unheralded g²(0) = 1 + P.
    pub g2: f64,
}

impl PurityReport {
    /// Builds the report from raw singular values of a (possibly
    /// unnormalised) measure-weighted amplitude matrix.
    pub fn from_singular_values(mut s: Vec<f64>) -> Result<Self> {
        s.sort_by(|a, b| b.total_cmp(a));
        let max = s.first().copied().unwrap_or(0.0);
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::ZeroState("no non-zero Schmidt coefficient".into()));
        }
        s.retain(|&v| v >= DISCARD_RATIO * max);
        let total: f64 = s.iter().map(|v| v * v).sum();
        let weights: Vec<f64> = s.iter().map(|v| v * v / total).collect();
        let purity: f64 = weights.iter().map(|p| p * p).sum();
        let lambdas = weights.iter().map(|p| libm::sqrt(*p)).collect();
        Ok(Self {
            purity,
            schmidt_number: 1.0 / purity,
            g2: 1.0 + purity,
            schmidt_coefficients: lambdas,
        })
    }
}

/// Schmidt decomposition of Φ by SVD of Φ·√(dω_s dω_i).
pub fn schmidt(a: &BiphotonAmplitude) -> Result<PurityReport> {
    let (ns, ni) = a.grid().shape();
    PurityReport::from_singular_values(singular_values(ns, ni, &a.measure_weighted())?)
}

/// Purity report for a row-major `rows × cols` measure-weighted matrix whose
/// rows index the photon of interest.
pub fn schmidt_matrix(rows: usize, cols: usize, data: &[Complex64]) -> Result<PurityReport> {
    if data.len() != rows * cols {
        return Err(Error::InvalidGrid(format!(
            "matrix has {} entries, expected {rows}×{cols}",
            data.len()
        )));
    }
    PurityReport::from_singular_values(singular_values(rows, cols, data)?)
}

/// Coherent sum of every contribution on a rail pair.
#[derive(Debug, Clone)]
pub struct PortJsa {
    pub amplitude: BiphotonAmplitude,
    /// √(Σ|Σ wΦ|² dA): the pair amplitude magnitude on this port.
    pub weight: f64,
}

pub fn port_jsa(state: &TwoPhotonState, signal_rail: usize, idler_rail: usize) -> Result<PortJsa> {
    let values = state
        .port_amplitude(signal_rail, idler_rail)
        .ok_or(Error::EmptyPort {
            signal: signal_rail,
            idler: idler_rail,
        })?;
    let raw = BiphotonAmplitude::from_values(state.grid().clone(), values)?;
    let n = raw.norm_sqr();
    let largest = state
        .on_port(signal_rail, idler_rail)
        .map(|c| c.weight.norm_sqr())
        .fold(0.0, f64::max);
    if !(n > 1e-24 * largest) {
        return Err(Error::ZeroState(format!(
            "contributions on rails ({signal_rail}, {idler_rail}) cancel"
        )));
    }
    Ok(PortJsa {
        amplitude: raw.normalized()?,
        weight: libm::sqrt(n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SpectralGrid;
    use alloc::sync::Arc;

    fn grid(n: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::square(1.0e15, 1.1e15, 1e12, n).unwrap())
    }

    #[test]
    fn separable_is_pure() {
        let g = grid(40);
        let a = BiphotonAmplitude::from_fn(g, |j, k| {
            let x = j as f64 / 39.0 - 0.4;
            let y = k as f64 / 39.0 - 0.6;
            Complex64::new(libm::exp(-20.0 * x * x), 0.0)
                * Complex64::from_polar(libm::exp(-9.0 * y * y), 3.0 * y)
        })
        .unwrap()
        .normalized()
        .unwrap();
        let r = schmidt(&a).unwrap();
        assert!((r.purity - 1.0).abs() < 1e-10);
        assert!((r.g2 - 1.0 - r.purity).abs() < 1e-12);
    }

    #[test]
    fn two_equal_modes_give_half() {
        let g = grid(8);
        let a = BiphotonAmplitude::from_fn(g, |j, k| {
            if (j, k) == (1, 2) || (j, k) == (5, 6) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .unwrap()
        .normalized()
        .unwrap();
        let r = schmidt(&a).unwrap();
        assert_eq!(r.purity, 0.5);
        assert_eq!(r.schmidt_number, 2.0);
    }

    #[test]
    fn zero_matrix_is_zero_state() {
        assert!(matches!(
            schmidt_matrix(2, 2, &[Complex64::new(0.0, 0.0); 4]),
            Err(Error::ZeroState(_))
        ));
    }
}
