use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::sim::Simulation;
use crate::circuit::{assemble_with, TwoPhotonState};
use crate::spectral::{BiphotonAmplitude, FilterTarget, SpectralFilter};
use crate::{Error, Result};

/// Pair probabilities per rail pair computed from the filtered Gram matrix
/// of the distinct JSAs, so that each state costs O(terms²).
#[derive(Debug, Clone)]
pub struct RateEvaluator {
    jsas: Vec<Arc<BiphotonAmplitude>>,
    gram: Vec<Complex64>,
}

impl RateEvaluator {
    pub fn new(
        jsas: Vec<Arc<BiphotonAmplitude>>,
        signal: Option<&SpectralFilter>,
        idler: Option<&SpectralFilter>,
    ) -> Result<Self> {
        if let Some(f) = signal {
            if f.target() != FilterTarget::Signal {
                return Err(Error::param("filter target", "expected a signal filter"));
            }
        }
        if let Some(f) = idler {
            if f.target() != FilterTarget::Idler {
                return Err(Error::param("filter target", "expected an idler filter"));
            }
        }
        let n = jsas.len();
        let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
        if let Some(first) = jsas.first() {
            let g = first.grid();
            let (ns, ni) = g.shape();
            let ts = signal
                .map(|f| f.sample(g.signal()))
                .unwrap_or_else(|| vec![1.0; ns]);
            let ti = idler
                .map(|f| f.sample(g.idler()))
                .unwrap_or_else(|| vec![1.0; ni]);
            for a in 0..n {
                for b in a..n {
                    if !jsas[a].same_grid(&jsas[b]) {
                        return Err(Error::InvalidGrid("JSAs on different grids".into()));
                    }
                    let (va, vb) = (jsas[a].values(), jsas[b].values());
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..ns {
                        let mut row = Complex64::new(0.0, 0.0);
                        for k in 0..ni {
                            row += va[j * ni + k].conj() * vb[j * ni + k] * ti[k];
                        }
                        acc += row * ts[j];
                    }
                    acc *= g.cell_area();
                    gram[a * n + b] = acc;
                    gram[b * n + a] = acc.conj();
                }
            }
        }
        Ok(Self { jsas, gram })
    }

    fn index(&self, a: &Arc<BiphotonAmplitude>) -> Result<usize> {
        self.jsas
            .iter()
            .position(|j| Arc::ptr_eq(j, a))
            .ok_or_else(|| {
                Error::InvalidCircuit("contribution JSA unknown to the rate evaluator".into())
            })
    }

    /// Filtered pair probability with the signal on `signal` and idler on `idler`.
    pub fn port_probability(
        &self,
        state: &TwoPhotonState,
        signal: usize,
        idler: usize,
    ) -> Result<f64> {
        let n = self.jsas.len();
        let terms: Vec<(usize, Complex64)> = state
            .on_port(signal, idler)
            .map(|c| Ok((self.index(&c.jsa)?, c.weight)))
            .collect::<Result<_>>()?;
        let mut p = Complex64::new(0.0, 0.0);
        for (a, wa) in &terms {
            for (b, wb) in &terms {
                p += wa.conj() * wb * self.gram[a * n + b];
            }
        }
        Ok(p.re.max(0.0))
    }
}

/// Which output ports count as bunched and anti-bunched, and the detection
/// filters.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeOptions {
    pub ports: (usize, usize),
    /// Port whose same-port coincidences form the bunched curve.
    pub bunched_port: usize,
    pub signal_filter: Option<SpectralFilter>,
    pub idler_filter: Option<SpectralFilter>,
}

impl Default for FringeOptions {
    fn default() -> Self {
        Self {
            ports: (0, 1),
            bunched_port: 0,
            signal_filter: None,
            idler_filter: None,
        }
    }
}

/// Coincidence rates versus the scanned phase, normalised to the
/// phase-averaged total pair rate on the two output ports.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    pub phases: Vec<f64>,
    pub bunched: Vec<f64>,
    pub anti_bunched: Vec<f64>,
    pub total: Vec<f64>,
    pub visibility_bunched: f64,
    pub visibility_anti_bunched: f64,
}

struct RawRates {
    bunched: f64,
    anti: f64,
    total: f64,
}

fn rates(eval: &RateEvaluator, state: &TwoPhotonState, opts: &FringeOptions) -> Result<RawRates> {
    let (a, b) = opts.ports;
    let p = |s, i| eval.port_probability(state, s, i);
    let aa = p(a, a)?;
    let bb = p(b, b)?;
    let anti = p(a, b)? + p(b, a)?;
    let bunched = if opts.bunched_port == a { aa } else { bb };
    Ok(RawRates {
        bunched,
        anti,
        total: aa + bb + anti,
    })
}

fn check_ports(sim: &Simulation, opts: &FringeOptions) -> Result<()> {
    let n = sim.circuit().n_rails();
    let (a, b) = opts.ports;
    if a >= n || b >= n || a == b {
        return Err(Error::InvalidCircuit(format!(
            "output ports ({a}, {b}) invalid for {n} rails"
        )));
    }
    if opts.bunched_port != a && opts.bunched_port != b {
        return Err(Error::InvalidCircuit(
            "bunched port must be one of the output ports".into(),
        ));
    }
    Ok(())
}

/// Rate evaluator over every JSA of the simulation with the option filters.
pub fn rate_evaluator(sim: &Simulation, opts: &FringeOptions) -> Result<RateEvaluator> {
    RateEvaluator::new(
        sim.library().amplitudes(),
        opts.signal_filter.as_ref(),
        opts.idler_filter.as_ref(),
    )
}

/// HOM fringe obtained by scanning the phase shifter `phase_stage`.
pub fn hom_fringe(
    sim: &Simulation,
    phase_stage: &str,
    phases: &[f64],
    opts: &FringeOptions,
) -> Result<FringeScan> {
    let eval = rate_evaluator(sim, opts)?;
    hom_fringe_with(sim, &eval, phase_stage, phases, opts)
}

/// As [`hom_fringe`] with a prepared rate evaluator.
pub fn hom_fringe_with(
    sim: &Simulation,
    eval: &RateEvaluator,
    phase_stage: &str,
    phases: &[f64],
    opts: &FringeOptions,
) -> Result<FringeScan> {
    check_ports(sim, opts)?;
    if phases.is_empty() {
        return Err(Error::param("phases", "need at least one phase value"));
    }
    sim.circuit().with_phase(phase_stage, 0.0)?;
    let input = sim.input()?;
    let mut raw = Vec::with_capacity(phases.len());
    for &phi in phases {
        let c = sim.circuit().with_phase(phase_stage, phi)?;
        let state = assemble_with(&c, sim.library(), &input)?;
        raw.push(rates(eval, &state, opts)?);
    }
    let mean = raw.iter().map(|r| r.total).sum::<f64>() / raw.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::ZeroState("no pairs reach the output ports".into()));
    }
    let bunched: Vec<f64> = raw.iter().map(|r| r.bunched / mean).collect();
    let anti_bunched: Vec<f64> = raw.iter().map(|r| r.anti / mean).collect();
    let total: Vec<f64> = raw.iter().map(|r| r.total / mean).collect();
    Ok(FringeScan {
        phases: phases.to_vec(),
        visibility_bunched: visibility(&bunched)?,
        visibility_anti_bunched: visibility(&anti_bunched)?,
        bunched,
        anti_bunched,
        total,
    })
}

/// (max − min)/(max + min).
pub fn visibility(curve: &[f64]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::param("curve", "empty"));
    }
    let max = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = curve.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max + min > 0.0) {
        return Err(Error::ZeroState("curve is identically zero".into()));
    }
    Ok(((max - min) / (max + min)).clamp(0.0, 1.0))
}

/// `n` phases uniformly covering one period [0, 2π).
pub fn full_period(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

fn check_full_period(phases: &[f64]) -> Result<()> {
    let n = phases.len();
    if n < 5 {
        return Err(Error::param(
            "phases",
            "need at least 5 samples over a period",
        ));
    }
    let step = 2.0 * PI / n as f64;
    for (k, p) in phases.iter().enumerate() {
        if (p - phases[0] - k as f64 * step).abs() > 1e-9 {
            return Err(Error::param(
                "phases",
                "must sample one full 2π period uniformly",
            ));
        }
    }
    Ok(())
}

fn fourier(phases: &[f64], curve: &[f64], n: i64) -> Complex64 {
    let len = phases.len() as f64;
    phases
        .iter()
        .zip(curve)
        .map(|(p, f)| Complex64::from_polar(*f, -(n as f64) * p))
        .sum::<Complex64>()
        / len
}

/// Symmetry axis of a two-source fringe: the phase at which its second
/// harmonic peaks. Pair amplitudes pick up 2φ, so this is the natural
/// mirror line of an ideal fringe.
pub fn fringe_axis(phases: &[f64], curve: &[f64]) -> Result<f64> {
    check_full_period(phases)?;
    let c2 = fourier(phases, curve, 2);
    Ok(-0.5 * c2.arg())
}

/// Σ|f(φ) − f(2φ_c − φ)| / Σ f over a full period, with the reflected curve
/// evaluated by trigonometric interpolation.
pub fn fringe_asymmetry(phases: &[f64], curve: &[f64], axis: f64) -> Result<f64> {
    check_full_period(phases)?;
    let n = phases.len() as i64;
    let top = (n - 1) / 2;
    let coeffs: Vec<(i64, Complex64)> = (-top..=top)
        .map(|m| (m, fourier(phases, curve, m)))
        .collect();
    let mut diff = 0.0;
    let mut sum = 0.0;
    for (p, f) in phases.iter().zip(curve) {
        let q = 2.0 * axis - p;
        let reflected: f64 = coeffs
            .iter()
            .map(|(m, c)| (c * Complex64::from_polar(1.0, *m as f64 * q)).re)
            .sum();
        diff += (f - reflected).abs();
        sum += f.abs();
    }
    if !(sum > 0.0) {
        return Err(Error::ZeroState("curve is identically zero".into()));
    }
    Ok(diff / sum)
}

/// Bunched and anti-bunched asymmetries, both measured about the
/// anti-bunched fringe's axis.
pub fn scan_asymmetry(scan: &FringeScan) -> Result<(f64, f64)> {
    let axis = fringe_axis(&scan.phases, &scan.anti_bunched)?;
    Ok((
        fringe_asymmetry(&scan.phases, &scan.bunched, axis)?,
        fringe_asymmetry(&scan.phases, &scan.anti_bunched, axis)?,
    ))
}

/// Fringes for every splitter setting; rows follow `thetas`.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeMap {
    pub thetas: Vec<f64>,
    pub phases: Vec<f64>,
    pub bunched: Vec<Vec<f64>>,
    pub anti_bunched: Vec<Vec<f64>>,
}

/// One row of a fringe map: the fringe at splitter angle `theta`.
pub fn fringe_row(
    sim: &Simulation,
    eval: &RateEvaluator,
    splitter_stage: &str,
    theta: f64,
    phase_stage: &str,
    phases: &[f64],
    opts: &FringeOptions,
) -> Result<FringeScan> {
    let c = sim.circuit().with_theta(splitter_stage, theta)?;
    hom_fringe_with(&sim.with_circuit(c), eval, phase_stage, phases, opts)
}

pub fn fringe_map(
    sim: &Simulation,
    splitter_stage: &str,
    thetas: &[f64],
    phase_stage: &str,
    phases: &[f64],
    opts: &FringeOptions,
) -> Result<FringeMap> {
    let eval = rate_evaluator(sim, opts)?;
    let mut map = FringeMap {
        thetas: thetas.to_vec(),
        phases: phases.to_vec(),
        bunched: Vec::new(),
        anti_bunched: Vec::new(),
    };
    for &t in thetas {
        let row = fringe_row(sim, &eval, splitter_stage, t, phase_stage, phases, opts)?;
        map.bunched.push(row.bunched);
        map.anti_bunched.push(row.anti_bunched);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_conventions() {
        assert_eq!(visibility(&[2.0, 2.0, 2.0]).unwrap(), 0.0);
        assert_eq!(visibility(&[0.0, 1.0, 0.5]).unwrap(), 1.0);
        let ph: Vec<f64> = (0..101).map(|k| 2.0 * PI * k as f64 / 100.0).collect();
        let c: Vec<f64> = ph.iter().map(|p| 1.0 + libm::cos(*p)).collect();
        assert!((visibility(&c).unwrap() - 1.0).abs() < 1e-12);
        assert!(visibility(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn asymmetry_of_symmetric_and_skewed_curves() {
        let ph = full_period(64);
        let sym: Vec<f64> = ph
            .iter()
            .map(|p| 1.0 + 0.8 * libm::cos(2.0 * p - 0.6))
            .collect();
        let axis = fringe_axis(&ph, &sym).unwrap();
        assert!((axis - 0.3).abs() < 1e-12);
        assert!(fringe_asymmetry(&ph, &sym, axis).unwrap() < 1e-12);
        let skew: Vec<f64> = ph
            .iter()
            .map(|p| 1.0 + 0.8 * libm::cos(2.0 * p - 0.6) + 0.2 * libm::sin(p - 0.3))
            .collect();
        assert!(fringe_asymmetry(&ph, &skew, axis).unwrap() > 0.05);
    }
}
