use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::spectral::{PumpPulse, SpectralGrid};
use crate::units::{bandwidth_to_omega, omega_to_wavelength};
use crate::{Error, Result};

/// Ring resonances must be sampled by at least this many grid points per FWHM.
pub const MIN_POINTS_PER_LINEWIDTH: f64 = 6.0;

const NORMALIZATION_TOL: f64 = 1e-9;
/// Quadrature samples per (narrowest) spectral feature width.
const SAMPLES_PER_WIDTH: f64 = 48.0;
/// Half-width of the pump quadrature window, in pump FWHM.
const QUADRATURE_HALF_WIDTH: f64 = 10.0;
const CAPTURE_THRESHOLD: f64 = 0.99;

/// Discretised joint spectral amplitude Φ(ω_s, ω_i), stored row-major with
/// the signal index as the row.
#[derive(Debug, Clone, PartialEq)]
pub struct BiphotonAmplitude {
    grid: Arc<SpectralGrid>,
    values: Vec<Complex64>,
    normalized: bool,
}

impl BiphotonAmplitude {
    /// Wraps raw samples without normalising them.
    pub fn from_values(grid: Arc<SpectralGrid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "amplitude has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("joint spectral amplitude"));
        }
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    /// Samples `f(j, k)` over the grid indices.
    pub fn from_fn(
        grid: Arc<SpectralGrid>,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Result<Self> {
        let (ns, ni) = grid.shape();
        let mut values = Vec::with_capacity(ns * ni);
        for j in 0..ns {
            for k in 0..ni {
                values.push(f(j, k));
            }
        }
        Self::from_values(grid, values)
    }

    /// Rescales so that Σ|Φ|²·dω_s·dω_i = 1.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroState("amplitude has zero norm".into()));
        }
        let scale = 1.0 / libm::sqrt(n);
        for v in &mut self.values {
            *v *= scale;
        }
        self.normalized = true;
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, signal: usize, idler: usize) -> Complex64 {
        self.values[signal * self.grid.idler().len() + idler]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Discrete ∫|Φ|² dω_s dω_i.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// Checks the stored normalisation flag against the actual norm.
    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !self.normalized || (n - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized(format!("Σ|Φ|²dA = {n}")));
        }
        Ok(())
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    /// ⟨self|other⟩ = Σ conj(Φ₁)Φ₂ dA.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !self.same_grid(other) {
            return Err(Error::InvalidGrid(
                "amplitudes live on different grids".into(),
            ));
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_area())
    }

    /// Samples multiplied by √(dω_s dω_i): the matrix whose singular values
    /// are the Schmidt coefficients.
    pub fn measure_weighted(&self) -> Vec<Complex64> {
        let w = libm::sqrt(self.grid.cell_area());
        self.values.iter().map(|v| v * w).collect()
    }
}

/// Resonance parameters of a ring source.
///
/// The ring is modelled as a unit-peak complex Lorentzian field enhancement
/// l(ω) = 1/(1 − 2i(ω−ω₀)/Γ) at each resonance, whose power FWHM is Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    pub resonance_signal: f64,
    pub resonance_idler: f64,
    pub resonance_pump: f64,
    /// Loaded linewidth as a wavelength FWHM (m).
    pub fwhm_bandwidth: f64,
}

impl RingParams {
    pub fn new(
        resonance_signal: f64,
        resonance_idler: f64,
        resonance_pump: f64,
        fwhm_bandwidth: f64,
    ) -> Result<Self> {
        if !(fwhm_bandwidth > 0.0) || !fwhm_bandwidth.is_finite() {
            return Err(Error::param("ring fwhm_bandwidth", "must be positive"));
        }
        for (name, w) in [
            ("resonance_signal", resonance_signal),
            ("resonance_idler", resonance_idler),
            ("resonance_pump", resonance_pump),
        ] {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::param(name, "must be a positive angular frequency"));
            }
        }
        Ok(Self {
            resonance_signal,
            resonance_idler,
            resonance_pump,
            fwhm_bandwidth,
        })
    }

    /// Ring resonant on the energy-conserving channels `ω_p ± detuning`.
    pub fn on_channels(pump_omega: f64, detuning: f64, fwhm_bandwidth: f64) -> Result<Self> {
        Self::new(
            pump_omega + detuning,
            pump_omega - detuning,
            pump_omega,
            fwhm_bandwidth,
        )
    }

    /// Power FWHM Γ in rad/s (evaluated at the pump resonance).
    pub fn linewidth(&self) -> f64 {
        bandwidth_to_omega(
            self.fwhm_bandwidth,
            omega_to_wavelength(self.resonance_pump),
        )
    }
}

fn lorentzian_field(detuning: f64, linewidth: f64) -> Complex64 {
    Complex64::new(1.0, -2.0 * detuning / linewidth).inv()
}

/// Problems detected while building an amplitude that do not invalidate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridWarning {
    /// The grid's frequency-sum range misses part of the pump pair profile.
    Truncated { captured_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JsaBuild {
    pub amplitude: BiphotonAmplitude,
    pub warning: Option<GridWarning>,
}

/// G(σ) = ∫ α(x) α(σ−x) l(x) l(σ−x) dx at sum detunings σ = ω_s + ω_i − 2ω_p.
///
/// `pump_resonance` is `(ω_res − ω_p, Γ)` for a resonantly enhanced pump and
/// `None` for a bare waveguide. Evaluated with the trapezoid rule on a window
/// centred at σ/2, so the sampling is symmetric under x ↔ σ−x.
pub fn pair_profile(
    pulse: &PumpPulse,
    sigmas: &[f64],
    pump_resonance: Option<(f64, f64)>,
) -> Vec<Complex64> {
    let fwhm = pulse.fwhm_omega();
    let feature = match pump_resonance {
        Some((_, gamma)) => fwhm.min(gamma),
        None => fwhm,
    };
    let h = feature / SAMPLES_PER_WIDTH;
    let half = libm::ceil(QUADRATURE_HALF_WIDTH * fwhm / h) as i64;
    sigmas
        .iter()
        .map(|&sigma| {
            let mid = 0.5 * sigma;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in -half..=half {
                let x = mid + k as f64 * h;
                let y = sigma - x;
                let mut term = pulse.envelope_at_detuning(x) * pulse.envelope_at_detuning(y);
                if let Some((d, gamma)) = pump_resonance {
                    term *= lorentzian_field(x - d, gamma) * lorentzian_field(y - d, gamma);
                }
                let w = if k == -half || k == half { 0.5 } else { 1.0 };
                acc += term * w;
            }
            acc * h
        })
        .collect()
}

fn check_pump_coverage(pulse: &PumpPulse, grid: &SpectralGrid) -> Result<()> {
    let need = 3.0 * pulse.fwhm_omega();
    for (name, axis) in [("signal", grid.signal()), ("idler", grid.idler())] {
        let reach = (-axis.first_offset()).min(axis.last_offset());
        if reach < need * (1.0 - 1e-9) {
            return Err(Error::InvalidGrid(format!(
                "{name} axis reaches ±{reach:.4e} rad/s around its centre, need ±3 pump FWHM ({need:.4e} rad/s)"
            )));
        }
    }
    Ok(())
}

/// Sum detuning of the grid corner (j, k) = (0, 0) and the sum-index layout.
fn sum_detunings(pulse: &PumpPulse, grid: &SpectralGrid) -> Option<Vec<f64>> {
    if !grid.equal_steps() {
        return None;
    }
    let wp = pulse.center_omega();
    let (s, i) = (grid.signal(), grid.idler());
    let base = (s.center() - wp) + (i.center() - wp) + s.first_offset() + i.first_offset();
    let step = s.step();
    Some(
        (0..s.len() + i.len() - 1)
            .map(|t| base + t as f64 * step)
            .collect(),
    )
}

fn fill_by_sum(
    pulse: &PumpPulse,
    grid: &SpectralGrid,
    pump_resonance: Option<(f64, f64)>,
    mut outer: impl FnMut(usize, usize) -> Complex64,
) -> Vec<Complex64> {
    let (ns, ni) = grid.shape();
    let mut values = Vec::with_capacity(ns * ni);
    if let Some(sigmas) = sum_detunings(pulse, grid) {
        // Φ depends on ω_s + ω_i only through the index sum j + k.
        let g = pair_profile(pulse, &sigmas, pump_resonance);
        for j in 0..ns {
            for k in 0..ni {
                values.push(outer(j, k) * g[j + k]);
            }
        }
    } else {
        let wp = pulse.center_omega();
        let ds = grid.signal().detunings_from(wp);
        let di = grid.idler().detunings_from(wp);
        for j in 0..ns {
            let sig: Vec<f64> = di.iter().map(|x| ds[j] + x).collect();
            let g = pair_profile(pulse, &sig, pump_resonance);
            for k in 0..ni {
                values.push(outer(j, k) * g[k]);
            }
        }
    }
    values
}

/// Fraction of ∫|G(σ)|²dσ falling inside the grid's σ range.
fn captured_fraction(pulse: &PumpPulse, grid: &SpectralGrid) -> f64 {
    let wp = pulse.center_omega();
    let (s, i) = (grid.signal(), grid.idler());
    let base = (s.center() - wp) + (i.center() - wp);
    let lo = base + s.first_offset() + i.first_offset();
    let hi = base + s.last_offset() + i.last_offset();
    let fwhm = pulse.fwhm_omega();
    let reach = 16.0 * fwhm + base.abs();
    let n = 4001;
    let h = 2.0 * reach / (n - 1) as f64;
    let sig: Vec<f64> = (0..n).map(|t| -reach + t as f64 * h).collect();
    let g = pair_profile(pulse, &sig, None);
    let (mut total, mut inside) = (0.0, 0.0);
    for (x, v) in sig.iter().zip(&g) {
        let p = v.norm_sqr();
        total += p;
        if *x >= lo && *x <= hi {
            inside += p;
        }
    }
    if total > 0.0 {
        inside / total
    } else {
        0.0
    }
}

/// How strictly grid adequacy is enforced when building amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridPolicy {
    /// Reject grids that do not cover or resolve the spectral features.
    #[default]
    Strict,
    /// Accept any grid. Only for algebraic cross-checks on small grids where
    /// the spectral shape itself is irrelevant.
    Coarse,
}

/// Joint spectral amplitude of a non-resonant waveguide under flat phase
/// matching: Φ(ω_s, ω_i) ∝ ∫ α(ω) α(ω_s+ω_i−ω) dω, normalised on the grid.
pub fn waveguide_jsa(pulse: &PumpPulse, grid: Arc<SpectralGrid>) -> Result<JsaBuild> {
    waveguide_jsa_with(pulse, grid, GridPolicy::Strict)
}

pub fn waveguide_jsa_with(
    pulse: &PumpPulse,
    grid: Arc<SpectralGrid>,
    policy: GridPolicy,
) -> Result<JsaBuild> {
    if policy == GridPolicy::Strict {
        check_pump_coverage(pulse, &grid)?;
    }
    let values = fill_by_sum(pulse, &grid, None, |_, _| Complex64::new(1.0, 0.0));
    let captured = captured_fraction(pulse, &grid);
    let warning = (captured < CAPTURE_THRESHOLD).then_some(GridWarning::Truncated {
        captured_fraction: captured,
    });
    let amplitude = BiphotonAmplitude::from_values(grid, values)?.normalized()?;
    Ok(JsaBuild { amplitude, warning })
}

/// Joint spectral amplitude of a ring source:
/// Φ ∝ l(ω_s) l(ω_i) ∫ α(ω) α(ω_s+ω_i−ω) l(ω) l(ω_s+ω_i−ω) dω.
pub fn ring_jsa(pulse: &PumpPulse, ring: &RingParams, grid: Arc<SpectralGrid>) -> Result<JsaBuild> {
    ring_jsa_with(pulse, ring, grid, GridPolicy::Strict)
}

pub fn ring_jsa_with(
    pulse: &PumpPulse,
    ring: &RingParams,
    grid: Arc<SpectralGrid>,
    policy: GridPolicy,
) -> Result<JsaBuild> {
    let gamma = ring.linewidth();
    let coarsest = grid.step_s().max(grid.step_i());
    let points = gamma / coarsest;
    if policy == GridPolicy::Strict && points < MIN_POINTS_PER_LINEWIDTH {
        return Err(Error::UnderResolved {
            points,
            required: MIN_POINTS_PER_LINEWIDTH,
        });
    }
    let wp = pulse.center_omega();
    let ls: Vec<Complex64> = grid
        .signal()
        .detunings_from(ring.resonance_signal)
        .into_iter()
        .map(|d| lorentzian_field(d, gamma))
        .collect();
    let li: Vec<Complex64> = grid
        .idler()
        .detunings_from(ring.resonance_idler)
        .into_iter()
        .map(|d| lorentzian_field(d, gamma))
        .collect();
    let pump_res = Some((ring.resonance_pump - wp, gamma));
    let values = fill_by_sum(pulse, &grid, pump_res, |j, k| ls[j] * li[k]);
    let amplitude = BiphotonAmplitude::from_values(grid, values)?.normalized()?;
    Ok(JsaBuild {
        amplitude,
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{LN_2, PI};

    fn pulse() -> PumpPulse {
        PumpPulse::gaussian(1550e-9, 260e-12).unwrap()
    }

    fn grid(span: f64, n: usize) -> Arc<SpectralGrid> {
        let p = pulse();
        Arc::new(SpectralGrid::around_pump(&p, 2.0 * PI * 400e9, span, n).unwrap())
    }

    #[test]
    fn pair_profile_matches_gaussian_convolution() {
        // Closed form for a gaussian envelope A·exp(−b x²):
        // ∫ A² exp(−b(x² + (σ−x)²)) dx = A² exp(−bσ²/2) √(π/(2b)).
        let p = pulse();
        let fwhm = p.fwhm_omega();
        let b = 2.0 * LN_2 / (fwhm * fwhm);
        let a = libm::pow(4.0 * LN_2 / PI, 0.25) / libm::sqrt(fwhm);
        let sig: Vec<f64> = (-20..=20).map(|t| t as f64 * 0.3 * fwhm).collect();
        let g = pair_profile(&p, &sig, None);
        let peak = a * a * libm::sqrt(PI / (2.0 * b));
        for (s, v) in sig.iter().zip(&g) {
            let exact = peak * libm::exp(-b * s * s / 2.0);
            assert!(
                (v.re - exact).abs() < 1e-10 * peak,
                "σ={s}: {} vs {exact}",
                v.re
            );
            assert!(v.im.abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn waveguide_is_function_of_sum() {
        let g = grid(4.0, 65);
        let a = waveguide_jsa(&pulse(), g.clone()).unwrap().amplitude;
        for j in 0..64 {
            for k in 1..65 {
                assert_eq!(a.get(j, k), a.get(j + 1, k - 1));
            }
        }
        assert!((a.norm_sqr() - 1.0).abs() < 1e-9);
        a.check_normalized().unwrap();
    }

    #[test]
    fn waveguide_needs_three_fwhm() {
        let err = waveguide_jsa(&pulse(), grid(2.5, 33)).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }

    #[test]
    fn truncation_warning_on_offset_grid() {
        // Shift the idler channel so the sum range misses the pump profile.
        let p = pulse();
        let wp = p.center_omega();
        let d = 2.0 * PI * 400e9;
        let fw = p.fwhm_omega();
        let g = Arc::new(SpectralGrid::square(wp + d, wp - d + 8.0 * fw, 3.0 * fw, 65).unwrap());
        let built = waveguide_jsa(&p, g).unwrap();
        match built.warning {
            Some(GridWarning::Truncated { captured_fraction }) => assert!(captured_fraction < 0.99),
            None => panic!("expected truncation warning"),
        }
        let ok = waveguide_jsa(&p, grid(4.0, 65)).unwrap();
        assert!(ok.warning.is_none());
    }

    #[test]
    fn ring_peak_and_exchange_symmetry() {
        let p = pulse();
        let d = 2.0 * PI * 400e9;
        let g = grid(4.0, 257);
        let ring = RingParams::on_channels(p.center_omega(), d, 60e-12).unwrap();
        let a = ring_jsa(&p, &ring, g.clone()).unwrap().amplitude;
        let (ns, ni) = g.shape();
        let mut best = (0, 0, 0.0);
        for j in 0..ns {
            for k in 0..ni {
                let m = a.get(j, k).norm();
                if m > best.2 {
                    best = (j, k, m);
                }
                let sym = a.get(k, j);
                assert!(
                    (a.get(j, k) - sym).norm() <= 1e-12 * m.max(1e-300) + 1e-300,
                    "({j},{k})"
                );
            }
        }
        assert_eq!((best.0, best.1), (128, 128));
    }

    #[test]
    fn ring_rejects_coarse_grid() {
        let p = pulse();
        let ring = RingParams::on_channels(p.center_omega(), 2.0 * PI * 400e9, 60e-12).unwrap();
        let err = ring_jsa(&p, &ring, grid(6.0, 257)).unwrap_err();
        assert!(matches!(err, Error::UnderResolved { .. }));
    }
}
