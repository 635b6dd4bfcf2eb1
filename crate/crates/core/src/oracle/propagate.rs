use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::tensor::DiscreteTwoPhotonTensor;
use crate::circuit::{CircuitModel, ComponentKind, ComponentSpec, JsaLibrary, Mzi, PumpState};
use crate::spectral::{BiphotonAmplitude, GridPolicy, PumpPulse, SpectralGrid};
use crate::{Error, Result};

/// Square complex matrix, row-major `[out][in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    n: usize,
    data: Vec<Complex64>,
}

impl Dense {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for k in 0..n {
            data[k * n + k] = Complex64::new(1.0, 0.0);
        }
        Self { n, data }
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.n + c] = v;
    }

    /// `self · rhs`.
    pub fn then_after(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                for c in 0..n {
                    data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Self { n, data }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.data[r * self.n + c] * v[c]).sum())
            .collect()
    }
}

/// Directional coupler `[[r, iκ], [iκ, r]]` on two rails of an `n`-rail circuit.
pub fn coupler_matrix(n: usize, rails: (usize, usize), r: f64, kappa: f64) -> Dense {
    let mut m = Dense::identity(n);
    let (a, b) = rails;
    m.set(a, a, Complex64::new(r, 0.0));
    m.set(b, b, Complex64::new(r, 0.0));
    m.set(a, b, Complex64::new(0.0, kappa));
    m.set(b, a, Complex64::new(0.0, kappa));
    m
}

fn diagonal(n: usize, entries: &[(usize, Complex64)]) -> Dense {
    let mut m = Dense::identity(n);
    for &(r, v) in entries {
        m.set(r, r, v);
    }
    m
}

fn mzi_arms(n: usize, z: &Mzi, wavenumber: f64) -> Dense {
    diagonal(
        n,
        &[
            (
                z.rails.0,
                Complex64::from_polar(
                    libm::sqrt(z.arm_t2[0]),
                    wavenumber * z.arm_lengths[0] + z.theta,
                ),
            ),
            (
                z.rails.1,
                Complex64::from_polar(libm::sqrt(z.arm_t2[1]), wavenumber * z.arm_lengths[1]),
            ),
        ],
    )
}

/// Coupler, arms, coupler composed as an explicit matrix product.
pub fn mzi_matrix(n: usize, z: &Mzi, wavenumber: f64) -> Dense {
    let c = coupler_matrix(n, z.rails, z.coupler.r(), z.coupler.kappa());
    c.then_after(&mzi_arms(n, z, wavenumber)).then_after(&c)
}

/// Pairs from one generating stage, carried to the circuit output.
#[derive(Debug, Clone)]
pub struct FockPart {
    pub origin: String,
    /// Pairs that left an MZI on different rails.
    pub born_cross: bool,
    pub jsa: Arc<BiphotonAmplitude>,
    pub tensor: DiscreteTwoPhotonTensor,
}

#[derive(Debug, Clone)]
pub struct FockOutput {
    /// Pump on every rail before each stage, then at the output.
    pub pump_trace: Vec<Vec<Complex64>>,
    pub parts: Vec<FockPart>,
}

impl FockOutput {
    pub fn total(
        &self,
        n_rails: usize,
        grid: Arc<SpectralGrid>,
    ) -> Result<DiscreteTwoPhotonTensor> {
        let mut t = DiscreteTwoPhotonTensor::zeros(n_rails, grid)?;
        for p in &self.parts {
            t.add(&p.tensor)?;
        }
        Ok(t)
    }
}

struct Run<'a> {
    n: usize,
    grid: Arc<SpectralGrid>,
    lib: &'a JsaLibrary,
    pump: Vec<Complex64>,
    parts: Vec<FockPart>,
}

impl Run<'_> {
    fn scatter(&mut self, m: &Dense) -> Result<()> {
        for p in &mut self.parts {
            p.tensor = p.tensor.transform(m.data())?;
        }
        Ok(())
    }

    fn jsa(&self, spec: &ComponentSpec) -> Result<Arc<BiphotonAmplitude>> {
        self.lib
            .jsa_for(spec)
            .ok_or_else(|| Error::InvalidCircuit(alloc::format!("no JSA for `{}`", spec.id)))
    }

    /// Pair born on `rail` with amplitude `weight`.
    fn birth(
        &self,
        rail: usize,
        weight: Complex64,
        jsa: &BiphotonAmplitude,
    ) -> Result<DiscreteTwoPhotonTensor> {
        let mut t = DiscreteTwoPhotonTensor::zeros(self.n, self.grid.clone())?;
        t.add_pair((rail, rail), weight, jsa)?;
        Ok(t)
    }

    fn stage(&mut self, spec: &ComponentSpec) -> Result<()> {
        let n = self.n;
        let scale = spec.generation_scale().unwrap_or(0.0);
        let generates = spec.is_nonlinear() && scale != 0.0;
        match &spec.kind {
            ComponentKind::Waveguide(w) => {
                let phase = Complex64::from_polar(1.0, w.k_p * w.length);
                let m = diagonal(n, &[(w.rail, phase * libm::sqrt(w.t2))]);
                self.scatter(&m)?;
                if generates {
                    let a = self.pump[w.rail] * phase;
                    let jsa = self.jsa(spec)?;
                    let t = self.birth(w.rail, a * a * (w.length * w.t2 * scale), &jsa)?;
                    self.parts.push(FockPart {
                        origin: spec.id.clone(),
                        born_cross: false,
                        jsa,
                        tensor: t,
                    });
                }
                self.pump = m.apply(&self.pump);
            }
            ComponentKind::Ring(r) => {
                self.lumped(spec, r.rail, r.t2, r.effective_length, scale, generates)?
            }
            ComponentKind::Custom(c) => {
                self.lumped(spec, c.rail, c.t2, c.effective_length, scale, generates)?
            }
            ComponentKind::Phase(p) => {
                let v = Complex64::from_polar(1.0, p.phi);
                let entries: Vec<(usize, Complex64)> = p.rails.iter().map(|&r| (r, v)).collect();
                let m = diagonal(n, &entries);
                self.scatter(&m)?;
                self.pump = m.apply(&self.pump);
            }
            ComponentKind::Coupler(c) => {
                let m = coupler_matrix(n, c.rails, c.coeffs.r(), c.coeffs.kappa());
                self.scatter(&m)?;
                self.pump = m.apply(&self.pump);
            }
            ComponentKind::PumpDump(d) => {
                for &r in &d.rails {
                    self.pump[r] = Complex64::new(0.0, 0.0);
                }
            }
            ComponentKind::Mzi(z) => {
                let c = coupler_matrix(n, z.rails, z.coupler.r(), z.coupler.kappa());
                let arms = mzi_arms(n, z, z.k_p);
                self.scatter(&c)?;
                self.pump = c.apply(&self.pump);
                let mut born = None;
                if generates {
                    let jsa = self.jsa(spec)?;
                    let mut t = DiscreteTwoPhotonTensor::zeros(n, self.grid.clone())?;
                    for (arm, rail) in [z.rails.0, z.rails.1].into_iter().enumerate() {
                        let extra = if arm == 0 { z.theta } else { 0.0 };
                        let a = self.pump[rail]
                            * Complex64::from_polar(1.0, z.k_p * z.arm_lengths[arm] + extra);
                        let w = a * a * (z.arm_lengths[arm] * z.arm_t2[arm] * scale);
                        t.add(&self.birth(rail, w, &jsa)?)?;
                    }
                    born = Some((t, jsa));
                }
                self.scatter(&arms)?;
                self.pump = arms.apply(&self.pump);
                self.scatter(&c)?;
                self.pump = c.apply(&self.pump);
                if let Some((t, jsa)) = born {
                    let t = t.transform(c.data())?;
                    let (same, cross) = split_by_rails(&t, z.rails);
                    self.parts.push(FockPart {
                        origin: spec.id.clone(),
                        born_cross: false,
                        jsa: jsa.clone(),
                        tensor: same,
                    });
                    self.parts.push(FockPart {
                        origin: spec.id.clone(),
                        born_cross: true,
                        jsa,
                        tensor: cross,
                    });
                }
            }
        }
        Ok(())
    }

    /// Source with loss lumped at its exit and no propagation phase.
    fn lumped(
        &mut self,
        spec: &ComponentSpec,
        rail: usize,
        t2: f64,
        length: f64,
        scale: f64,
        generates: bool,
    ) -> Result<()> {
        let m = diagonal(self.n, &[(rail, Complex64::new(libm::sqrt(t2), 0.0))]);
        self.scatter(&m)?;
        if generates {
            let a = self.pump[rail];
            let jsa = self.jsa(spec)?;
            let t = self.birth(rail, a * a * (length * t2 * scale), &jsa)?;
            self.parts.push(FockPart {
                origin: spec.id.clone(),
                born_cross: false,
                jsa,
                tensor: t,
            });
        }
        self.pump = m.apply(&self.pump);
        Ok(())
    }
}

/// Splits an MZI's output pairs into those on one rail and those across
/// both of its rails.
fn split_by_rails(
    t: &DiscreteTwoPhotonTensor,
    (a, b): (usize, usize),
) -> (DiscreteTwoPhotonTensor, DiscreteTwoPhotonTensor) {
    let same = t.masked(|s, i| (s, i) == (a, a) || (s, i) == (b, b));
    let cross = t.masked(|s, i| (s, i) == (a, b) || (s, i) == (b, a));
    (same, cross)
}

/// Two-photon output of `circuit` computed by explicit per-stage scattering
/// on the dense (rail ⊗ bin) space. Spectral amplitudes come from `lib`;
/// every transfer matrix and generation amplitude is built here.
pub fn fock_propagate_with(
    circuit: &CircuitModel,
    lib: &JsaLibrary,
    input: &PumpState,
) -> Result<FockOutput> {
    let n = circuit.n_rails();
    if input.amplitudes().len() != n {
        return Err(Error::RailMismatch {
            expected: n,
            found: input.amplitudes().len(),
        });
    }
    let mut run = Run {
        n,
        grid: lib.grid().clone(),
        lib,
        pump: input.amplitudes().to_vec(),
        parts: Vec::new(),
    };
    // Surface size limits even for circuits that generate nothing.
    DiscreteTwoPhotonTensor::zeros(n, run.grid.clone())?;
    let mut pump_trace = Vec::with_capacity(circuit.stages().len() + 1);
    for spec in circuit.stages() {
        pump_trace.push(run.pump.clone());
        run.stage(spec)?;
    }
    pump_trace.push(run.pump.clone());
    Ok(FockOutput {
        pump_trace,
        parts: run.parts,
    })
}

/// [`fock_propagate_with`] for the circuit's own pump input, with amplitudes
/// built without grid adequacy checks so coarse grids can be used.
pub fn fock_propagate(
    circuit: &CircuitModel,
    pulse: &PumpPulse,
    grid: Arc<SpectralGrid>,
) -> Result<(FockOutput, JsaLibrary)> {
    let lib = JsaLibrary::build_with(circuit, pulse, grid, GridPolicy::Coarse)?;
    let input = PumpState::single(circuit.n_rails(), circuit.pump_input(), pulse.amplitude())?;
    Ok((fock_propagate_with(circuit, &lib, &input)?, lib))
}
