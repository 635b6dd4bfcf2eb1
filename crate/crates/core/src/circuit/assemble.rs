use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::component::{ComponentKind, ComponentSpec, RingSource};
use super::model::{propagate_pump, CircuitModel, PumpState};
use super::mzi::mzi_pair_terms;
use super::state::{scatter_pairs, PairContribution, TwoPhotonState};
use crate::spectral::{
    ring_jsa_with, waveguide_jsa_with, BiphotonAmplitude, GridPolicy, GridWarning, PumpPulse,
    SpectralGrid,
};
use crate::{Error, Result};

/// Normalised JSAs for every generating stage of a circuit, computed once
/// per pump and grid and shared between contributions.
#[derive(Debug, Clone)]
pub struct JsaLibrary {
    grid: Arc<SpectralGrid>,
    waveguide: Option<Arc<BiphotonAmplitude>>,
    per_stage: Vec<(String, Arc<BiphotonAmplitude>)>,
    warnings: Vec<(String, GridWarning)>,
}

impl JsaLibrary {
    pub fn build(
        circuit: &CircuitModel,
        pulse: &PumpPulse,
        grid: Arc<SpectralGrid>,
    ) -> Result<Self> {
        Self::build_with(circuit, pulse, grid, GridPolicy::Strict)
    }

    pub fn build_with(
        circuit: &CircuitModel,
        pulse: &PumpPulse,
        grid: Arc<SpectralGrid>,
        policy: GridPolicy,
    ) -> Result<Self> {
        let mut lib = Self {
            grid: grid.clone(),
            waveguide: None,
            per_stage: Vec::new(),
            warnings: Vec::new(),
        };
        let mut rings: Vec<(&RingSource, Arc<BiphotonAmplitude>)> = Vec::new();
        for s in circuit.stages() {
            match &s.kind {
                ComponentKind::Waveguide(_) | ComponentKind::Mzi(_) if lib.waveguide.is_none() => {
                    let b = waveguide_jsa_with(pulse, grid.clone(), policy)?;
                    if let Some(w) = b.warning {
                        lib.warnings.push((String::from("waveguide"), w));
                    }
                    lib.waveguide = Some(Arc::new(b.amplitude));
                }
                ComponentKind::Ring(r) => {
                    let shared = rings
                        .iter()
                        .find(|(o, _)| o.ring == r.ring)
                        .map(|(_, a)| a.clone());
                    let a = match shared {
                        Some(a) => a,
                        None => {
                            let b = ring_jsa_with(pulse, &r.ring, grid.clone(), policy)?;
                            if let Some(w) = b.warning {
                                lib.warnings.push((s.id.clone(), w));
                            }
                            let a = Arc::new(b.amplitude);
                            rings.push((r, a.clone()));
                            a
                        }
                    };
                    lib.per_stage.push((s.id.clone(), a));
                }
                ComponentKind::Custom(c) => {
                    if !Arc::ptr_eq(c.jsa.grid(), &grid) && **c.jsa.grid() != *grid {
                        return Err(Error::InvalidGrid(format!(
                            "source `{}` JSA is on a different grid",
                            s.id
                        )));
                    }
                    lib.per_stage.push((s.id.clone(), c.jsa.clone()));
                }
                _ => {}
            }
        }
        Ok(lib)
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn warnings(&self) -> &[(String, GridWarning)] {
        &self.warnings
    }

    pub fn waveguide(&self) -> Option<&Arc<BiphotonAmplitude>> {
        self.waveguide.as_ref()
    }

    /// Every distinct amplitude held by the library.
    pub fn amplitudes(&self) -> Vec<Arc<BiphotonAmplitude>> {
        let mut out: Vec<Arc<BiphotonAmplitude>> = Vec::new();
        for a in self
            .waveguide
            .iter()
            .chain(self.per_stage.iter().map(|(_, a)| a))
        {
            if !out.iter().any(|o| Arc::ptr_eq(o, a)) {
                out.push(a.clone());
            }
        }
        out
    }

    /// JSA generated by `spec`, if it is a nonlinear stage known to the library.
    pub fn jsa_for(&self, spec: &ComponentSpec) -> Option<Arc<BiphotonAmplitude>> {
        match &spec.kind {
            ComponentKind::Waveguide(_) | ComponentKind::Mzi(_) => self.waveguide.clone(),
            ComponentKind::Ring(_) | ComponentKind::Custom(_) => self
                .per_stage
                .iter()
                .find(|(id, _)| *id == spec.id)
                .map(|(_, a)| a.clone()),
            _ => None,
        }
    }
}

/// Pairs created inside one stage by the local pump, at the stage output.
pub fn component_pairs(
    spec: &ComponentSpec,
    pump: &PumpState,
    lib: &JsaLibrary,
) -> Result<Vec<PairContribution>> {
    let zero = Complex64::new(0.0, 0.0);
    let p = pump.amplitudes();
    let mut out = Vec::new();
    if !spec.is_nonlinear() || spec.generation_scale() == Some(0.0) {
        return Ok(out);
    }
    let jsa = lib
        .jsa_for(spec)
        .ok_or_else(|| Error::InvalidCircuit(format!("no JSA prepared for stage `{}`", spec.id)))?;
    let mut emit = |rails: (usize, usize), weight: Complex64, born_cross: bool| {
        if weight != zero {
            out.push(PairContribution {
                rails,
                weight,
                jsa: jsa.clone(),
                origin: spec.id.clone(),
                class: spec.pair_class(),
                born_cross,
            });
        }
    };
    match &spec.kind {
        ComponentKind::Waveguide(w) => {
            let b = p[w.rail] * Complex64::from_polar(1.0, w.k_p * w.length);
            emit(
                (w.rail, w.rail),
                b * b * w.effective_length().value() * w.generation_scale,
                false,
            );
        }
        ComponentKind::Ring(r) => {
            let a = p[r.rail];
            emit(
                (r.rail, r.rail),
                a * a * r.lprime().value() * r.generation_scale,
                false,
            );
        }
        ComponentKind::Custom(c) => {
            let a = p[c.rail];
            emit(
                (c.rail, c.rail),
                a * a * (c.effective_length * c.t2) * c.generation_scale,
                false,
            );
        }
        ComponentKind::Mzi(m) => {
            let t = mzi_pair_terms(m, [p[m.rails.0], p[m.rails.1]]);
            let (a, b) = m.rails;
            emit((a, a), t.bunched_upper, false);
            emit((b, b), t.bunched_lower, false);
            emit((a, b), t.cross, true);
            emit((b, a), t.cross, true);
        }
        _ => {}
    }
    Ok(out)
}

/// Builds the output two-photon state with an explicit pump input.
pub fn assemble_with(
    circuit: &CircuitModel,
    lib: &JsaLibrary,
    input: &PumpState,
) -> Result<TwoPhotonState> {
    let trace = propagate_pump(circuit, input)?;
    let mut state = TwoPhotonState::empty(circuit.n_rails(), lib.grid().clone());
    for (i, spec) in circuit.stages().iter().enumerate() {
        if !state.is_empty() {
            state = scatter_pairs(&circuit.photon_transfer(i), &state)?;
        }
        for c in component_pairs(spec, &trace[i], lib)? {
            state.push(c)?;
        }
    }
    Ok(state)
}

/// Builds the output two-photon state for the pump `pulse` launched into the
/// circuit's pump input rail.
pub fn assemble_state(
    circuit: &CircuitModel,
    pulse: &PumpPulse,
    grid: Arc<SpectralGrid>,
) -> Result<(TwoPhotonState, JsaLibrary)> {
    let lib = JsaLibrary::build(circuit, pulse, grid)?;
    let input = PumpState::single(circuit.n_rails(), circuit.pump_input(), pulse.amplitude())?;
    let state = assemble_with(circuit, &lib, &input)?;
    Ok((state, lib))
}
