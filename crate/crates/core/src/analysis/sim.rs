use alloc::sync::Arc;

use crate::circuit::{assemble_with, CircuitModel, JsaLibrary, PumpState, TwoPhotonState};
use crate::spectral::{PumpPulse, SpectralGrid};
use crate::Result;

/// A circuit together with its pump and the JSAs of its nonlinear stages.
///
/// Edits that keep the stage list (phases, θ, generation scales) can reuse
/// the library through [`Simulation::with_circuit`].
#[derive(Debug, Clone)]
pub struct Simulation {
    circuit: CircuitModel,
    pulse: PumpPulse,
    lib: JsaLibrary,
}

impl Simulation {
    pub fn new(circuit: CircuitModel, pulse: PumpPulse, grid: Arc<SpectralGrid>) -> Result<Self> {
        let lib = JsaLibrary::build(&circuit, &pulse, grid)?;
        Ok(Self {
            circuit,
            pulse,
            lib,
        })
    }

    /// Same pump and JSAs, different circuit parameters. The stage ids and
    /// kinds must match the original.
    pub fn with_circuit(&self, circuit: CircuitModel) -> Self {
        Self {
            circuit,
            pulse: self.pulse,
            lib: self.lib.clone(),
        }
    }

    pub fn circuit(&self) -> &CircuitModel {
        &self.circuit
    }

    pub fn pulse(&self) -> &PumpPulse {
        &self.pulse
    }

    pub fn library(&self) -> &JsaLibrary {
        &self.lib
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        self.lib.grid()
    }

    pub fn input(&self) -> Result<PumpState> {
        PumpState::single(
            self.circuit.n_rails(),
            self.circuit.pump_input(),
            self.pulse.amplitude(),
        )
    }

    pub fn state(&self) -> Result<TwoPhotonState> {
        assemble_with(&self.circuit, &self.lib, &self.input()?)
    }
}
