//! Circuit description, pump propagation and two-photon state assembly.

mod assemble;
mod component;
mod model;
mod mzi;
mod state;

pub use assemble::{assemble_state, assemble_with, component_pairs, JsaLibrary};
pub use component::{
    ComponentKind, ComponentSpec, Coupler, CouplerCoeffs, CustomSource, EffectiveLength, Mzi,
    PairClass, PhaseShift, PumpDump, RingSource, Waveguide, WaveguideRole,
};
pub use model::{propagate_pump, CircuitModel, PumpState};
pub use mzi::{mzi_pair_terms, mzi_transfer, MziPairTerms};
pub use state::{scatter_pairs, PairContribution, TwoPhotonState};
