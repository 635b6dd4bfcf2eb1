//! Frequency-domain primitives: spectral grids, pump envelopes, phase
//! matching, joint spectral amplitudes and spectral filters.

mod filter;
mod grid;
mod jsa;
mod phase;
mod pump;

pub use filter::{apply_filter, apply_transmission, FilterShape, FilterTarget, SpectralFilter};
pub use grid::{SpectralAxis, SpectralGrid};
pub use jsa::{
    pair_profile, ring_jsa, ring_jsa_with, waveguide_jsa, waveguide_jsa_with, BiphotonAmplitude,
    GridPolicy, GridWarning, JsaBuild, RingParams, MIN_POINTS_PER_LINEWIDTH,
};
pub use phase::{phase_matching, sinc};
pub use pump::{pump_envelope, PumpPulse, PumpShape};
