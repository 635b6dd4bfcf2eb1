//! Observables of the output state: spectral purity and g²(0), HOM fringes
//! and maps, singlet generation, and the purity sweeps.

mod bell;
mod density;
mod hom;
mod schmidt;
mod sim;
mod sweeps;

pub use bell::{bell_analysis, bell_analysis_with, mixture, BellReport};
pub use density::{heralded_purity, unheralded_g2, SpectralDensity};
pub use hom::{
    fringe_asymmetry, fringe_axis, fringe_map, fringe_row, full_period, hom_fringe,
    hom_fringe_with, rate_evaluator, scan_asymmetry, visibility, FringeMap, FringeOptions,
    FringeScan, RateEvaluator,
};
pub use schmidt::{port_jsa, schmidt, schmidt_matrix, PortJsa, PurityReport};
pub use sim::Simulation;
pub use sweeps::{
    balance_splitter, balanced_theta, birth_brightness, channel_filters, filter_sweep, port_purity,
    purity_sweep, source_port, FilterSweep, PurityProbe, PuritySweep,
};
