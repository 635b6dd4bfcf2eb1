#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use sfwm_core::circuit::{
    CircuitModel, ComponentKind, ComponentSpec, Coupler, CouplerCoeffs, Mzi, PhaseShift, PumpDump,
    RingSource, Waveguide,
};
use sfwm_core::spectral::{PumpPulse, RingParams, SpectralGrid};
use sfwm_core::units::wavelength_to_omega;

pub const K_P: f64 = 2.0 * PI * 2.4 / 1550e-9;
pub const DETUNING: f64 = 2.0 * PI * 400e9;

pub fn pulse() -> PumpPulse {
    PumpPulse::gaussian(1550e-9, 260e-12).unwrap()
}

pub fn ring_params(bandwidth: f64) -> RingParams {
    RingParams::on_channels(wavelength_to_omega(1550e-9), DETUNING, bandwidth).unwrap()
}

pub fn grid(n: usize) -> Arc<SpectralGrid> {
    Arc::new(SpectralGrid::around_pump(&pulse(), DETUNING, 4.0, n).unwrap())
}

pub fn stage(id: &str, kind: ComponentKind) -> ComponentSpec {
    ComponentSpec::new(id, kind)
}

pub fn routing(id: &str, rail: usize, length: f64, t2: f64) -> ComponentSpec {
    stage(
        id,
        ComponentKind::Waveguide(Waveguide::routing(rail, length, t2, K_P)),
    )
}

/// Input MZI, spiral on rail 0 and ring on rail 1, φ on rail 1, pump
/// removal, final 50:50 coupler. `noise` scales every routing length.
pub fn two_source_circuit(noise: f64) -> CircuitModel {
    let mut mzi = Mzi::new(
        (0, 1),
        PI / 2.0,
        [600e-6 * noise, 600e-6 * noise],
        CouplerCoeffs::balanced(),
        K_P,
    );
    mzi.arm_t2 = [0.97, 0.97];
    let ring = RingSource::new(1, ring_params(60e-12), 2e-3, 0.9);
    let stages = vec![
        routing("in", 0, 1e-3 * noise, 0.95),
        stage("split", ComponentKind::Mzi(mzi)),
        routing("pre_spiral", 0, 400e-6 * noise, 0.98),
        routing("pre_ring", 1, 400e-6 * noise, 0.98),
        stage(
            "spiral",
            ComponentKind::Waveguide(Waveguide::spiral(0, 8e-3, 0.8, K_P)),
        ),
        stage("ring", ComponentKind::Ring(ring)),
        routing("post_spiral", 0, 300e-6 * noise, 0.98),
        routing("post_ring", 1, 300e-6 * noise, 0.98),
        stage(
            "phi",
            ComponentKind::Phase(PhaseShift {
                rails: vec![1],
                phi: 0.0,
            }),
        ),
        stage(
            "dump",
            ComponentKind::PumpDump(PumpDump { rails: vec![0, 1] }),
        ),
        stage(
            "out",
            ComponentKind::Coupler(Coupler {
                rails: (0, 1),
                coeffs: CouplerCoeffs::balanced(),
            }),
        ),
    ];
    CircuitModel::new(2, 0, stages, Some("ring".into())).unwrap()
}

/// Two identical rings fed by a balanced splitter and interfered.
pub fn two_ring_circuit(second_bandwidth: f64, detuning_shift: f64) -> CircuitModel {
    let wp = wavelength_to_omega(1550e-9);
    let a = ring_params(60e-12);
    let b = RingParams::on_channels(wp, DETUNING + detuning_shift, second_bandwidth).unwrap();
    let stages = vec![
        stage(
            "split",
            ComponentKind::Coupler(Coupler {
                rails: (0, 1),
                coeffs: CouplerCoeffs::balanced(),
            }),
        ),
        stage(
            "ring_a",
            ComponentKind::Ring(RingSource::new(0, a, 2e-3, 1.0)),
        ),
        stage(
            "ring_b",
            ComponentKind::Ring(RingSource::new(1, b, 2e-3, 1.0)),
        ),
        stage(
            "phi",
            ComponentKind::Phase(PhaseShift {
                rails: vec![1],
                phi: 0.0,
            }),
        ),
        stage(
            "dump",
            ComponentKind::PumpDump(PumpDump { rails: vec![0, 1] }),
        ),
        stage(
            "out",
            ComponentKind::Coupler(Coupler {
                rails: (0, 1),
                coeffs: CouplerCoeffs::balanced(),
            }),
        ),
    ];
    CircuitModel::new(2, 0, stages, Some("ring_a".into())).unwrap()
}
