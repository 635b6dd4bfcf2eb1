mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use sfwm_core::circuit::{
    propagate_pump, scatter_pairs, CircuitModel, ComponentKind, ComponentSpec, Coupler,
    CouplerCoeffs, Mzi, PhaseShift, PumpDump, PumpState, Waveguide,
};
use sfwm_core::linalg::RailMatrix;
use sfwm_core::oracle::{random_state, rng};
use sfwm_core::spectral::SpectralGrid;

#[derive(Debug, Clone)]
enum Op {
    Wg(usize, f64, f64),
    Mzi(usize, f64, f64, f64, f64, f64, f64),
    Phase(usize, f64),
    Coupler(usize, f64, f64),
}

fn op(n: usize) -> impl Strategy<Value = Op> {
    prop_oneof![
        (0..n, 0.0..5e-3, 0.2..=1.0).prop_map(|(r, l, t)| Op::Wg(r, l, t)),
        (
            0..n - 1,
            0.0..2.0 * PI,
            0.0..=1.0,
            0.5..=1.0,
            0.0..3e-3,
            0.0..3e-3,
            0.3..=1.0
        )
            .prop_map(|(r, th, b, s, l1, l2, t)| Op::Mzi(r, th, b, s, l1, l2, t)),
        (0..n, 0.0..2.0 * PI).prop_map(|(r, p)| Op::Phase(r, p)),
        (0..n - 1, 0.0..=1.0, 0.5..=1.0).prop_map(|(r, b, s)| Op::Coupler(r, b, s)),
    ]
}

fn build(n: usize, ops: &[Op], lossless: bool) -> CircuitModel {
    let t = |x: f64| if lossless { 1.0 } else { x };
    let stages = ops
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let kind = match *o {
                Op::Wg(r, l, tt) => ComponentKind::Waveguide(Waveguide::routing(r, l, t(tt), K_P)),
                Op::Mzi(r, th, b, s, l1, l2, tt) => {
                    let mut m = Mzi::new(
                        (r, r + 1),
                        th,
                        [l1, l2],
                        CouplerCoeffs::from_split(b, t(s)).unwrap(),
                        K_P,
                    );
                    m.arm_t2 = [t(tt), 1.0];
                    ComponentKind::Mzi(m)
                }
                Op::Phase(r, p) => ComponentKind::Phase(PhaseShift {
                    rails: vec![r],
                    phi: p,
                }),
                Op::Coupler(r, b, s) => ComponentKind::Coupler(Coupler {
                    rails: (r, r + 1),
                    coeffs: CouplerCoeffs::from_split(b, t(s)).unwrap(),
                }),
            };
            ComponentSpec::new(format!("s{i}"), kind)
        })
        .collect();
    CircuitModel::new(n, 0, stages, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pump_power_never_grows(ops in prop::collection::vec(op(3), 0..8), lossless in any::<bool>()) {
        let c = build(3, &ops, lossless);
        let trace = propagate_pump(&c, &PumpState::single(3, 0, Complex64::new(0.8, 0.3)).unwrap()).unwrap();
        for w in trace.windows(2) {
            prop_assert!(w[1].power() <= w[0].power() * (1.0 + 1e-12));
            if lossless {
                prop_assert!((w[1].power() - w[0].power()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pump_trace_is_matrix_chain(ops in prop::collection::vec(op(3), 0..8)) {
        let c = build(3, &ops, false);
        let input = PumpState::single(3, 0, Complex64::new(1.0, 0.0)).unwrap();
        let trace = propagate_pump(&c, &input).unwrap();
        let mut chain = RailMatrix::identity(3);
        for (i, _) in c.stages().iter().enumerate() {
            chain = &c.pump_transfer(i) * &chain;
            let direct = chain.apply(input.amplitudes());
            for (a, b) in direct.iter().zip(trace[i + 1].amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lossless_scattering_conserves_probability(ops in prop::collection::vec(op(3), 1..6), seed in 0u64..1000) {
        let c = build(3, &ops, true);
        let g = Arc::new(SpectralGrid::square(1e15, 1.1e15, 1e11, 6).unwrap());
        let state = random_state(&mut rng(seed), 3, g).unwrap();
        let mut out = state.clone();
        for i in 0..c.stages().len() {
            out = scatter_pairs(&c.photon_transfer(i), &out).unwrap();
        }
        let (a, b) = (state.total_probability(), out.total_probability());
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn generation_stops_after_dump(theta in 0.0..2.0 * PI) {
        let c = two_source_circuit(1.0).with_theta("split", theta).unwrap();
        let trace = propagate_pump(&c, &PumpState::single(2, 0, Complex64::new(1.0, 0.0)).unwrap()).unwrap();
        let (i, _) = c.require("dump").unwrap();
        prop_assert!(trace[i + 1].power() == 0.0);
    }
}

#[test]
fn nothing_is_generated_after_a_dump() {
    let stages = vec![
        ComponentSpec::new("d", ComponentKind::PumpDump(PumpDump { rails: vec![0] })),
        ComponentSpec::new(
            "w",
            ComponentKind::Waveguide(Waveguide::routing(0, 1e-3, 1.0, K_P)),
        ),
    ];
    let c = CircuitModel::new(1, 0, stages, None).unwrap();
    let g = Arc::new(SpectralGrid::around_pump(&pulse(), DETUNING, 4.0, 65).unwrap());
    let (s, _) = sfwm_core::circuit::assemble_state(&c, &pulse(), g).unwrap();
    assert!(s.is_empty());
}
