mod common;

use std::sync::Arc;

use common::*;
use num_complex::Complex64;
use sfwm_core::analysis::{
    bell_analysis, filter_sweep, full_period, hom_fringe, port_purity, purity_sweep, schmidt,
    FringeOptions, PurityProbe, Simulation, SpectralDensity,
};
use sfwm_core::circuit::{
    CircuitModel, ComponentKind, Coupler, CouplerCoeffs, CustomSource, PhaseShift, PumpDump,
};
use sfwm_core::spectral::{BiphotonAmplitude, FilterTarget, SpectralFilter, SpectralGrid};

fn custom(rail: usize, jsa: Arc<BiphotonAmplitude>) -> ComponentKind {
    ComponentKind::Custom(CustomSource {
        rail,
        jsa,
        effective_length: 1e-3,
        t2: 1.0,
        generation_scale: 1.0,
    })
}

fn interferometer(a: Arc<BiphotonAmplitude>, b: Arc<BiphotonAmplitude>) -> CircuitModel {
    let bs = || {
        ComponentKind::Coupler(Coupler {
            rails: (0, 1),
            coeffs: CouplerCoeffs::balanced(),
        })
    };
    CircuitModel::new(
        2,
        0,
        vec![
            stage("split", bs()),
            stage("a", custom(0, a)),
            stage("b", custom(1, b)),
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
            stage("out", bs()),
        ],
        Some("a".into()),
    )
    .unwrap()
}

fn gaussian_product(g: &Arc<SpectralGrid>, cs: f64, ci: f64) -> Arc<BiphotonAmplitude> {
    let amp = BiphotonAmplitude::from_fn(g.clone(), |j, k| {
        let (x, y) = (j as f64 - cs, k as f64 - ci);
        Complex64::from_polar((-(x * x) / 18.0 - (y * y) / 8.0).exp(), 0.1 * x)
    });
    Arc::new(amp.unwrap().normalized().unwrap())
}

#[test]
fn identical_pure_sources_interfere_perfectly() {
    let g = grid(48);
    let j = gaussian_product(&g, 20.0, 26.0);
    assert!((schmidt(&j).unwrap().purity - 1.0).abs() < 1e-10);
    let sim = Simulation::new(interferometer(j.clone(), j), pulse(), g).unwrap();
    let scan = hom_fringe(&sim, "phi", &full_period(32), &FringeOptions::default()).unwrap();
    assert!((scan.visibility_anti_bunched - 1.0).abs() < 1e-9);
    assert!((scan.visibility_bunched - 1.0).abs() < 1e-9);
}

#[test]
fn orthogonal_sources_do_not_interfere() {
    let g = grid(48);
    let a = BiphotonAmplitude::from_fn(g.clone(), |j, k| {
        Complex64::new(
            if j < 24 && k < 24 {
                1.0 + (j * k) as f64
            } else {
                0.0
            },
            0.0,
        )
    });
    let b = BiphotonAmplitude::from_fn(g.clone(), |j, k| {
        Complex64::new(
            if j >= 24 && k >= 24 {
                1.0 + (j + k) as f64
            } else {
                0.0
            },
            0.0,
        )
    });
    let (a, b) = (
        Arc::new(a.unwrap().normalized().unwrap()),
        Arc::new(b.unwrap().normalized().unwrap()),
    );
    let sim = Simulation::new(interferometer(a, b), pulse(), g).unwrap();
    let scan = hom_fringe(&sim, "phi", &full_period(32), &FringeOptions::default()).unwrap();
    assert!(scan.visibility_anti_bunched < 1e-9);
    assert!(scan.visibility_bunched < 1e-9);
}

#[test]
fn spurious_pairs_degrade_the_ring_port() {
    let sim = Simulation::new(two_source_circuit(1.0), pulse(), grid(257)).unwrap();
    let tight = SpectralFilter::all_pass(FilterTarget::Signal);
    let probe = PurityProbe::unheralded("ring", tight);
    let noisy = port_purity(&sim, sim.circuit(), &probe).unwrap();
    let alone = port_purity(
        &sim,
        &sim.circuit().isolate_generation("ring").unwrap(),
        &probe,
    )
    .unwrap();
    assert!(noisy.purity < alone.purity);
    assert!((noisy.g2 - 1.0 - noisy.purity).abs() < 1e-12);
}

#[test]
fn purity_falls_with_pre_ring_brightness() {
    let sim = Simulation::new(two_source_circuit(1.0), pulse(), grid(257)).unwrap();
    let probe = PurityProbe::unheralded("ring", SpectralFilter::all_pass(FilterTarget::Signal));
    let b = [0.0, 0.25, 0.5, 1.0, 1.5];
    let s = purity_sweep(&sim, "pre_ring", &b, Some("split"), &probe).unwrap();
    for w in s.purity.windows(2) {
        assert!(w[1] < w[0], "{:?}", s.purity);
    }
}

#[test]
fn infinite_filter_is_no_filter() {
    let sim = Simulation::new(two_source_circuit(1.0), pulse(), grid(257)).unwrap();
    let s = filter_sweep(
        &sim,
        "ring",
        &[f64::INFINITY, 4.0, 1.0],
        Some("split"),
        false,
        false,
    )
    .unwrap();
    let c = sim.circuit().with_theta("split", s.theta.unwrap()).unwrap();
    let probe = PurityProbe::unheralded("ring", SpectralFilter::all_pass(FilterTarget::Signal));
    let open = port_purity(&sim, &c, &probe).unwrap();
    assert!((s.purity[0] - open.purity).abs() < 1e-12);
}

#[test]
fn singlet_success_grows_with_overlap() {
    let u: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0)).collect();
    let w: Vec<Complex64> = (0..8)
        .map(|k| Complex64::new(1.0, (k * k) as f64))
        .collect();
    let uu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<Complex64> = u.iter().map(|z| z / uu).collect();
    // Orthogonalise w against u.
    let proj: Complex64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    let w: Vec<Complex64> = w.iter().zip(&u).map(|(b, a)| b - a * proj).collect();
    let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let w: Vec<Complex64> = w.iter().map(|z| z / ww).collect();
    let a = SpectralDensity::pure(&u).unwrap();
    let mut last = -1.0;
    for o in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
        let v: Vec<Complex64> = u
            .iter()
            .zip(&w)
            .map(|(x, y)| x * o.sqrt() + y * (1.0 - o).sqrt())
            .collect();
        let r = bell_analysis(&a, &SpectralDensity::pure(&v).unwrap()).unwrap();
        assert!((r.overlap - o).abs() < 1e-12, "{} {}", r.overlap, o);
        assert!(r.success_probability > last);
        last = r.success_probability;
        if o == 1.0 {
            assert!(r.rho_eigenvalues[0] > 1.0 - 1e-9);
        }
    }
}
