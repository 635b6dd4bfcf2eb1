//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p sfwm --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use sfwm::commands::{Command, Common, FringeArgs, MapArgs, ValidateArgs};
use sfwm::manifest::{replay, run_with, RunManifest, MANIFEST_FILE};
use sfwm::Config;
use sfwm_core::analysis::{
    balanced_theta, bell_analysis, birth_brightness, filter_sweep, full_period, hom_fringe,
    port_purity, purity_sweep, scan_asymmetry, schmidt, FringeOptions, PurityProbe, Simulation,
    SpectralDensity,
};
use sfwm_core::circuit::{
    assemble_state, mzi_pair_terms, mzi_transfer, CircuitModel, ComponentKind, ComponentSpec,
    Coupler, CouplerCoeffs, CustomSource, Mzi, PhaseShift, PumpDump, Waveguide,
};
use sfwm_core::oracle::{validate_circuit, validate_g2, validate_mzis, DEFAULT_SEEDS};
use sfwm_core::spectral::{BiphotonAmplitude, FilterTarget, SpectralFilter, SpectralGrid};
use sfwm_core::Complex64;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fig3() -> Config {
    Config::load("fig3_reference").expect("bundled circuit")
}

fn fig3_sim() -> (Config, Simulation) {
    let cfg = fig3();
    let grid = cfg.grid(257, 4.0).unwrap();
    let sim = Simulation::new(cfg.circuit.clone(), cfg.pulse, grid).unwrap();
    (cfg, sim)
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut checks = validate_mzis(DEFAULT_SEEDS).map_err(|e| e.to_string())?;
    let cfg = fig3();
    let grid = cfg.grid(33, 4.0).map_err(|e| e.to_string())?;
    checks.extend(validate_circuit(&cfg.circuit, &cfg.pulse, grid).map_err(|e| e.to_string())?);
    let elapsed = start.elapsed();
    let worst = checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let failed: Vec<_> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .collect();
    verdict(
        failed.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{} seeds + fig3_reference on 33×33, worst deviation {worst:e} (< 1e-10), {:.1} s (< 60 s){}",
            DEFAULT_SEEDS.end - DEFAULT_SEEDS.start,
            elapsed.as_secs_f64(),
            if failed.is_empty() {
                String::new()
            } else {
                format!(", failed: {}", failed.join(", "))
            }
        ),
    )
}

const K_P: f64 = 2.0 * PI * 2.4 / 1550e-9;

fn weights(c: &CircuitModel, cfg: &Config) -> Vec<((usize, usize), Complex64)> {
    let (s, _) = assemble_state(c, &cfg.pulse, cfg.grid(257, 4.0).unwrap()).unwrap();
    s.contributions()
        .iter()
        .map(|x| (x.rails, x.weight))
        .collect()
}

fn reductions() -> Check {
    let cfg = fig3();
    let one = |kind| CircuitModel::new(2, 0, vec![ComponentSpec::new("x", kind)], None).unwrap();
    let bar = Mzi::new(
        (0, 1),
        0.0,
        [1.7e-3, 0.9e-3],
        CouplerCoeffs::new(1.0, 0.0, 1.0).unwrap(),
        K_P,
    );
    let wg = Waveguide::routing(0, 1.7e-3, 1.0, K_P);
    let identical = weights(&one(ComponentKind::Mzi(bar)), &cfg)
        == weights(&one(ComponentKind::Waveguide(wg)), &cfg);

    let l = 1.3e-3;
    let sym = Mzi::new((0, 1), 0.0, [l, l], CouplerCoeffs::balanced(), K_P);
    let terms = mzi_pair_terms(&sym, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let cross = terms.cross.norm() / l;
    let extinction = mzi_transfer(&sym, K_P)[0][0].norm();
    verdict(
        identical && cross < 1e-14 && extinction < 1e-14,
        format!(
            "κ=0 MZI weights bit-identical to waveguide: {identical}; cross term {cross:e} (< 1e-14); |T₁| {extinction:e} (< 1e-14)"
        ),
    )
}

fn test_grid(n: usize) -> Arc<SpectralGrid> {
    Arc::new(SpectralGrid::square(1.2e15, 1.3e15, 2e11, n).unwrap())
}

fn purity_consistency() -> Check {
    let g2 = validate_g2(1..21, 3, 10).map_err(|e| e.to_string())?;
    let g = test_grid(24);
    let sep = BiphotonAmplitude::from_fn(g.clone(), |j, k| {
        let (x, y) = (j as f64 - 11.0, k as f64 - 13.0);
        Complex64::from_polar((-(x * x) / 10.0 - (y * y) / 6.0).exp(), 0.2 * x - 0.1 * y)
    })
    .unwrap()
    .normalized()
    .unwrap();
    let p_sep = schmidt(&sep).map_err(|e| e.to_string())?.purity;
    // Two product modes on disjoint bins with equal weight.
    let two = BiphotonAmplitude::from_fn(g, |j, k| {
        let v = if (j < 12) == (k < 12) { 1.0 } else { 0.0 };
        Complex64::new(v, 0.0)
    })
    .unwrap()
    .normalized()
    .unwrap();
    let p_two = schmidt(&two).map_err(|e| e.to_string())?.purity;
    verdict(
        g2.passed && (p_sep - 1.0).abs() < 1e-10 && (p_two - 0.5).abs() < 1e-14,
        format!(
            "g2 vs moment on 20 states {:e} (< 1e-10); separable purity {p_sep}; two-mode purity {p_two}",
            g2.max_deviation
        ),
    )
}

fn interferometer(a: Arc<BiphotonAmplitude>, b: Arc<BiphotonAmplitude>) -> CircuitModel {
    let bs = || {
        ComponentKind::Coupler(Coupler {
            rails: (0, 1),
            coeffs: CouplerCoeffs::balanced(),
        })
    };
    let src = |rail, jsa| {
        ComponentKind::Custom(CustomSource {
            rail,
            jsa,
            effective_length: 1e-3,
            t2: 1.0,
            generation_scale: 1.0,
        })
    };
    let stages = vec![
        ComponentSpec::new("split", bs()),
        ComponentSpec::new("a", src(0, a)),
        ComponentSpec::new("b", src(1, b)),
        ComponentSpec::new(
            "phi",
            ComponentKind::Phase(PhaseShift {
                rails: vec![1],
                phi: 0.0,
            }),
        ),
        ComponentSpec::new(
            "dump",
            ComponentKind::PumpDump(PumpDump { rails: vec![0, 1] }),
        ),
        ComponentSpec::new("out", bs()),
    ];
    CircuitModel::new(2, 0, stages, Some("a".into())).unwrap()
}

fn bump(g: &Arc<SpectralGrid>, cs: f64, ci: f64) -> Arc<BiphotonAmplitude> {
    let a = BiphotonAmplitude::from_fn(g.clone(), |j, k| {
        let (x, y) = (j as f64 - cs, k as f64 - ci);
        if x.abs() > 6.0 || y.abs() > 6.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((-(x * x) / 8.0 - (y * y) / 5.0).exp(), 0.1 * x)
    });
    Arc::new(a.unwrap().normalized().unwrap())
}

fn noise_free_interference() -> Check {
    let cfg = fig3();
    let g = test_grid(48);
    let phases = full_period(32);
    let opts = FringeOptions::default();
    let scan = |a, b| {
        let sim = Simulation::new(interferometer(a, b), cfg.pulse, g.clone())?;
        hom_fringe(&sim, "phi", &phases, &opts)
    };
    let same = bump(&g, 14.0, 20.0);
    let ident = scan(same.clone(), same).map_err(|e| e.to_string())?;
    let orth = scan(bump(&g, 14.0, 20.0), bump(&g, 33.0, 20.0)).map_err(|e| e.to_string())?;

    // The bundled two-ring circuit with routing generation off.
    let tr = Config::load("two_ring").unwrap();
    let sim = Simulation::new(
        tr.circuit.noise_free(),
        tr.pulse,
        tr.grid(257, 4.0).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let rings = hom_fringe(&sim, "phi", &full_period(64), &opts).map_err(|e| e.to_string())?;

    let v1 = ident.visibility_anti_bunched;
    let v0 = orth.visibility_anti_bunched.max(orth.visibility_bunched);
    let vr = rings.visibility_anti_bunched;
    verdict(
        (v1 - 1.0).abs() < 1e-9 && (vr - 1.0).abs() < 1e-9 && v0 < 1e-9,
        format!(
            "identical pure sources V = {v1}; two_ring V = {vr}; orthogonal sources V = {v0:e}"
        ),
    )
}

fn ring_filters(cfg: &Config) -> (SpectralFilter, SpectralFilter) {
    cfg.channel_filters().unwrap()
}

fn anchor_plateau() -> Check {
    let (cfg, sim) = fig3_sim();
    let ring = cfg.analysis.source.clone().unwrap();
    let width = cfg.filter_bandwidth / 60e-12;
    let s = filter_sweep(&sim, &ring, &[width], Some("input_mzi"), false, false)
        .map_err(|e| e.to_string())?;
    let drop = 100.0 * (s.isolated_purity[0] - s.purity[0]);
    verdict(
        (0.5..=4.0).contains(&drop),
        format!(
            "ring-port purity {:.4} vs isolated {:.4} at 1.3 nm, 50:50: drop {drop:.2} points (within [0.5, 4])",
            s.purity[0], s.isolated_purity[0]
        ),
    )
}

fn anchor_decay() -> Check {
    let (cfg, sim) = fig3_sim();
    let (fs, _) = ring_filters(&cfg);
    let probe = PurityProbe::unheralded("ring", fs);
    let b: Vec<f64> = (0..=30).map(|k| k as f64 * 0.05).collect();
    let s =
        purity_sweep(&sim, "pre_ring", &b, Some("input_mzi"), &probe).map_err(|e| e.to_string())?;
    let monotone = s.purity.windows(2).all(|w| w[1] < w[0]);
    let crossing = b
        .iter()
        .zip(&s.purity)
        .find(|(_, p)| **p < 0.40)
        .map(|(x, _)| *x);
    verdict(
        monotone && crossing.is_some_and(|x| x <= 1.5),
        format!(
            "pre-ring purity strictly decreasing: {monotone}; first sample below 0.40 at relative brightness {}",
            crossing.map_or("none".into(), |x| format!("{x:.2} (≤ 1.5)"))
        ),
    )
}

fn anchor_filter() -> Check {
    let (_, sim) = fig3_sim();
    let widths = [
        f64::INFINITY,
        200.0,
        100.0,
        55.0,
        34.0,
        21.0,
        13.0,
        8.0,
        5.0,
        3.0,
        2.0,
        1.5,
        1.25,
        1.0,
    ];
    let s = filter_sweep(&sim, "ring", &widths, Some("input_mzi"), false, false)
        .map_err(|e| e.to_string())?;
    let c = sim
        .circuit()
        .with_theta("input_mzi", s.theta.unwrap())
        .unwrap();
    let open = PurityProbe::unheralded("ring", SpectralFilter::all_pass(FilterTarget::Signal));
    let unfiltered = port_purity(&sim, &c, &open)
        .map_err(|e| e.to_string())?
        .purity;
    let limit = (s.purity[0] - unfiltered).abs();
    let worst_ripple = s.purity.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    verdict(
        limit < 1e-6 && worst_ripple <= 0.002,
        format!(
            "|P(∞) − P(unfiltered)| = {limit:e} (< 1e-6); purity {:.4} → {:.4} from ∞ to 1 linewidth, largest backward step {worst_ripple:e} (≤ 0.002)",
            s.purity[0],
            s.purity[s.purity.len() - 1]
        ),
    )
}

fn anchor_asymmetry() -> Check {
    let (cfg, sim) = fig3_sim();
    let mut c = sim.circuit().clone();
    for s in sim.circuit().stages() {
        if !s.is_source() && s.id != "input_mzi" {
            c = c
                .with_stage(&s.id, |x| x.set_generation_scale(0.0))
                .unwrap();
        }
    }
    let theta = balanced_theta(&sim, &c, "input_mzi").map_err(|e| e.to_string())?;
    let c = c.with_theta("input_mzi", theta).unwrap();
    let (fs, fi) = ring_filters(&cfg);
    let unit = c
        .with_stage("input_mzi", |x| x.set_generation_scale(1.0))
        .unwrap();
    let rel = birth_brightness(&sim, &unit, "input_mzi", &fs).map_err(|e| e.to_string())?
        / birth_brightness(&sim, &unit, "ring", &fs).map_err(|e| e.to_string())?;
    let scale = (0.1 / rel).sqrt();
    let c = c
        .with_stage("input_mzi", |x| x.set_generation_scale(scale))
        .unwrap();
    let opts = FringeOptions {
        ports: (0, 1),
        bunched_port: 0,
        signal_filter: Some(fs),
        idler_filter: Some(fi),
    };
    let scan = hom_fringe(&sim.with_circuit(c), "phi", &full_period(64), &opts)
        .map_err(|e| e.to_string())?;
    let (ab, aa) = scan_asymmetry(&scan).map_err(|e| e.to_string())?;
    verdict(
        ab > 1e-3 && ab >= 10.0 * aa,
        format!("MZI noise at 10% relative brightness: bunched asymmetry {ab:e}, anti-bunched {aa:e} (need ≥ 10×)"),
    )
}

fn bell_monotonicity() -> Check {
    let u: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0)).collect();
    let w: Vec<Complex64> = (0..8)
        .map(|k| Complex64::new(1.0, (k * k) as f64))
        .collect();
    let norm = |v: Vec<Complex64>| {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect::<Vec<_>>()
    };
    let u = norm(u);
    let proj: Complex64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
    let w = norm(w.iter().zip(&u).map(|(b, a)| b - a * proj).collect());
    let a = SpectralDensity::pure(&u).map_err(|e| e.to_string())?;
    let mut success = Vec::new();
    let mut top = 0.0;
    for o in [0.0f64, 0.25, 0.5, 0.75, 1.0] {
        let v: Vec<Complex64> = u
            .iter()
            .zip(&w)
            .map(|(x, y)| x * o.sqrt() + y * (1.0 - o).sqrt())
            .collect();
        let r = bell_analysis(&a, &SpectralDensity::pure(&v).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        success.push(r.success_probability);
        top = r.rho_eigenvalues[0];
    }
    let increasing = success.windows(2).all(|p| p[1] > p[0]);
    verdict(
        increasing && top > 1.0 - 1e-9,
        format!(
            "success {:?} over O = 0, 0.25, 0.5, 0.75, 1; largest eigenvalue at O=1 {top}",
            success
                .iter()
                .map(|s| format!("{s:.4}"))
                .collect::<Vec<_>>()
        ),
    )
}

fn common() -> Common {
    Common::default()
}

fn performance() -> Check {
    let cfg = fig3();
    let map = Command::Map(MapArgs {
        theta_steps: 41,
        phi_steps: 41,
        theta_min: 0.0,
        theta_max: PI,
        noise_free: false,
    });
    let t = Instant::now();
    run_with(&map, &common(), &cfg).map_err(|e| e.to_string())?;
    let t_map = t.elapsed();
    let t = Instant::now();
    let v = run_with(
        &Command::Validate(ValidateArgs {
            seeds: 100,
            oracle_grid: 33,
        }),
        &common(),
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let t_val = t.elapsed();
    verdict(
        t_map < Duration::from_secs(300) && t_val < Duration::from_secs(120) && v.failure.is_none(),
        format!(
            "41×41 map at 257×257 in {:.1} s (< 300 s); validate in {:.1} s (< 120 s)",
            t_map.as_secs_f64(),
            t_val.as_secs_f64()
        ),
    )
}

fn determinism() -> Check {
    let cfg = fig3();
    let fringe = Command::Fringe(FringeArgs {
        phi_steps: 64,
        theta: None,
        noise_free: false,
        component: None,
    });
    let map = Command::Map(MapArgs {
        theta_steps: 11,
        phi_steps: 21,
        theta_min: 0.0,
        theta_max: PI,
        noise_free: false,
    });
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = 0;
    for cmd in [fringe, map] {
        let first = run_with(&cmd, &common(), &cfg).map_err(|e| e.to_string())?;
        let manifest: RunManifest =
            serde_json::from_slice(first.artifacts.get(MANIFEST_FILE).unwrap())
                .map_err(|e| e.to_string())?;
        for k in 0..2 {
            let again =
                replay(&manifest, &dir.path().join(k.to_string())).map_err(|e| e.to_string())?;
            if again.artifacts != first.artifacts {
                return Err(format!("`{}` replay {k} differs", cmd.name()));
            }
        }
        files += first.artifacts.files.len();
    }
    Ok(format!(
        "fringe and map: {files} files byte-identical across two replays of their manifests"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("1 oracle equivalence", oracle_equivalence),
        ("2 analytic reductions", reductions),
        ("3 purity/g2 consistency", purity_consistency),
        ("4 noise-free interference", noise_free_interference),
        ("5a purity plateau", anchor_plateau),
        ("5b purity decay", anchor_decay),
        ("5c filter sweep", anchor_filter),
        ("5d fringe asymmetry", anchor_asymmetry),
        ("6 Bell monotonicity", bell_monotonicity),
        ("7 performance", performance),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
