use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::moments::g2_moment;
use super::propagate::{coupler_matrix, fock_propagate_with, mzi_matrix};
use super::random::{random_mzi, random_state, rng};
use super::tensor::DiscreteTwoPhotonTensor;
use crate::analysis::unheralded_g2;
use crate::circuit::{
    assemble_with, mzi_pair_terms, mzi_transfer, propagate_pump, CircuitModel, ComponentKind,
    ComponentSpec, JsaLibrary, Mzi, PumpState,
};
use crate::spectral::{FilterTarget, GridPolicy, PumpPulse, SpectralFilter, SpectralGrid};
use crate::{Error, Result};

/// Agreement required between the simulator and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Outcome of one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ValidationCheck {
    pub fn new(name: impl Into<String>, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            passed: max_deviation.is_finite() && max_deviation <= tolerance,
        }
    }
}

/// Library holding a waveguide amplitude on a small grid; the spectral
/// content is irrelevant to the MZI algebra.
pub fn mzi_library() -> Result<JsaLibrary> {
    let pulse = PumpPulse::gaussian(1550e-9, 260e-12)?;
    let grid = Arc::new(SpectralGrid::around_pump(
        &pulse,
        20.0 * pulse.fwhm_omega(),
        3.0,
        7,
    )?);
    let (mzi, _) = random_mzi(&mut rng(0))?;
    let template = single_mzi(mzi)?;
    JsaLibrary::build_with(&template, &pulse, grid, GridPolicy::Coarse)
}

fn single_mzi(mzi: Mzi) -> Result<CircuitModel> {
    CircuitModel::new(
        2,
        0,
        vec![ComponentSpec::new("mzi", ComponentKind::Mzi(mzi))],
        None,
    )
}

/// Largest relative deviations (pair coefficients, transfer matrix) between
/// the closed-form MZI expressions and explicit composition for one seed.
///
/// Pair coefficients are compared relative to (r²+κ²)·Σ|g_arm|, the size of
/// the arm amplitudes before they interfere, since individual coefficients
/// can cancel to zero.
pub fn mzi_seed_deviation(seed: u64, lib: &JsaLibrary) -> Result<(f64, f64)> {
    let (mzi, pump) = random_mzi(&mut rng(seed))?;
    let circuit = single_mzi(mzi.clone())?;
    let out = fock_propagate_with(&circuit, lib, &PumpState::from_amplitudes(pump.to_vec()))?;
    let jsa = lib
        .waveguide()
        .ok_or_else(|| Error::Numerical("missing waveguide JSA".into()))?;
    let project = |rails: (usize, usize)| -> Complex64 {
        out.parts.iter().map(|p| p.tensor.project(rails, jsa)).sum()
    };
    let oracle = [
        project((0, 0)),
        project((1, 1)),
        project((0, 1)),
        project((1, 0)),
    ];
    let closed = mzi_pair_terms(&mzi, pump);
    let model = [
        closed.bunched_upper,
        closed.bunched_lower,
        closed.cross,
        closed.cross,
    ];
    let (rr, kk) = (mzi.coupler.r(), mzi.coupler.kappa());
    let inside = coupler_matrix(2, (0, 1), rr, kk).apply(&pump);
    let scale = (rr * rr + kk * kk)
        * (0..2)
            .map(|a| inside[a].norm_sqr() * mzi.arm_lengths[a] * mzi.arm_t2[a])
            .sum::<f64>();
    let coeff = if scale > 0.0 {
        model
            .iter()
            .zip(&oracle)
            .map(|(m, o)| (m - o).norm() / scale)
            .fold(0.0, f64::max)
    } else {
        model
            .iter()
            .chain(&oracle)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    };
    let explicit = mzi_matrix(2, &mzi, mzi.k_p);
    let closed_t = mzi_transfer(&mzi, mzi.k_p);
    let mut transfer: f64 = 0.0;
    for (o, row) in closed_t.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            transfer = transfer.max((v - explicit.get(o, i)).norm());
        }
    }
    Ok((coeff, transfer))
}

/// Closed-form MZI pair terms and transfer against explicit composition.
pub fn validate_mzis(seeds: impl IntoIterator<Item = u64>) -> Result<Vec<ValidationCheck>> {
    let lib = mzi_library()?;
    let (mut c, mut t) = (0.0f64, 0.0f64);
    for s in seeds {
        let (dc, dt) = mzi_seed_deviation(s, &lib)?;
        c = c.max(dc);
        t = t.max(dt);
    }
    Ok(vec![
        ValidationCheck::new("mzi pair coefficients", c, ORACLE_TOLERANCE),
        ValidationCheck::new("mzi transfer matrix", t, ORACLE_TOLERANCE),
    ])
}

/// g²(0) from the Schmidt route against the brute-force moment on random
/// states, for every rail that carries signal photons.
pub fn validate_g2(
    seeds: impl IntoIterator<Item = u64>,
    n_rails: usize,
    bins: usize,
) -> Result<ValidationCheck> {
    let grid = Arc::new(SpectralGrid::square(1.2e15, 1.3e15, 2e11, bins)?);
    let all = SpectralFilter::all_pass(FilterTarget::Signal);
    let mut dev: f64 = 0.0;
    for s in seeds {
        let state = random_state(&mut rng(s), n_rails, grid.clone())?;
        let t = DiscreteTwoPhotonTensor::from_state(&state)?;
        for port in 0..n_rails {
            match unheralded_g2(&state, port, &all, false) {
                Ok(rep) => dev = dev.max((rep.g2 - g2_moment(&t, port, &all)?).abs()),
                Err(Error::EmptyPort { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ValidationCheck::new(
        "g2 against photon-number moment",
        dev,
        ORACLE_TOLERANCE,
    ))
}

/// Compares the simulator with the oracle on one circuit: pump trace,
/// per-origin weights on every rail pair, the full output tensor and the
/// unheralded g²(0) of every output rail. Amplitudes are built without grid
/// adequacy checks so a coarse `grid` may be used.
pub fn validate_circuit(
    circuit: &CircuitModel,
    pulse: &PumpPulse,
    grid: Arc<SpectralGrid>,
) -> Result<Vec<ValidationCheck>> {
    let lib = JsaLibrary::build_with(circuit, pulse, grid.clone(), GridPolicy::Coarse)?;
    let input = PumpState::single(circuit.n_rails(), circuit.pump_input(), pulse.amplitude())?;
    let oracle = fock_propagate_with(circuit, &lib, &input)?;
    let state = assemble_with(circuit, &lib, &input)?;
    let n = circuit.n_rails();
    let mut checks = Vec::new();

    let trace = propagate_pump(circuit, &input)?;
    let p0 = libm::sqrt(input.power()).max(f64::MIN_POSITIVE);
    let mut dp: f64 = 0.0;
    for (a, b) in trace.iter().zip(&oracle.pump_trace) {
        for (x, y) in a.amplitudes().iter().zip(b) {
            dp = dp.max((x - y).norm() / p0);
        }
    }
    checks.push(ValidationCheck::new("pump trace", dp, ORACLE_TOLERANCE));

    let mut pairs: Vec<(Complex64, Complex64)> = Vec::new();
    for p in &oracle.parts {
        for s in 0..n {
            for i in 0..n {
                let model: Complex64 = state
                    .on_port(s, i)
                    .filter(|c| c.origin == p.origin && c.born_cross == p.born_cross)
                    .map(|c| c.weight)
                    .sum();
                pairs.push((model, p.tensor.project((s, i), &p.jsa)));
            }
        }
    }
    let orphan = state.contributions().iter().any(|c| {
        !oracle
            .parts
            .iter()
            .any(|p| p.origin == c.origin && p.born_cross == c.born_cross)
    });
    let scale = pairs.iter().map(|p| p.1.norm()).fold(0.0, f64::max);
    let dw = if orphan {
        f64::INFINITY
    } else if scale > 0.0 {
        pairs
            .iter()
            .map(|(m, o)| (m - o).norm() / scale)
            .fold(0.0, f64::max)
    } else {
        pairs.iter().map(|(m, _)| m.norm()).fold(0.0, f64::max)
    };
    checks.push(ValidationCheck::new(
        "contribution weights",
        dw,
        ORACLE_TOLERANCE,
    ));

    let total = oracle.total(n, grid)?;
    let dense = DiscreteTwoPhotonTensor::from_state(&state)?;
    let big = total.max_abs();
    let dt = total.max_abs_diff(&dense)? / if big > 0.0 { big } else { 1.0 };
    checks.push(ValidationCheck::new("output tensor", dt, ORACLE_TOLERANCE));

    let all = SpectralFilter::all_pass(FilterTarget::Signal);
    let mut dg: f64 = 0.0;
    for port in 0..n {
        if let Ok(rep) = unheralded_g2(&state, port, &all, false) {
            dg = dg.max((rep.g2 - g2_moment(&total, port, &all)?).abs());
        }
    }
    checks.push(ValidationCheck::new(
        "g2 on output rails",
        dg,
        ORACLE_TOLERANCE,
    ));
    Ok(checks)
}
