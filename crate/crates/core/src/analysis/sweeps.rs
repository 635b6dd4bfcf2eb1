use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::density::{heralded_purity, unheralded_g2};
use super::schmidt::PurityReport;
use super::sim::Simulation;
use crate::circuit::{assemble_with, component_pairs, propagate_pump, CircuitModel, ComponentKind};
use crate::spectral::{FilterShape, FilterTarget, SpectralFilter};
use crate::{Error, Result};

const SPLIT_SCAN: usize = 72;

/// Where and how purity is measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PurityProbe {
    /// Designated source whose output port is examined.
    pub source: String,
    pub signal_filter: SpectralFilter,
    /// When set, purity is heralded by an idler detected through this filter
    /// on the same rail; otherwise the unheralded g²(0) route is used.
    pub herald_filter: Option<SpectralFilter>,
    pub exclude_cross: bool,
}

impl PurityProbe {
    pub fn unheralded(source: impl Into<String>, signal_filter: SpectralFilter) -> Self {
        Self {
            source: source.into(),
            signal_filter,
            herald_filter: None,
            exclude_cross: false,
        }
    }
}

/// Pump power imbalance (rail a − rail b) right after the splitter stage.
fn split_imbalance(
    circuit: &CircuitModel,
    sim: &Simulation,
    splitter: &str,
    theta: f64,
) -> Result<f64> {
    let c = circuit.with_theta(splitter, theta)?;
    let (i, spec) = c.require(splitter)?;
    let ComponentKind::Mzi(m) = &spec.kind else {
        return Err(Error::InvalidCircuit(format!("`{splitter}` is not an MZI")));
    };
    let trace = propagate_pump(&c, &sim.input()?)?;
    let out = trace[i + 1].amplitudes();
    Ok(out[m.rails.0].norm_sqr() - out[m.rails.1].norm_sqr())
}

/// θ of `splitter` that divides the pump power equally between its output
/// rails, choosing the balanced point nearest the configured θ.
pub fn balanced_theta(sim: &Simulation, circuit: &CircuitModel, splitter: &str) -> Result<f64> {
    let (_, spec) = circuit.require(splitter)?;
    let ComponentKind::Mzi(m) = &spec.kind else {
        return Err(Error::InvalidCircuit(format!("`{splitter}` is not an MZI")));
    };
    let current = m.theta;
    let f = |t: f64| split_imbalance(circuit, sim, splitter, t);
    let step = 2.0 * PI / SPLIT_SCAN as f64;
    let mut best: Option<f64> = None;
    let mut lo = current - PI;
    let mut flo = f(lo)?;
    for _ in 0..SPLIT_SCAN {
        let hi = lo + step;
        let fhi = f(hi)?;
        if flo == 0.0 || flo.signum() != fhi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f(mid)?;
                if fm == 0.0 || b - a < 1e-15 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() == fm.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            let root = 0.5 * (a + b);
            if best.is_none_or(|r| (root - current).abs() < (r - current).abs()) {
                best = Some(root);
            }
        }
        lo = hi;
        flo = fhi;
    }
    best.ok_or_else(|| Error::Numerical(format!("`{splitter}` cannot split the pump evenly")))
}

/// Circuit with the splitter set to an even pump split.
pub fn balance_splitter(
    sim: &Simulation,
    circuit: &CircuitModel,
    splitter: &str,
) -> Result<CircuitModel> {
    circuit.with_theta(splitter, balanced_theta(sim, circuit, splitter)?)
}

/// The circuit up to the last pump removal and the rail carrying `source`'s
/// photons there. This is where a source's own output is characterised,
/// before any final interference.
pub fn source_port(circuit: &CircuitModel, source: &str) -> Result<(CircuitModel, usize)> {
    let (_, spec) = circuit.require(source)?;
    if !spec.is_source() {
        return Err(Error::InvalidCircuit(format!(
            "`{source}` is not a pair source"
        )));
    }
    let rail = spec.rails()[0];
    let trunc = match circuit.last_pump_dump() {
        Some(i) => circuit.truncated_after(i)?,
        None => circuit.clone(),
    };
    Ok((trunc, rail))
}

/// Purity of `probe.source`'s photons for the given circuit parameters.
pub fn port_purity(
    sim: &Simulation,
    circuit: &CircuitModel,
    probe: &PurityProbe,
) -> Result<PurityReport> {
    let (trunc, port) = source_port(circuit, &probe.source)?;
    let state = assemble_with(&trunc, sim.library(), &sim.input()?)?;
    match &probe.herald_filter {
        Some(fi) => heralded_purity(
            &state,
            port,
            port,
            &probe.signal_filter,
            fi,
            probe.exclude_cross,
        ),
        None => unheralded_g2(&state, port, &probe.signal_filter, probe.exclude_cross),
    }
}

/// Filtered pair probability generated inside `stage` (at birth, before any
/// downstream loss), for the circuit's pump.
pub fn birth_brightness(
    sim: &Simulation,
    circuit: &CircuitModel,
    stage: &str,
    filter: &SpectralFilter,
) -> Result<f64> {
    let (i, spec) = circuit.require(stage)?;
    let trace = propagate_pump(circuit, &sim.input()?)?;
    let pairs = component_pairs(spec, &trace[i], sim.library())?;
    let mut total = 0.0;
    for c in pairs {
        let g = c.jsa.grid();
        let t = filter.sample(g.signal());
        let ni = g.idler().len();
        let eta: f64 = c
            .jsa
            .values()
            .chunks(ni)
            .zip(&t)
            .map(|(row, tj)| tj * row.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * g.cell_area();
        total += c.weight.norm_sqr() * eta;
    }
    Ok(total)
}

/// Purity against the brightness of one noise component.
#[derive(Debug, Clone, PartialEq)]
pub struct PuritySweep {
    pub component: String,
    /// Relative to the designated source (1.0 = equally likely).
    pub relative_brightness: Vec<f64>,
    pub purity: Vec<f64>,
    pub g2: Vec<f64>,
    /// Brightness of the component at its configured length.
    pub configured_brightness: f64,
    pub theta: Option<f64>,
}

/// Only `component` and the source generate; the component's strength is
/// scaled to each requested relative brightness. With `splitter` the pump is
/// first divided evenly.
pub fn purity_sweep(
    sim: &Simulation,
    component: &str,
    brightness: &[f64],
    splitter: Option<&str>,
    probe: &PurityProbe,
) -> Result<PuritySweep> {
    if brightness.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::param(
            "relative brightness",
            "must be finite and non-negative",
        ));
    }
    let mut base = sim.circuit().clone();
    let mut theta = None;
    if let Some(s) = splitter {
        let t = balanced_theta(sim, &base, s)?;
        base = base.with_theta(s, t)?;
        theta = Some(t);
    }
    let (_, spec) = base.require(component)?;
    if !spec.is_nonlinear() {
        return Err(Error::InvalidCircuit(format!(
            "`{component}` cannot generate pairs"
        )));
    }
    let configured_scale = spec.generation_scale().unwrap_or(0.0);
    let mut iso = base.clone();
    for s in base.stages() {
        if s.id != component && s.id != probe.source {
            iso = iso.with_stage(&s.id, |x| x.set_generation_scale(0.0))?;
        }
    }
    let unit = iso.with_stage(component, |x| x.set_generation_scale(1.0))?;
    let b_src = birth_brightness(sim, &unit, &probe.source, &probe.signal_filter)?;
    let b_unit = birth_brightness(sim, &unit, component, &probe.signal_filter)? / b_src;
    if !(b_unit > 0.0) || !b_unit.is_finite() {
        return Err(Error::InvalidCircuit(format!(
            "`{component}` receives no pump"
        )));
    }
    let mut out = PuritySweep {
        component: component.into(),
        relative_brightness: brightness.to_vec(),
        purity: Vec::new(),
        g2: Vec::new(),
        configured_brightness: b_unit * configured_scale * configured_scale,
        theta,
    };
    for &b in brightness {
        let scale = libm::sqrt(b / b_unit);
        let c = iso.with_stage(component, |x| x.set_generation_scale(scale))?;
        let r = port_purity(sim, &c, probe)?;
        out.purity.push(r.purity);
        out.g2.push(r.g2);
    }
    Ok(out)
}

/// Purity against detection filter width.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSweep {
    /// Full widths in units of the source linewidth; infinity means no filter.
    pub widths: Vec<f64>,
    pub purity: Vec<f64>,
    pub g2: Vec<f64>,
    /// The same measurement with only the source generating.
    pub isolated_purity: Vec<f64>,
    pub theta: Option<f64>,
}

/// Rectangular filter pair centred on a ring source's signal and idler
/// resonances with full width `width × linewidth` (infinite = all-pass).
pub fn channel_filters(
    sim: &Simulation,
    source: &str,
    width: f64,
) -> Result<(SpectralFilter, SpectralFilter)> {
    let (_, spec) = sim.circuit().require(source)?;
    let ComponentKind::Ring(r) = &spec.kind else {
        return Err(Error::InvalidCircuit(format!(
            "`{source}` is not a ring source"
        )));
    };
    if !(width > 0.0) {
        return Err(Error::param("filter width", "must be positive"));
    }
    if width.is_infinite() {
        return Ok((
            SpectralFilter::all_pass(FilterTarget::Signal),
            SpectralFilter::all_pass(FilterTarget::Idler),
        ));
    }
    let w = width * r.ring.linewidth();
    Ok((
        SpectralFilter::new(
            r.ring.resonance_signal,
            w,
            FilterShape::Rectangular,
            FilterTarget::Signal,
        )?,
        SpectralFilter::new(
            r.ring.resonance_idler,
            w,
            FilterShape::Rectangular,
            FilterTarget::Idler,
        )?,
    ))
}

pub fn filter_sweep(
    sim: &Simulation,
    source: &str,
    widths: &[f64],
    splitter: Option<&str>,
    heralded: bool,
    exclude_cross: bool,
) -> Result<FilterSweep> {
    let mut base = sim.circuit().clone();
    let mut theta = None;
    if let Some(s) = splitter {
        let t = balanced_theta(sim, &base, s)?;
        base = base.with_theta(s, t)?;
        theta = Some(t);
    }
    let isolated = base.isolate_generation(source)?;
    let mut out = FilterSweep {
        widths: widths.to_vec(),
        purity: Vec::new(),
        g2: Vec::new(),
        isolated_purity: Vec::new(),
        theta,
    };
    for &w in widths {
        let (fs, fi) = channel_filters(sim, source, w)?;
        let probe = PurityProbe {
            source: source.into(),
            signal_filter: fs,
            herald_filter: heralded.then_some(fi),
            exclude_cross,
        };
        let r = port_purity(sim, &base, &probe)?;
        out.purity.push(r.purity);
        out.g2.push(r.g2);
        out.isolated_purity
            .push(port_purity(sim, &isolated, &probe)?.purity);
    }
    Ok(out)
}
