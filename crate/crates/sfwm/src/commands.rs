//! The experiments behind each subcommand. Every command returns its files
//! in memory so callers decide where (and whether) to write them.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sfwm_core::analysis::{
    balanced_theta, bell_analysis, filter_sweep, fringe_row, full_period, hom_fringe, port_jsa,
    purity_sweep, rate_evaluator, scan_asymmetry, schmidt, source_port, FringeOptions, PurityProbe,
    Simulation, SpectralDensity,
};
use sfwm_core::circuit::{assemble_with, CircuitModel, ComponentKind};
use sfwm_core::oracle::{validate_circuit, validate_g2, validate_mzis, ValidationCheck};
use sfwm_core::spectral::{BiphotonAmplitude, SpectralGrid};
use sfwm_core::units::omega_to_wavelength;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::{columns_csv, json, matrix_csv, Artifacts};

/// Options shared by every command.
#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct Common {
    /// Circuit file, or the name of a bundled circuit (fig3_reference, two_ring).
    #[arg(long, global = true, default_value = "fig3_reference")]
    pub config: String,
    /// Points per spectral axis.
    #[arg(long, global = true, default_value_t = 257)]
    pub grid: usize,
    /// Half-width of each spectral axis in pump FWHM.
    #[arg(long, global = true, default_value_t = 4.0)]
    pub span: f64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for Common {
    fn default() -> Self {
        Self {
            config: "fig3_reference".into(),
            grid: 257,
            span: 4.0,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize, PartialEq)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// HOM fringe obtained by scanning the phase shifter.
    Fringe(FringeArgs),
    /// Fringes for every pump splitting (splitter θ × phase φ).
    Map(MapArgs),
    /// Purity of the characterised source against a noise component's brightness.
    PuritySweep(PuritySweepArgs),
    /// Purity of the characterised source against detection filter width.
    FilterSweep(FilterSweepArgs),
    /// Joint spectral amplitude of a component or an output port.
    Jsa(JsaArgs),
    /// Singlet generation from two heralded sources.
    Bell(BellArgs),
    /// Compare closed forms and the simulator with the brute-force oracle.
    Validate(ValidateArgs),
    /// Re-run a command from its manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fringe(_) => "fringe",
            Command::Map(_) => "map",
            Command::PuritySweep(_) => "purity-sweep",
            Command::FilterSweep(_) => "filter-sweep",
            Command::Jsa(_) => "jsa",
            Command::Bell(_) => "bell",
            Command::Validate(_) => "validate",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct FringeArgs {
    /// Phase samples over one period.
    #[arg(long, default_value_t = 64)]
    pub phi_steps: usize,
    /// Splitter angle (rad); defaults to an even pump split.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Only designated sources generate pairs.
    #[arg(long)]
    pub noise_free: bool,
    /// Keep only this noise component (plus the sources) generating.
    #[arg(long, conflicts_with = "noise_free")]
    pub component: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct MapArgs {
    /// Splitter angle samples.
    #[arg(long, default_value_t = 41)]
    pub theta_steps: usize,
    /// Phase samples over one period.
    #[arg(long, default_value_t = 41)]
    pub phi_steps: usize,
    /// Splitter angles span [theta-min, theta-max] inclusive (rad).
    #[arg(long, default_value_t = 0.0)]
    pub theta_min: f64,
    #[arg(long, default_value_t = PI)]
    pub theta_max: f64,
    /// Only designated sources generate pairs.
    #[arg(long)]
    pub noise_free: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct PuritySweepArgs {
    /// Noise component to scale; defaults to the config's noise_component.
    #[arg(long)]
    pub component: Option<String>,
    /// Relative brightness values (1 = as bright as the source).
    #[arg(long, value_delimiter = ',', default_values_t = default_brightness())]
    pub brightness: Vec<f64>,
    /// Herald on the idler instead of the unheralded g² route.
    #[arg(long)]
    pub heralded: bool,
    /// Drop spurious pairs born split across an MZI.
    #[arg(long)]
    pub exclude_antibunched_noise: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct FilterSweepArgs {
    /// Filter full widths in source linewidths (`inf` = no filter). The
    /// configured channel filter width is always included.
    #[arg(long, value_delimiter = ',', default_values_t = default_widths())]
    pub widths: Vec<f64>,
    /// Herald on the idler instead of the unheralded g² route.
    #[arg(long)]
    pub heralded: bool,
    /// Drop spurious pairs born split across an MZI.
    #[arg(long)]
    pub exclude_antibunched_noise: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct JsaArgs {
    /// Nonlinear stage whose generated JSA is dumped.
    #[arg(long, conflicts_with = "port")]
    pub component: Option<String>,
    /// Dump instead the compound JSA on this rail after pump removal.
    #[arg(long)]
    pub port: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct BellArgs {
    /// The two sources feeding the singlet (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub sources: Vec<String>,
    /// Only designated sources generate pairs.
    #[arg(long)]
    pub noise_free: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize, PartialEq)]
pub struct ValidateArgs {
    /// Number of seeds, taken from the fixed list 1, 2, 3, ...
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Points per axis of the oracle's circuit grid.
    #[arg(long, default_value_t = 33)]
    pub oracle_grid: usize,
}

#[derive(Debug, Clone, Args, PartialEq)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
}

fn default_brightness() -> Vec<f64> {
    (0..=30).map(|k| k as f64 / 20.0).collect()
}

fn default_widths() -> Vec<f64> {
    vec![
        1.0,
        1.25,
        1.5,
        2.0,
        3.0,
        5.0,
        8.0,
        13.0,
        34.0,
        55.0,
        f64::INFINITY,
    ]
}

/// Number of random states checked against the photon-number moment.
pub const G2_STATES: u64 = 20;

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Artifacts,
    /// Parameters after defaults and derived settings were applied.
    pub resolved: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Set when the run completed but its checks failed.
    pub failure: Option<String>,
    /// Lines for the terminal.
    pub report: Vec<String>,
}

impl Outcome {
    fn new(artifacts: Artifacts, resolved: serde_json::Value) -> Self {
        Self {
            artifacts,
            resolved,
            seeds: Vec::new(),
            failure: None,
            report: Vec::new(),
        }
    }
}

fn need<'a>(v: &'a Option<String>, what: &str, cfg: &Config) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| {
        CliError::Usage(format!(
            "{}: the circuit defines no analysis.{what}",
            cfg.origin
        ))
    })
}

fn simulation(cfg: &Config, circuit: CircuitModel, common: &Common) -> Result<Simulation> {
    let grid = cfg.grid(common.grid, common.span)?;
    Ok(Simulation::new(circuit, cfg.pulse, grid)?)
}

/// Circuit in which only designated sources and `keep` generate.
fn only_sources_and(circuit: &CircuitModel, keep: &str) -> Result<CircuitModel> {
    let (_, spec) = circuit.require(keep)?;
    if !spec.is_nonlinear() {
        return Err(CliError::Usage(format!("`{keep}` cannot generate pairs")));
    }
    let mut c = circuit.clone();
    for s in circuit.stages() {
        if !s.is_source() && s.id != keep {
            c = c.with_stage(&s.id, |x| x.set_generation_scale(0.0))?;
        }
    }
    Ok(c)
}

/// Sets the configured splitter to `theta`, or to an even pump split.
fn set_splitter(
    sim: &Simulation,
    cfg: &Config,
    theta: Option<f64>,
) -> Result<(CircuitModel, Option<f64>)> {
    let Some(s) = cfg.analysis.splitter.as_deref() else {
        if theta.is_some() {
            return Err(CliError::Usage(format!(
                "{}: --theta needs analysis.splitter",
                cfg.origin
            )));
        }
        return Ok((sim.circuit().clone(), None));
    };
    let t = match theta {
        Some(t) => t,
        None => balanced_theta(sim, sim.circuit(), s)?,
    };
    Ok((sim.circuit().with_theta(s, t)?, Some(t)))
}

fn fringe_options(cfg: &Config) -> Result<FringeOptions> {
    let (fs, fi) = cfg.channel_filters()?;
    Ok(FringeOptions {
        ports: cfg.analysis.output_ports,
        bunched_port: cfg.analysis.output_ports.0,
        signal_filter: Some(fs),
        idler_filter: Some(fi),
    })
}

fn base_resolved(cfg: &Config, common: &Common) -> serde_json::Value {
    json!({
        "grid_points": common.grid,
        "grid_span_pump_fwhm": common.span,
        "pump_center_wavelength_m": cfg.pulse.center_wavelength(),
        "pump_bandwidth_m": cfg.pulse.fwhm_bandwidth(),
        "pump_shape": format!("{:?}", cfg.pulse.shape()).to_lowercase(),
        "channel_detuning_rad_per_s": cfg.detuning,
        "filter_bandwidth_m": cfg.filter_bandwidth,
        "filter_shape": format!("{:?}", cfg.filter_shape).to_lowercase(),
        "estimated_stages": cfg.estimates,
    })
}

fn extend(mut v: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    if let (Some(a), serde_json::Value::Object(b)) = (v.as_object_mut(), extra) {
        a.extend(b);
    }
    v
}

pub fn execute(cmd: &Command, cfg: &Config, common: &Common) -> Result<Outcome> {
    match cmd {
        Command::Fringe(a) => fringe(cfg, common, a),
        Command::Map(a) => map(cfg, common, a),
        Command::PuritySweep(a) => purity(cfg, common, a),
        Command::FilterSweep(a) => filter(cfg, common, a),
        Command::Jsa(a) => jsa(cfg, common, a),
        Command::Bell(a) => bell(cfg, common, a),
        Command::Validate(a) => validate(cfg, common, a),
        Command::Replay(_) => Err(CliError::Usage("replay cannot be nested".into())),
    }
}

fn fringe(cfg: &Config, common: &Common, a: &FringeArgs) -> Result<Outcome> {
    let phase = need(&cfg.analysis.phase, "phase", cfg)?;
    if a.phi_steps < 5 {
        return Err(CliError::Usage("--phi-steps must be at least 5".into()));
    }
    let circuit = match (&a.component, a.noise_free) {
        (Some(c), _) => only_sources_and(&cfg.circuit, c)?,
        (None, true) => cfg.circuit.noise_free(),
        (None, false) => cfg.circuit.clone(),
    };
    let sim = simulation(cfg, circuit, common)?;
    let (circuit, theta) = set_splitter(&sim, cfg, a.theta)?;
    let sim = sim.with_circuit(circuit);
    let phases = full_period(a.phi_steps);
    let scan = hom_fringe(&sim, phase, &phases, &fringe_options(cfg)?)?;
    let (asym_b, asym_a) = scan_asymmetry(&scan)?;

    let mut art = Artifacts::default();
    art.push(
        "fringe.csv",
        columns_csv(
            &["phi_rad", "bunched", "anti_bunched", "total"],
            &[&scan.phases, &scan.bunched, &scan.anti_bunched, &scan.total],
        )?,
    );
    let summary = json!({
        "phase_stage": phase,
        "splitter_theta_rad": theta,
        "visibility_bunched": scan.visibility_bunched,
        "visibility_anti_bunched": scan.visibility_anti_bunched,
        "asymmetry_bunched": asym_b,
        "asymmetry_anti_bunched": asym_a,
        "noise_free": a.noise_free,
        "noise_component": a.component,
    });
    art.push("fringe.json", json(&summary)?);
    let mut out = Outcome::new(
        art,
        extend(
            base_resolved(cfg, common),
            json!({ "phi_steps": a.phi_steps, "splitter_theta_rad": theta }),
        ),
    );
    out.report.push(format!(
        "visibility bunched {} anti-bunched {}",
        scan.visibility_bunched, scan.visibility_anti_bunched
    ));
    Ok(out)
}

/// `n` values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn map(cfg: &Config, common: &Common, a: &MapArgs) -> Result<Outcome> {
    let phase = need(&cfg.analysis.phase, "phase", cfg)?;
    let splitter = need(&cfg.analysis.splitter, "splitter", cfg)?;
    if a.theta_steps == 0 || a.phi_steps == 0 {
        return Err(CliError::Usage("map needs at least one θ and one φ".into()));
    }
    let circuit = if a.noise_free {
        cfg.circuit.noise_free()
    } else {
        cfg.circuit.clone()
    };
    let sim = simulation(cfg, circuit, common)?;
    let opts = fringe_options(cfg)?;
    let eval = rate_evaluator(&sim, &opts)?;
    let thetas = linspace(a.theta_min, a.theta_max, a.theta_steps);
    let phases = full_period(a.phi_steps);
    let rows = thetas
        .par_iter()
        .map(|&t| fringe_row(&sim, &eval, splitter, t, phase, &phases, &opts))
        .collect::<sfwm_core::Result<Vec<_>>>()?;

    let bunched: Vec<Vec<f64>> = rows.iter().map(|r| r.bunched.clone()).collect();
    let anti: Vec<Vec<f64>> = rows.iter().map(|r| r.anti_bunched.clone()).collect();
    let mut art = Artifacts::default();
    art.push(
        "map_bunched.csv",
        matrix_csv("theta_rad\\phi_rad", &thetas, &phases, &bunched)?,
    );
    art.push(
        "map_anti_bunched.csv",
        matrix_csv("theta_rad\\phi_rad", &thetas, &phases, &anti)?,
    );
    let per_row: Vec<_> = thetas
        .iter()
        .zip(&rows)
        .map(|(t, r)| {
            json!({
                "theta_rad": t,
                "visibility_bunched": r.visibility_bunched,
                "visibility_anti_bunched": r.visibility_anti_bunched,
            })
        })
        .collect();
    art.push(
        "map.json",
        json(&json!({ "splitter": splitter, "phase_stage": phase, "rows": per_row }))?,
    );
    Ok(Outcome::new(
        art,
        extend(
            base_resolved(cfg, common),
            json!({
                "theta_rad": thetas,
                "phi_rad": phases,
                "noise_free": a.noise_free,
            }),
        ),
    ))
}

/// Brightness at which `purity` first drops below `level`, interpolated
/// linearly between samples.
pub fn first_crossing(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    if y.first().is_some_and(|v| *v < level) {
        return x.first().copied();
    }
    x.windows(2).zip(y.windows(2)).find_map(|(xs, ys)| {
        (ys[0] >= level && ys[1] < level)
            .then(|| xs[0] + (xs[1] - xs[0]) * (ys[0] - level) / (ys[0] - ys[1]))
    })
}

fn purity(cfg: &Config, common: &Common, a: &PuritySweepArgs) -> Result<Outcome> {
    let source = need(&cfg.analysis.source, "source", cfg)?;
    let component = match &a.component {
        Some(c) => c.as_str(),
        None => need(&cfg.analysis.noise_component, "noise_component", cfg)?,
    };
    let sim = simulation(cfg, cfg.circuit.clone(), common)?;
    let (fs, fi) = cfg.channel_filters()?;
    let probe = PurityProbe {
        source: source.into(),
        signal_filter: fs,
        herald_filter: a.heralded.then_some(fi),
        exclude_cross: a.exclude_antibunched_noise,
    };
    let s = purity_sweep(
        &sim,
        component,
        &a.brightness,
        cfg.analysis.splitter.as_deref(),
        &probe,
    )?;
    let mut art = Artifacts::default();
    art.push(
        "purity_sweep.csv",
        columns_csv(
            &["relative_brightness", "purity", "g2"],
            &[&s.relative_brightness, &s.purity, &s.g2],
        )?,
    );
    let crossing = first_crossing(&s.relative_brightness, &s.purity, 0.40);
    art.push(
        "purity_sweep.json",
        json(&json!({
            "source": source,
            "component": component,
            "splitter_theta_rad": s.theta,
            "configured_relative_brightness": s.configured_brightness,
            "relative_brightness_below_0_40_purity": crossing,
            "heralded": a.heralded,
            "exclude_antibunched_noise": a.exclude_antibunched_noise,
        }))?,
    );
    let mut out = Outcome::new(
        art,
        extend(
            base_resolved(cfg, common),
            json!({ "relative_brightness": a.brightness, "component": component }),
        ),
    );
    out.report.push(match crossing {
        Some(b) => format!("purity falls below 0.40 at relative brightness {b}"),
        None => "purity stays at or above 0.40 over the sweep".into(),
    });
    Ok(out)
}

fn ring_bandwidth(cfg: &Config, source: &str) -> Result<f64> {
    let (_, spec) = cfg.circuit.require(source)?;
    match &spec.kind {
        ComponentKind::Ring(r) => Ok(r.ring.fwhm_bandwidth),
        _ => Err(CliError::Usage(format!(
            "filter-sweep needs a ring source, `{source}` is a {}",
            spec.kind_name()
        ))),
    }
}

fn filter(cfg: &Config, common: &Common, a: &FilterSweepArgs) -> Result<Outcome> {
    let source = need(&cfg.analysis.source, "source", cfg)?;
    let bw = ring_bandwidth(cfg, source)?;
    let configured = cfg.filter_bandwidth / bw;
    let mut widths = a.widths.clone();
    if widths.iter().any(|w| !(*w > 0.0)) {
        return Err(CliError::Usage("filter widths must be positive".into()));
    }
    if !widths.contains(&configured) {
        widths.push(configured);
    }
    widths.sort_by(|x, y| x.total_cmp(y));
    let sim = simulation(cfg, cfg.circuit.clone(), common)?;
    let s = filter_sweep(
        &sim,
        source,
        &widths,
        cfg.analysis.splitter.as_deref(),
        a.heralded,
        a.exclude_antibunched_noise,
    )?;
    let width_m: Vec<f64> = widths.iter().map(|w| w * bw).collect();
    let marked: Vec<f64> = widths
        .iter()
        .map(|w| if *w == configured { 1.0 } else { 0.0 })
        .collect();
    let mut art = Artifacts::default();
    art.push(
        "filter_sweep.csv",
        columns_csv(
            &[
                "width_linewidths",
                "width_m",
                "purity",
                "g2",
                "isolated_purity",
                "configured",
            ],
            &[
                &widths,
                &width_m,
                &s.purity,
                &s.g2,
                &s.isolated_purity,
                &marked,
            ],
        )?,
    );
    let at = widths.iter().position(|w| *w == configured).unwrap_or(0);
    art.push(
        "filter_sweep.json",
        json(&json!({
            "source": source,
            "source_bandwidth_m": bw,
            "configured_width_linewidths": configured,
            "configured_width_m": cfg.filter_bandwidth,
            "purity_at_configured_width": s.purity[at],
            "isolated_purity_at_configured_width": s.isolated_purity[at],
            "splitter_theta_rad": s.theta,
            "heralded": a.heralded,
        }))?,
    );
    Ok(Outcome::new(
        art,
        extend(
            base_resolved(cfg, common),
            json!({ "width_linewidths": widths.iter().map(|w| w.to_string()).collect::<Vec<_>>() }),
        ),
    ))
}

fn wavelengths_nm(omegas: &[f64]) -> Vec<f64> {
    omegas
        .iter()
        .map(|w| omega_to_wavelength(*w) * 1e9)
        .collect()
}

fn jsa_files(
    art: &mut Artifacts,
    stem: &str,
    a: &BiphotonAmplitude,
    grid: &SpectralGrid,
) -> Result<()> {
    let rows = wavelengths_nm(&grid.signal().omegas());
    let cols = wavelengths_nm(&grid.idler().omegas());
    let (ns, ni) = grid.shape();
    let take = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..ns)
            .map(|j| (0..ni).map(|k| f(j, k)).collect())
            .collect()
    };
    let mag = take(&|j, k| a.get(j, k).norm());
    let phase = take(&|j, k| a.get(j, k).arg());
    let corner = "signal_nm\\idler_nm";
    art.push(
        format!("{stem}_magnitude.csv"),
        matrix_csv(corner, &rows, &cols, &mag)?,
    );
    art.push(
        format!("{stem}_phase.csv"),
        matrix_csv(corner, &rows, &cols, &phase)?,
    );
    Ok(())
}

fn jsa(cfg: &Config, common: &Common, a: &JsaArgs) -> Result<Outcome> {
    let mut art = Artifacts::default();
    let summary;
    if let Some(port) = a.port {
        let sim = simulation(cfg, cfg.circuit.clone(), common)?;
        let (circuit, theta) = set_splitter(&sim, cfg, None)?;
        let trunc = match circuit.last_pump_dump() {
            Some(i) => circuit.truncated_after(i)?,
            None => circuit,
        };
        if port >= trunc.n_rails() {
            return Err(CliError::Usage(format!("no rail {port}")));
        }
        let state = assemble_with(&trunc, sim.library(), &sim.input()?)?;
        let p = port_jsa(&state, port, port)?;
        let stem = format!("jsa_port{port}");
        jsa_files(&mut art, &stem, &p.amplitude, sim.grid())?;
        let r = schmidt(&p.amplitude)?;
        summary = json!({
            "port": port,
            "splitter_theta_rad": theta,
            "pair_amplitude": p.weight,
            "purity": r.purity,
            "schmidt_number": r.schmidt_number,
        });
    } else {
        let id = match &a.component {
            Some(c) => c.as_str(),
            None => cfg.circuit.reference_source().ok_or_else(|| {
                CliError::Usage("no --component given and no reference_source".into())
            })?,
        };
        let (_, spec) = cfg.circuit.require(id)?;
        if !spec.is_nonlinear() {
            return Err(CliError::Usage(format!("`{id}` does not generate pairs")));
        }
        let sim = simulation(cfg, cfg.circuit.clone(), common)?;
        let amp = sim
            .library()
            .jsa_for(spec)
            .ok_or_else(|| CliError::Usage(format!("no amplitude for `{id}`")))?;
        jsa_files(&mut art, &format!("jsa_{id}"), &amp, sim.grid())?;
        let r = schmidt(&amp)?;
        summary = json!({
            "component": id,
            "kind": spec.kind_name(),
            "purity": r.purity,
            "schmidt_number": r.schmidt_number,
        });
    }
    art.push("jsa.json", json(&summary)?);
    Ok(Outcome::new(art, base_resolved(cfg, common)))
}

fn bell(cfg: &Config, common: &Common, a: &BellArgs) -> Result<Outcome> {
    let sources: Vec<String> = if a.sources.is_empty() {
        cfg.circuit
            .source_ids()
            .into_iter()
            .map(String::from)
            .collect()
    } else {
        a.sources.clone()
    };
    if sources.len() != 2 {
        return Err(CliError::Usage(format!(
            "bell needs exactly two sources, got {}",
            sources.len()
        )));
    }
    let base = if a.noise_free {
        cfg.circuit.noise_free()
    } else {
        cfg.circuit.clone()
    };
    let sim = simulation(cfg, base, common)?;
    let (circuit, theta) = set_splitter(&sim, cfg, None)?;
    let (fs, fi) = cfg.channel_filters()?;
    let mut rhos = Vec::new();
    for (k, s) in sources.iter().enumerate() {
        let other = &sources[1 - k];
        let c = circuit.with_stage(other, |x| x.set_generation_scale(0.0))?;
        let (trunc, port) = source_port(&c, s)?;
        let state = assemble_with(&trunc, sim.library(), &sim.input()?)?;
        rhos.push(SpectralDensity::heralded(
            &state, port, port, &fs, &fi, false,
        )?);
    }
    let r = bell_analysis(&rhos[0], &rhos[1])?;
    let re: Vec<Vec<f64>> = r
        .rho
        .iter()
        .map(|row| row.iter().map(|z| z.re).collect())
        .collect();
    let im: Vec<Vec<f64>> = r
        .rho
        .iter()
        .map(|row| row.iter().map(|z| z.im).collect())
        .collect();
    let mut art = Artifacts::default();
    art.push(
        "bell.json",
        json(&json!({
            "sources": sources,
            "splitter_theta_rad": theta,
            "source_purities": [rhos[0].purity(), rhos[1].purity()],
            "overlap": r.overlap,
            "coincidence_probability": r.coincidence_probability,
            "bunched_probability": r.bunched_probability,
            "singlet_fidelity": r.singlet_fidelity,
            "success_probability": r.success_probability,
            "rho_basis": ["00", "01", "10", "11"],
            "rho_real": re,
            "rho_imag": im,
            "rho_eigenvalues": r.rho_eigenvalues,
            "rho_purity": r.rho_purity(),
        }))?,
    );
    let mut out = Outcome::new(art, base_resolved(cfg, common));
    out.report.push(format!(
        "overlap {} success probability {}",
        r.overlap, r.success_probability
    ));
    Ok(out)
}

fn validate(cfg: &Config, common: &Common, a: &ValidateArgs) -> Result<Outcome> {
    let seeds: Vec<u64> = (1..=a.seeds).collect();
    let g2_seeds: Vec<u64> = seeds.iter().copied().take(G2_STATES as usize).collect();
    let grid = cfg.grid(a.oracle_grid, common.span)?;
    let circuit = cfg.circuit.clone();
    let pulse = cfg.pulse;
    let (mzi, (g2, circ)) = rayon::join(
        || validate_mzis(seeds.iter().copied()),
        || {
            rayon::join(
                || validate_g2(g2_seeds.iter().copied(), 3, 10),
                || validate_circuit(&circuit, &pulse, Arc::clone(&grid)),
            )
        },
    );
    let mut checks: Vec<ValidationCheck> = mzi?;
    checks.push(g2?);
    checks.extend(circ?);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    let rows: Vec<_> = checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "max_deviation": c.max_deviation,
                "tolerance": c.tolerance,
                "passed": c.passed,
            })
        })
        .collect();
    let mut art = Artifacts::default();
    art.push(
        "validate.json",
        json(&json!({
            "passed": failed.is_empty(),
            "mzi_seeds": seeds,
            "g2_seeds": g2_seeds,
            "oracle_grid_points": a.oracle_grid,
            "checks": rows,
        }))?,
    );
    let mut out = Outcome::new(
        art,
        extend(
            base_resolved(cfg, common),
            json!({ "oracle_grid_points": a.oracle_grid }),
        ),
    );
    out.seeds = seeds;
    out.report = checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: max deviation {:e} (tolerance {:e})",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance
            )
        })
        .collect();
    if !failed.is_empty() {
        out.failure = Some(failed.join(", "));
    }
    Ok(out)
}
