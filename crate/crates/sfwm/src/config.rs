//! Circuit description documents.
//!
//! A document is TOML with SI quantities carried in unit-suffixed fields:
//!
//! ```toml
//! rails = 2
//! pump_input = 0
//! reference_source = "ring"
//!
//! [pump]
//! center_wavelength_nm = 1550.0
//! bandwidth_pm = 260.0
//!
//! [[stages]]
//! kind = "ring"
//! id = "ring"
//! rail = 1
//! bandwidth_pm = 60.0
//! effective_length_um = 2000.0
//! ```
//!
//! Semantic errors are reported with the line and column of the offending
//! stage or field.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use sfwm_core::circuit::{
    CircuitModel, ComponentKind, ComponentSpec, Coupler, CouplerCoeffs, Mzi, PhaseShift, PumpDump,
    RingSource, Waveguide,
};
use sfwm_core::spectral::{
    FilterShape, FilterTarget, PumpPulse, PumpShape, RingParams, SpectralFilter, SpectralGrid,
};
use sfwm_core::units::{bandwidth_to_omega, ghz_to_omega, omega_to_wavelength};
use sfwm_core::Complex64;
use toml::Spanned;

/// Circuits shipped with the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "fig3_reference",
        include_str!("../circuits/fig3_reference.toml"),
    ),
    ("two_ring", include_str!("../circuits/two_ring.toml")),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, col)) => write!(f, "{}:{line}:{col}: {}", self.origin, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    rails: Spanned<usize>,
    #[serde(default)]
    pump_input: Option<Spanned<usize>>,
    #[serde(default)]
    reference_source: Option<Spanned<String>>,
    #[serde(default)]
    pump: RawPump,
    #[serde(default)]
    channels: RawChannels,
    #[serde(default)]
    filter: RawFilter,
    #[serde(default)]
    analysis: RawAnalysis,
    stages: Vec<Spanned<RawStage>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPump {
    center_wavelength_nm: Option<Spanned<f64>>,
    bandwidth_pm: Option<Spanned<f64>>,
    shape: Option<Spanned<String>>,
    effective_index: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannels {
    detuning_ghz: Option<Spanned<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    bandwidth_pm: Option<Spanned<f64>>,
    shape: Option<Spanned<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnalysis {
    splitter: Option<Spanned<String>>,
    phase: Option<Spanned<String>>,
    source: Option<Spanned<String>>,
    noise_component: Option<Spanned<String>>,
    output_ports: Option<Spanned<[usize; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStage {
    kind: Spanned<String>,
    id: Spanned<String>,
    rail: Option<Spanned<usize>>,
    rails: Option<Spanned<Vec<usize>>>,
    length_um: Option<Spanned<f64>>,
    t2: Option<Spanned<f64>>,
    theta_rad: Option<Spanned<f64>>,
    phi_rad: Option<Spanned<f64>>,
    r: Option<Spanned<f64>>,
    kappa: Option<Spanned<f64>>,
    t2_split: Option<Spanned<f64>>,
    bandwidth_pm: Option<Spanned<f64>>,
    effective_length_um: Option<Spanned<f64>>,
    arm_lengths_um: Option<Spanned<[f64; 2]>>,
    arm_t2: Option<Spanned<[f64; 2]>>,
    generation_scale: Option<Spanned<f64>>,
    /// Marks lengths and losses that were estimated rather than measured.
    #[serde(default)]
    estimate: bool,
    /// Free text for readers of the file.
    #[serde(default)]
    #[allow(dead_code)]
    note: Option<String>,
}

impl RawStage {
    fn present_fields(&self) -> Vec<(&'static str, Range<usize>)> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => {
                $(if let Some(v) = &self.$f {
                    out.push((stringify!($f), v.span()));
                })*
            };
        }
        check!(
            rail,
            rails,
            length_um,
            t2,
            theta_rad,
            phi_rad,
            r,
            kappa,
            t2_split,
            bandwidth_pm,
            effective_length_um,
            arm_lengths_um,
            arm_t2,
            generation_scale
        );
        out
    }
}

const SINGLE_RAIL_SOURCE: &[&str] = &["rail", "length_um", "t2", "generation_scale"];
const RING_FIELDS: &[&str] = &[
    "rail",
    "bandwidth_pm",
    "effective_length_um",
    "t2",
    "generation_scale",
];
const MZI_FIELDS: &[&str] = &[
    "rails",
    "theta_rad",
    "arm_lengths_um",
    "arm_t2",
    "r",
    "kappa",
    "t2_split",
    "generation_scale",
];
const PHASE_FIELDS: &[&str] = &["rails", "rail", "phi_rad"];
const COUPLER_FIELDS: &[&str] = &["rails", "r", "kappa", "t2_split"];
const DUMP_FIELDS: &[&str] = &["rails"];

/// Detection and analysis settings that accompany a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    /// MZI that divides the pump between sources.
    pub splitter: Option<String>,
    /// Phase shifter scanned for fringes.
    pub phase: Option<String>,
    /// Source whose purity is characterised.
    pub source: Option<String>,
    /// Default component for brightness sweeps.
    pub noise_component: Option<String>,
    pub output_ports: (usize, usize),
}

/// A parsed, validated circuit description.
#[derive(Debug, Clone)]
pub struct Config {
    pub origin: String,
    pub text: String,
    pub circuit: CircuitModel,
    pub pulse: PumpPulse,
    /// Signal/idler channel offset from the pump (rad/s).
    pub detuning: f64,
    /// Full width of the off-chip channel filters (m).
    pub filter_bandwidth: f64,
    pub filter_shape: FilterShape,
    pub analysis: Analysis,
    /// Ids of stages whose parameters are estimates.
    pub estimates: Vec<String>,
}

struct Ctx<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    fn err(&self, span: Option<Range<usize>>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            origin: self.origin.to_string(),
            position: span.map(|s| line_col(self.text, s.start)),
            message: message.into(),
        }
    }

    fn positive<T: Copy + Into<f64>>(
        &self,
        v: &Spanned<T>,
        what: &str,
    ) -> Result<f64, ConfigError> {
        let x: f64 = (*v.get_ref()).into();
        if !(x.is_finite() && x > 0.0) {
            return Err(self.err(Some(v.span()), format!("{what} must be positive, got {x}")));
        }
        Ok(x)
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.chars().count(), |i| before[i + 1..].chars().count())
        + 1;
    (line, col)
}

impl Config {
    /// Reads `name_or_path` from disk, or falls back to a bundled circuit of
    /// that name.
    pub fn load(name_or_path: &str) -> Result<Self, ConfigError> {
        let path = Path::new(name_or_path);
        if path.exists() {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                origin: name_or_path.to_string(),
                position: None,
                message: e.to_string(),
            })?;
            return Self::parse(&text, name_or_path);
        }
        match bundled(name_or_path) {
            Some(text) => Self::parse(text, name_or_path),
            None => Err(ConfigError {
                origin: name_or_path.to_string(),
                position: None,
                message: format!(
                    "no such file, and not a bundled circuit ({})",
                    BUNDLED
                        .iter()
                        .map(|(n, _)| *n)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            }),
        }
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cx = Ctx { origin, text };
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().trim().to_string();
            cx.err(e.span(), msg)
        })?;

        let wavelength = match &raw.pump.center_wavelength_nm {
            Some(v) => cx.positive(v, "center_wavelength_nm")? * 1e-9,
            None => 1550e-9,
        };
        let pump_bw = match &raw.pump.bandwidth_pm {
            Some(v) => cx.positive(v, "pump bandwidth_pm")? * 1e-12,
            None => 260e-12,
        };
        let shape = match &raw.pump.shape {
            None => PumpShape::Gaussian,
            Some(s) => match s.get_ref().as_str() {
                "gaussian" => PumpShape::Gaussian,
                "sech" => PumpShape::Sech,
                other => {
                    return Err(cx.err(
                        Some(s.span()),
                        format!("unknown pump shape `{other}` (gaussian, sech)"),
                    ))
                }
            },
        };
        let n_eff = match &raw.pump.effective_index {
            Some(v) => cx.positive(v, "effective_index")?,
            None => 2.4,
        };
        let k_p = 2.0 * PI * n_eff / wavelength;
        let pulse = PumpPulse::new(wavelength, pump_bw, shape, Complex64::new(1.0, 0.0))
            .map_err(|e| cx.err(None, e.to_string()))?;
        let detuning = match &raw.channels.detuning_ghz {
            Some(v) => ghz_to_omega(cx.positive(v, "detuning_ghz")?),
            None => ghz_to_omega(400.0),
        };
        let filter_bandwidth = match &raw.filter.bandwidth_pm {
            Some(v) => cx.positive(v, "filter bandwidth_pm")? * 1e-12,
            None => 1300e-12,
        };
        let filter_shape = match &raw.filter.shape {
            None => FilterShape::Rectangular,
            Some(s) => match s.get_ref().as_str() {
                "rectangular" => FilterShape::Rectangular,
                "gaussian" => FilterShape::Gaussian,
                other => {
                    return Err(cx.err(
                        Some(s.span()),
                        format!("unknown filter shape `{other}` (rectangular, gaussian)"),
                    ))
                }
            },
        };

        let n_rails = *raw.rails.get_ref();
        if n_rails == 0 {
            return Err(cx.err(Some(raw.rails.span()), "rails must be at least 1"));
        }
        let rail_ok = |r: usize, span: Range<usize>| {
            if r >= n_rails {
                Err(cx.err(
                    Some(span),
                    format!("rail {r} out of range (circuit has {n_rails} rails)"),
                ))
            } else {
                Ok(r)
            }
        };
        let pump_input = match &raw.pump_input {
            Some(p) => rail_ok(*p.get_ref(), p.span())?,
            None => 0,
        };

        let pump_omega = pulse.center_omega();
        let mut stages = Vec::with_capacity(raw.stages.len());
        let mut estimates = Vec::new();
        let mut seen: Vec<(&str, Range<usize>)> = Vec::new();
        for st in &raw.stages {
            let s = st.get_ref();
            let id = s.id.get_ref().as_str();
            if id.is_empty() {
                return Err(cx.err(Some(s.id.span()), "stage id must not be empty"));
            }
            if let Some((_, first)) = seen.iter().find(|(o, _)| *o == id) {
                let (l, c) = line_col(text, first.start);
                return Err(cx.err(
                    Some(s.id.span()),
                    format!("duplicate stage id `{id}` (first defined at {l}:{c})"),
                ));
            }
            seen.push((id, s.id.span()));
            let kind = s.kind.get_ref().as_str();
            let allowed = match kind {
                "waveguide" | "spiral" => SINGLE_RAIL_SOURCE,
                "ring" => RING_FIELDS,
                "mzi" => MZI_FIELDS,
                "phase" => PHASE_FIELDS,
                "coupler" => COUPLER_FIELDS,
                "pump_dump" => DUMP_FIELDS,
                other => {
                    return Err(cx.err(
                        Some(s.kind.span()),
                        format!(
                            "stage `{id}`: unknown kind `{other}` \
                             (waveguide, spiral, ring, mzi, phase, coupler, pump_dump)"
                        ),
                    ))
                }
            };
            for (field, span) in s.present_fields() {
                if !allowed.contains(&field) {
                    return Err(cx.err(
                        Some(span),
                        format!("stage `{id}`: field `{field}` does not apply to a {kind} stage"),
                    ));
                }
            }
            let stage_err = |span: Option<Range<usize>>, msg: String| {
                cx.err(span.or(Some(st.span())), format!("stage `{id}`: {msg}"))
            };
            let need_f64 = |v: &Option<Spanned<f64>>, name: &str| {
                v.as_ref()
                    .map(|x| *x.get_ref())
                    .ok_or_else(|| stage_err(None, format!("missing `{name}`")))
            };
            let fraction = |v: &Option<Spanned<f64>>, name: &str, default: f64| match v {
                None => Ok(default),
                Some(x) => {
                    let t = *x.get_ref();
                    if (0.0..=1.0).contains(&t) {
                        Ok(t)
                    } else {
                        Err(stage_err(
                            Some(x.span()),
                            format!("`{name}` = {t} outside [0, 1]"),
                        ))
                    }
                }
            };
            let non_negative = |v: &Option<Spanned<f64>>, name: &str| -> Result<(), ConfigError> {
                if let Some(x) = v {
                    let t = *x.get_ref();
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(stage_err(
                            Some(x.span()),
                            format!("`{name}` must be finite and non-negative, got {t}"),
                        ));
                    }
                }
                Ok(())
            };
            let one_rail = || -> Result<usize, ConfigError> {
                match &s.rail {
                    Some(r) => rail_ok(*r.get_ref(), r.span()),
                    None => Err(stage_err(None, "missing `rail`".into())),
                }
            };
            let rail_list = || -> Result<Vec<usize>, ConfigError> {
                match (&s.rails, &s.rail) {
                    (Some(rs), _) => {
                        if rs.get_ref().is_empty() {
                            return Err(stage_err(Some(rs.span()), "`rails` is empty".into()));
                        }
                        rs.get_ref()
                            .iter()
                            .map(|&r| rail_ok(r, rs.span()))
                            .collect()
                    }
                    (None, Some(r)) => Ok(vec![rail_ok(*r.get_ref(), r.span())?]),
                    (None, None) => Err(stage_err(None, "missing `rails`".into())),
                }
            };
            let rail_pair = || -> Result<(usize, usize), ConfigError> {
                let rs = rail_list()?;
                match rs.as_slice() {
                    [a, b] if a != b => Ok((*a, *b)),
                    _ => Err(stage_err(
                        s.rails.as_ref().map(|r| r.span()),
                        "`rails` must name two distinct rails".into(),
                    )),
                }
            };
            let coupler = || -> Result<CouplerCoeffs, ConfigError> {
                let span =
                    s.r.as_ref()
                        .or(s.kappa.as_ref())
                        .or(s.t2_split.as_ref())
                        .map(|x| x.span());
                non_negative(&s.r, "r")?;
                non_negative(&s.kappa, "kappa")?;
                let t2_split = fraction(&s.t2_split, "t2_split", 1.0)?;
                let c = match (&s.r, &s.kappa) {
                    (None, None) => CouplerCoeffs::from_split(0.5, t2_split),
                    (Some(r), Some(k)) => {
                        let (r, k) = (*r.get_ref(), *k.get_ref());
                        let t = if s.t2_split.is_some() {
                            t2_split
                        } else {
                            // Decimal 1/√2 squares to just above 1/2.
                            let sum = r * r + k * k;
                            if sum > 1.0 && sum - 1.0 < 1e-12 {
                                1.0
                            } else {
                                sum
                            }
                        };
                        CouplerCoeffs::new(r, k, t)
                    }
                    (Some(r), None) => {
                        let r = *r.get_ref();
                        CouplerCoeffs::new(r, (t2_split - r * r).max(0.0).sqrt(), t2_split)
                    }
                    (None, Some(k)) => {
                        let k = *k.get_ref();
                        CouplerCoeffs::new((t2_split - k * k).max(0.0).sqrt(), k, t2_split)
                    }
                };
                c.map_err(|e| stage_err(span, e.to_string()))
            };
            non_negative(&s.length_um, "length_um")?;
            non_negative(&s.effective_length_um, "effective_length_um")?;
            non_negative(&s.generation_scale, "generation_scale")?;
            let scale = s.generation_scale.as_ref().map_or(1.0, |x| *x.get_ref());
            let component = match kind {
                "waveguide" | "spiral" => {
                    let rail = one_rail()?;
                    let length = need_f64(&s.length_um, "length_um")? * 1e-6;
                    let t2 = fraction(&s.t2, "t2", 1.0)?;
                    let mut w = if kind == "spiral" {
                        Waveguide::spiral(rail, length, t2, k_p)
                    } else {
                        Waveguide::routing(rail, length, t2, k_p)
                    };
                    w.generation_scale = scale;
                    ComponentKind::Waveguide(w)
                }
                "ring" => {
                    let rail = one_rail()?;
                    let bw = match &s.bandwidth_pm {
                        Some(v) => cx.positive(v, "bandwidth_pm")? * 1e-12,
                        None => return Err(stage_err(None, "missing `bandwidth_pm`".into())),
                    };
                    let lenf = need_f64(&s.effective_length_um, "effective_length_um")? * 1e-6;
                    let t2 = fraction(&s.t2, "t2", 1.0)?;
                    let ring = RingParams::on_channels(pump_omega, detuning, bw)
                        .map_err(|e| stage_err(None, e.to_string()))?;
                    let mut r = RingSource::new(rail, ring, lenf, t2);
                    r.generation_scale = scale;
                    ComponentKind::Ring(r)
                }
                "mzi" => {
                    let rails = rail_pair()?;
                    let theta = s.theta_rad.as_ref().map_or(0.0, |x| *x.get_ref());
                    let arms = match &s.arm_lengths_um {
                        Some(a) => {
                            let [l1, l2] = *a.get_ref();
                            if !(l1 >= 0.0 && l2 >= 0.0 && l1.is_finite() && l2.is_finite()) {
                                return Err(stage_err(
                                    Some(a.span()),
                                    "arm lengths must be finite and non-negative".into(),
                                ));
                            }
                            [l1 * 1e-6, l2 * 1e-6]
                        }
                        None => [0.0, 0.0],
                    };
                    let mut m = Mzi::new(rails, theta, arms, coupler()?, k_p);
                    if let Some(t) = &s.arm_t2 {
                        let [a, b] = *t.get_ref();
                        if !((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)) {
                            return Err(stage_err(
                                Some(t.span()),
                                "arm transmissions must lie in [0, 1]".into(),
                            ));
                        }
                        m.arm_t2 = [a, b];
                    }
                    m.generation_scale = scale;
                    ComponentKind::Mzi(m)
                }
                "phase" => ComponentKind::Phase(PhaseShift {
                    rails: rail_list()?,
                    phi: s.phi_rad.as_ref().map_or(0.0, |x| *x.get_ref()),
                }),
                "coupler" => ComponentKind::Coupler(Coupler {
                    rails: rail_pair()?,
                    coeffs: coupler()?,
                }),
                "pump_dump" => ComponentKind::PumpDump(PumpDump {
                    rails: rail_list()?,
                }),
                _ => unreachable!(),
            };
            if s.estimate {
                estimates.push(id.to_string());
            }
            stages.push(ComponentSpec::new(id, component));
        }

        let reference = raw.reference_source.as_ref().map(|r| r.get_ref().clone());
        let circuit = CircuitModel::new(n_rails, pump_input, stages, reference).map_err(|e| {
            // Point at the stage the message names, if any.
            let span = raw
                .stages
                .iter()
                .find(|s| {
                    e.to_string()
                        .contains(&format!("`{}`", s.get_ref().id.get_ref()))
                })
                .map(|s| s.span())
                .or_else(|| raw.reference_source.as_ref().map(|r| r.span()));
            cx.err(span, e.to_string())
        })?;

        let check_stage = |v: &Option<Spanned<String>>,
                           what: &str,
                           want: fn(&ComponentKind) -> bool,
                           kind: &str|
         -> Result<Option<String>, ConfigError> {
            let Some(v) = v else { return Ok(None) };
            let id = v.get_ref();
            match circuit.find(id) {
                None => Err(cx.err(Some(v.span()), format!("analysis.{what}: no stage `{id}`"))),
                Some((_, s)) if !want(&s.kind) => Err(cx.err(
                    Some(v.span()),
                    format!("analysis.{what}: `{id}` is not a {kind}"),
                )),
                Some(_) => Ok(Some(id.clone())),
            }
        };
        let analysis = Analysis {
            splitter: check_stage(
                &raw.analysis.splitter,
                "splitter",
                |k| matches!(k, ComponentKind::Mzi(_)),
                "mzi",
            )?,
            phase: check_stage(
                &raw.analysis.phase,
                "phase",
                |k| matches!(k, ComponentKind::Phase(_)),
                "phase stage",
            )?,
            source: check_stage(
                &raw.analysis.source,
                "source",
                |k| matches!(k, ComponentKind::Ring(_) | ComponentKind::Waveguide(_)),
                "source",
            )?
            .or_else(|| circuit.reference_source().map(str::to_string)),
            noise_component: check_stage(
                &raw.analysis.noise_component,
                "noise_component",
                |k| {
                    matches!(
                        k,
                        ComponentKind::Waveguide(_)
                            | ComponentKind::Mzi(_)
                            | ComponentKind::Ring(_)
                    )
                },
                "nonlinear component",
            )?,
            output_ports: match &raw.analysis.output_ports {
                None => (0, 1.min(n_rails - 1)),
                Some(p) => {
                    let [a, b] = *p.get_ref();
                    rail_ok(a, p.span())?;
                    rail_ok(b, p.span())?;
                    (a, b)
                }
            },
        };

        Ok(Self {
            origin: origin.to_string(),
            text: text.to_string(),
            circuit,
            pulse,
            detuning,
            filter_bandwidth,
            filter_shape,
            analysis,
            estimates,
        })
    }

    /// Grid of `n × n` points centred on the signal and idler channels,
    /// spanning `± span` pump FWHM.
    pub fn grid(&self, n: usize, span: f64) -> sfwm_core::Result<Arc<SpectralGrid>> {
        Ok(Arc::new(SpectralGrid::around_pump(
            &self.pulse,
            self.detuning,
            span,
            n,
        )?))
    }

    pub fn signal_omega(&self) -> f64 {
        self.pulse.center_omega() + self.detuning
    }

    pub fn idler_omega(&self) -> f64 {
        self.pulse.center_omega() - self.detuning
    }

    /// Off-chip channel filters on the signal and idler.
    pub fn channel_filters(&self) -> sfwm_core::Result<(SpectralFilter, SpectralFilter)> {
        let make = |center: f64, target| {
            let width = bandwidth_to_omega(self.filter_bandwidth, omega_to_wavelength(center));
            SpectralFilter::new(center, width, self.filter_shape, target)
        };
        Ok((
            make(self.signal_omega(), FilterTarget::Signal)?,
            make(self.idler_omega(), FilterTarget::Idler)?,
        ))
    }
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
rails = 1

[[stages]]
kind = "waveguide"
id = "wg"
rail = 0
length_um = 100
"#;

    #[test]
    fn integers_are_accepted_for_lengths() {
        let c = Config::parse(MINIMAL, "t").unwrap();
        let ComponentKind::Waveguide(w) = &c.circuit.stages()[0].kind else {
            panic!()
        };
        assert!((w.length - 1e-4).abs() < 1e-18);
        assert_eq!(w.t2, 1.0);
    }

    #[test]
    fn positions_are_one_based() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn misplaced_field_is_located() {
        let text = MINIMAL.replace("length_um = 100", "length_um = 100\nphi_rad = 1.0");
        let e = Config::parse(&text, "t").unwrap_err();
        assert_eq!(e.position, Some((9, 11)));
        assert!(e.message.contains("`phi_rad`"), "{e}");
    }

    #[test]
    fn bundled_circuits_parse() {
        for (name, text) in BUNDLED {
            Config::parse(text, name).unwrap();
        }
    }
}
