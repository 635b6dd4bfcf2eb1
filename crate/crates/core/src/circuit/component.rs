use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::spectral::{BiphotonAmplitude, RingParams};
use crate::{Error, Result};

const COUPLER_TOL: f64 = 1e-12;

/// Amplitude coefficients of a (possibly lossy) directional coupler:
/// bar amplitude `r`, cross amplitude `iκ`, with r² + κ² = T²_split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerCoeffs {
    r: f64,
    kappa: f64,
    t2_split: f64,
}

impl CouplerCoeffs {
    pub fn new(r: f64, kappa: f64, t2_split: f64) -> Result<Self> {
        if !r.is_finite() || !kappa.is_finite() || !t2_split.is_finite() {
            return Err(Error::NonFinite("coupler coefficients"));
        }
        if r < 0.0 || kappa < 0.0 {
            return Err(Error::param("coupler", "r and kappa must be non-negative"));
        }
        if !(0.0..=1.0).contains(&t2_split) {
            return Err(Error::param(
                "coupler t2_split",
                format!("{t2_split} outside [0, 1]"),
            ));
        }
        let sum = r * r + kappa * kappa;
        if (sum - t2_split).abs() > COUPLER_TOL {
            return Err(Error::param(
                "coupler",
                format!("r² + κ² = {sum} does not match t2_split = {t2_split}"),
            ));
        }
        Ok(Self { r, kappa, t2_split })
    }

    /// Lossless 50:50 coupler.
    pub fn balanced() -> Self {
        Self {
            r: FRAC_1_SQRT_2,
            kappa: FRAC_1_SQRT_2,
            t2_split: 1.0,
        }
    }

    /// Coupler sending a power fraction `bar` straight through, with insertion
    /// transmission `t2_split`.
    pub fn from_split(bar: f64, t2_split: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&bar) {
            return Err(Error::param(
                "coupler split",
                format!("{bar} outside [0, 1]"),
            ));
        }
        let r = libm::sqrt(t2_split * bar);
        let kappa = libm::sqrt(t2_split * (1.0 - bar));
        Self::new(r, kappa, t2_split)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn t2_split(&self) -> f64 {
        self.t2_split
    }

    /// [[r, iκ], [iκ, r]] indexed `[out][in]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let r = Complex64::new(self.r, 0.0);
        let k = Complex64::new(0.0, self.kappa);
        [[r, k], [k, r]]
    }
}

/// Loss-adjusted interaction length L′ = L·T².
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EffectiveLength(f64);

impl EffectiveLength {
    pub fn new(length: f64, t2: f64) -> Self {
        Self(length * t2)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveguideRole {
    Routing,
    /// A waveguide deliberately used as a pair source.
    Spiral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveguide {
    pub rail: usize,
    /// Geometric length (m).
    pub length: f64,
    /// Power transmission T².
    pub t2: f64,
    /// Pump propagation constant (1/m).
    pub k_p: f64,
    pub role: WaveguideRole,
    /// Multiplier on the generation strength only (not on loss or phase).
    pub generation_scale: f64,
}

impl Waveguide {
    pub fn routing(rail: usize, length: f64, t2: f64, k_p: f64) -> Self {
        Self {
            rail,
            length,
            t2,
            k_p,
            role: WaveguideRole::Routing,
            generation_scale: 1.0,
        }
    }

    pub fn spiral(rail: usize, length: f64, t2: f64, k_p: f64) -> Self {
        Self {
            role: WaveguideRole::Spiral,
            ..Self::routing(rail, length, t2, k_p)
        }
    }

    pub fn effective_length(&self) -> EffectiveLength {
        EffectiveLength::new(self.length, self.t2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingSource {
    pub rail: usize,
    pub ring: RingParams,
    /// Length of straight waveguide with the same pair brightness (m).
    pub effective_length: f64,
    pub t2: f64,
    pub generation_scale: f64,
}

impl RingSource {
    pub fn new(rail: usize, ring: RingParams, effective_length: f64, t2: f64) -> Self {
        Self {
            rail,
            ring,
            effective_length,
            t2,
            generation_scale: 1.0,
        }
    }

    pub fn lprime(&self) -> EffectiveLength {
        EffectiveLength::new(self.effective_length, self.t2)
    }
}

/// Mach-Zehnder interferometer: coupler, two arms (phase θ on the upper arm),
/// identical second coupler.
#[derive(Debug, Clone, PartialEq)]
pub struct Mzi {
    /// (upper, lower) rails.
    pub rails: (usize, usize),
    pub theta: f64,
    pub arm_lengths: [f64; 2],
    pub arm_t2: [f64; 2],
    pub coupler: CouplerCoeffs,
    pub k_p: f64,
    pub generation_scale: f64,
}

impl Mzi {
    pub fn new(
        rails: (usize, usize),
        theta: f64,
        arm_lengths: [f64; 2],
        coupler: CouplerCoeffs,
        k_p: f64,
    ) -> Self {
        Self {
            rails,
            theta,
            arm_lengths,
            arm_t2: [1.0, 1.0],
            coupler,
            k_p,
            generation_scale: 1.0,
        }
    }

    pub fn arm_lprime(&self, arm: usize) -> EffectiveLength {
        EffectiveLength::new(self.arm_lengths[arm], self.arm_t2[arm])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShift {
    pub rails: Vec<usize>,
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coupler {
    pub rails: (usize, usize),
    pub coeffs: CouplerCoeffs,
}

/// Ideal pump removal: the pump is extinguished, generated photons pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpDump {
    pub rails: Vec<usize>,
}

/// Pair source with a caller-supplied joint spectral amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomSource {
    pub rail: usize,
    pub jsa: Arc<BiphotonAmplitude>,
    pub effective_length: f64,
    pub t2: f64,
    pub generation_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ComponentKind {
    Waveguide(Waveguide),
    Ring(RingSource),
    Mzi(Mzi),
    Phase(PhaseShift),
    Coupler(Coupler),
    PumpDump(PumpDump),
    Custom(CustomSource),
}

/// Whether a pair was produced by a designated source or elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairClass {
    Source,
    Spurious,
}

/// One stage of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpec {
    pub id: String,
    pub kind: ComponentKind,
}

impl ComponentSpec {
    pub fn new(id: impl Into<String>, kind: ComponentKind) -> Self {
        Self {
            id: id.into(),
            kind,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            ComponentKind::Waveguide(w) if w.role == WaveguideRole::Spiral => "spiral",
            ComponentKind::Waveguide(_) => "waveguide",
            ComponentKind::Ring(_) => "ring",
            ComponentKind::Mzi(_) => "mzi",
            ComponentKind::Phase(_) => "phase",
            ComponentKind::Coupler(_) => "coupler",
            ComponentKind::PumpDump(_) => "pump_dump",
            ComponentKind::Custom(_) => "source",
        }
    }

    /// Rails the stage acts on.
    pub fn rails(&self) -> Vec<usize> {
        match &self.kind {
            ComponentKind::Waveguide(w) => alloc::vec![w.rail],
            ComponentKind::Ring(r) => alloc::vec![r.rail],
            ComponentKind::Custom(c) => alloc::vec![c.rail],
            ComponentKind::Mzi(m) => alloc::vec![m.rails.0, m.rails.1],
            ComponentKind::Coupler(c) => alloc::vec![c.rails.0, c.rails.1],
            ComponentKind::Phase(p) => p.rails.clone(),
            ComponentKind::PumpDump(d) => d.rails.clone(),
        }
    }

    pub fn is_source(&self) -> bool {
        match &self.kind {
            ComponentKind::Waveguide(w) => w.role == WaveguideRole::Spiral,
            ComponentKind::Ring(_) | ComponentKind::Custom(_) => true,
            _ => false,
        }
    }

    /// Whether the component can generate pairs when pumped.
    pub fn is_nonlinear(&self) -> bool {
        matches!(
            self.kind,
            ComponentKind::Waveguide(_)
                | ComponentKind::Ring(_)
                | ComponentKind::Mzi(_)
                | ComponentKind::Custom(_)
        )
    }

    pub fn pair_class(&self) -> PairClass {
        if self.is_source() {
            PairClass::Source
        } else {
            PairClass::Spurious
        }
    }

    pub fn generation_scale(&self) -> Option<f64> {
        match &self.kind {
            ComponentKind::Waveguide(w) => Some(w.generation_scale),
            ComponentKind::Ring(r) => Some(r.generation_scale),
            ComponentKind::Mzi(m) => Some(m.generation_scale),
            ComponentKind::Custom(c) => Some(c.generation_scale),
            _ => None,
        }
    }

    /// Sets the generation multiplier; ignored for linear components.
    pub fn set_generation_scale(&mut self, scale: f64) {
        match &mut self.kind {
            ComponentKind::Waveguide(w) => w.generation_scale = scale,
            ComponentKind::Ring(r) => r.generation_scale = scale,
            ComponentKind::Mzi(m) => m.generation_scale = scale,
            ComponentKind::Custom(c) => c.generation_scale = scale,
            _ => {}
        }
    }

    pub(crate) fn validate(&self, n_rails: usize) -> Result<()> {
        let bad = |what: String| {
            Err(Error::InvalidCircuit(format!(
                "stage `{}`: {what}",
                self.id
            )))
        };
        for r in self.rails() {
            if r >= n_rails {
                return bad(format!(
                    "rail {r} out of range (circuit has {n_rails} rails)"
                ));
            }
        }
        let check_t2 = |name: &str, t2: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&t2) {
                return bad(format!("{name} = {t2} outside [0, 1]"));
            }
            Ok(())
        };
        let check_len = |name: &str, l: f64| -> Result<()> {
            if !l.is_finite() || l < 0.0 {
                return bad(format!("{name} = {l} must be a non-negative length"));
            }
            Ok(())
        };
        if let Some(s) = self.generation_scale() {
            if !s.is_finite() || s < 0.0 {
                return bad(format!("generation_scale = {s} must be non-negative"));
            }
        }
        match &self.kind {
            ComponentKind::Waveguide(w) => {
                check_len("length", w.length)?;
                check_t2("t2", w.t2)?;
                if !w.k_p.is_finite() {
                    return bad("non-finite pump wavenumber".into());
                }
            }
            ComponentKind::Ring(r) => {
                check_len("effective_length", r.effective_length)?;
                check_t2("t2", r.t2)?;
            }
            ComponentKind::Custom(c) => {
                check_len("effective_length", c.effective_length)?;
                check_t2("t2", c.t2)?;
                c.jsa.check_normalized()?;
            }
            ComponentKind::Mzi(m) => {
                if m.rails.0 == m.rails.1 {
                    return bad("MZI rails must differ".into());
                }
                check_len("arm length 1", m.arm_lengths[0])?;
                check_len("arm length 2", m.arm_lengths[1])?;
                check_t2("arm t2 1", m.arm_t2[0])?;
                check_t2("arm t2 2", m.arm_t2[1])?;
                if !m.theta.is_finite() || !m.k_p.is_finite() {
                    return bad("non-finite theta or wavenumber".into());
                }
            }
            ComponentKind::Coupler(c) => {
                if c.rails.0 == c.rails.1 {
                    return bad("coupler rails must differ".into());
                }
            }
            ComponentKind::Phase(p) => {
                if p.rails.is_empty() {
                    return bad("phase shifter needs at least one rail".into());
                }
                if !p.phi.is_finite() {
                    return bad("non-finite phi".into());
                }
            }
            ComponentKind::PumpDump(d) => {
                if d.rails.is_empty() {
                    return bad("pump dump needs at least one rail".into());
                }
            }
        }
        let rails = self.rails();
        for (i, a) in rails.iter().enumerate() {
            if rails[..i].contains(a) {
                return bad(format!("rail {a} listed twice"));
            }
        }
        Ok(())
    }
}
