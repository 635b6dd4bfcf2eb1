use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::component::{ComponentKind, ComponentSpec};
use super::mzi::mzi_transfer;
use crate::linalg::RailMatrix;
use crate::{Error, Result};

/// A validated, strictly sequential list of stages on `n_rails` rails.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitModel {
    n_rails: usize,
    pump_input: usize,
    stages: Vec<ComponentSpec>,
    reference_source: Option<String>,
}

impl CircuitModel {
    pub fn new(
        n_rails: usize,
        pump_input: usize,
        stages: Vec<ComponentSpec>,
        reference_source: Option<String>,
    ) -> Result<Self> {
        let c = Self {
            n_rails,
            pump_input,
            stages,
            reference_source,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.n_rails == 0 {
            return Err(Error::InvalidCircuit(
                "circuit needs at least one rail".into(),
            ));
        }
        if self.pump_input >= self.n_rails {
            return Err(Error::InvalidCircuit(format!(
                "pump input rail {} out of range (circuit has {} rails)",
                self.pump_input, self.n_rails
            )));
        }
        let mut dumped = vec![false; self.n_rails];
        for (i, s) in self.stages.iter().enumerate() {
            if s.id.is_empty() {
                return Err(Error::InvalidCircuit(format!("stage {i} has an empty id")));
            }
            if self.stages[..i].iter().any(|o| o.id == s.id) {
                return Err(Error::InvalidCircuit(format!(
                    "duplicate stage id `{}`",
                    s.id
                )));
            }
            s.validate(self.n_rails)?;
            let rails = s.rails();
            match &s.kind {
                ComponentKind::PumpDump(_) => {
                    for &r in &rails {
                        if dumped[r] {
                            return Err(Error::InvalidCircuit(format!(
                                "stage `{}`: pump already removed from rail {r}",
                                s.id
                            )));
                        }
                        dumped[r] = true;
                    }
                }
                ComponentKind::Mzi(_) | ComponentKind::Coupler(_)
                    if dumped[rails[0]] != dumped[rails[1]] =>
                {
                    return Err(Error::InvalidCircuit(format!(
                        "stage `{}` mixes a pump-dumped rail with a pumped one",
                        s.id
                    )));
                }
                _ => {}
            }
            if s.is_source() && rails.iter().any(|&r| dumped[r]) {
                return Err(Error::InvalidCircuit(format!(
                    "source `{}` sits after the pump was removed from its rail",
                    s.id
                )));
            }
        }
        if let Some(id) = &self.reference_source {
            match self.find(id) {
                Some((_, s)) if s.is_source() => {}
                Some(_) => {
                    return Err(Error::InvalidCircuit(format!(
                        "reference `{id}` is not a pair source"
                    )));
                }
                None => return Err(Error::UnknownComponent(id.clone())),
            }
        }
        Ok(())
    }

    pub fn n_rails(&self) -> usize {
        self.n_rails
    }

    pub fn pump_input(&self) -> usize {
        self.pump_input
    }

    pub fn stages(&self) -> &[ComponentSpec] {
        &self.stages
    }

    pub fn reference_source(&self) -> Option<&str> {
        self.reference_source.as_deref()
    }

    pub fn find(&self, id: &str) -> Option<(usize, &ComponentSpec)> {
        self.stages.iter().enumerate().find(|(_, s)| s.id == id)
    }

    pub fn require(&self, id: &str) -> Result<(usize, &ComponentSpec)> {
        self.find(id)
            .ok_or_else(|| Error::UnknownComponent(id.into()))
    }

    /// Copy with one stage edited; the result is revalidated.
    pub fn with_stage(&self, id: &str, edit: impl FnOnce(&mut ComponentSpec)) -> Result<Self> {
        let (i, _) = self.require(id)?;
        let mut c = self.clone();
        edit(&mut c.stages[i]);
        c.validate()?;
        Ok(c)
    }

    /// Sets the phase of a phase-shifter stage.
    pub fn with_phase(&self, id: &str, phi: f64) -> Result<Self> {
        let (_, s) = self.require(id)?;
        if !matches!(s.kind, ComponentKind::Phase(_)) {
            return Err(Error::InvalidCircuit(format!(
                "`{id}` is not a phase shifter"
            )));
        }
        self.with_stage(id, |s| {
            if let ComponentKind::Phase(p) = &mut s.kind {
                p.phi = phi;
            }
        })
    }

    /// Sets θ of an MZI stage.
    pub fn with_theta(&self, id: &str, theta: f64) -> Result<Self> {
        let (_, s) = self.require(id)?;
        if !matches!(s.kind, ComponentKind::Mzi(_)) {
            return Err(Error::InvalidCircuit(format!("`{id}` is not an MZI")));
        }
        self.with_stage(id, |s| {
            if let ComponentKind::Mzi(m) = &mut s.kind {
                m.theta = theta;
            }
        })
    }

    /// Copy in which only designated sources generate pairs.
    pub fn noise_free(&self) -> Self {
        let mut c = self.clone();
        for s in &mut c.stages {
            if !s.is_source() {
                s.set_generation_scale(0.0);
            }
        }
        c
    }

    /// Copy in which only the stage `id` generates pairs.
    pub fn isolate_generation(&self, id: &str) -> Result<Self> {
        self.require(id)?;
        let mut c = self.clone();
        for s in &mut c.stages {
            if s.id != id {
                s.set_generation_scale(0.0);
            }
        }
        Ok(c)
    }

    /// Copy truncated after stage index `last` (inclusive).
    pub fn truncated_after(&self, last: usize) -> Result<Self> {
        let mut c = self.clone();
        c.stages.truncate(last + 1);
        c.validate()?;
        Ok(c)
    }

    pub fn last_pump_dump(&self) -> Option<usize> {
        self.stages
            .iter()
            .rposition(|s| matches!(s.kind, ComponentKind::PumpDump(_)))
    }

    pub fn source_ids(&self) -> Vec<&str> {
        self.stages
            .iter()
            .filter(|s| s.is_source())
            .map(|s| s.id.as_str())
            .collect()
    }

    /// Linear transfer of generated photons through stage `index`.
    pub fn photon_transfer(&self, index: usize) -> RailMatrix {
        stage_matrix(&self.stages[index], self.n_rails, false)
    }

    /// Linear transfer of the pump through stage `index`.
    pub fn pump_transfer(&self, index: usize) -> RailMatrix {
        stage_matrix(&self.stages[index], self.n_rails, true)
    }
}

fn stage_matrix(spec: &ComponentSpec, n: usize, pump: bool) -> RailMatrix {
    let mut m = RailMatrix::identity(n);
    match &spec.kind {
        ComponentKind::Waveguide(w) => {
            m[(w.rail, w.rail)] = Complex64::from_polar(libm::sqrt(w.t2), w.k_p * w.length);
        }
        ComponentKind::Ring(r) => m[(r.rail, r.rail)] = Complex64::new(libm::sqrt(r.t2), 0.0),
        ComponentKind::Custom(c) => m[(c.rail, c.rail)] = Complex64::new(libm::sqrt(c.t2), 0.0),
        ComponentKind::Mzi(z) => m = RailMatrix::embed_2x2(n, z.rails, mzi_transfer(z, z.k_p)),
        ComponentKind::Coupler(c) => m = RailMatrix::embed_2x2(n, c.rails, c.coeffs.matrix()),
        ComponentKind::Phase(p) => {
            for &r in &p.rails {
                m[(r, r)] = Complex64::from_polar(1.0, p.phi);
            }
        }
        ComponentKind::PumpDump(d) => {
            if pump {
                for &r in &d.rails {
                    m[(r, r)] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }
    m
}

/// Complex pump amplitude on every rail.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpState(Vec<Complex64>);

impl PumpState {
    pub fn single(n_rails: usize, rail: usize, amplitude: Complex64) -> Result<Self> {
        if rail >= n_rails {
            return Err(Error::RailMismatch {
                expected: n_rails,
                found: rail + 1,
            });
        }
        let mut v = vec![Complex64::new(0.0, 0.0); n_rails];
        v[rail] = amplitude;
        Ok(Self(v))
    }

    pub fn from_amplitudes(v: Vec<Complex64>) -> Self {
        Self(v)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn power(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Pump amplitudes entering each stage; the final entry is the circuit output.
pub fn propagate_pump(circuit: &CircuitModel, input: &PumpState) -> Result<Vec<PumpState>> {
    if input.0.len() != circuit.n_rails {
        return Err(Error::RailMismatch {
            expected: circuit.n_rails,
            found: input.0.len(),
        });
    }
    let mut trace = Vec::with_capacity(circuit.stages.len() + 1);
    trace.push(input.clone());
    for i in 0..circuit.stages.len() {
        let next = circuit.pump_transfer(i).apply(&trace[i].0);
        trace.push(PumpState(next));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Coupler, CouplerCoeffs, PumpDump, Waveguide};

    fn wg(id: &str, rail: usize) -> ComponentSpec {
        ComponentSpec::new(
            id,
            ComponentKind::Waveguide(Waveguide::routing(rail, 1e-3, 0.9, 0.0)),
        )
    }

    fn dump(id: &str, rails: Vec<usize>) -> ComponentSpec {
        ComponentSpec::new(id, ComponentKind::PumpDump(PumpDump { rails }))
    }

    fn coupler(id: &str) -> ComponentSpec {
        ComponentSpec::new(
            id,
            ComponentKind::Coupler(Coupler {
                rails: (0, 1),
                coeffs: CouplerCoeffs::balanced(),
            }),
        )
    }

    #[test]
    fn rejects_duplicate_ids_and_bad_rails() {
        assert!(CircuitModel::new(2, 0, vec![wg("a", 0), wg("a", 1)], None).is_err());
        assert!(CircuitModel::new(2, 0, vec![wg("a", 2)], None).is_err());
        assert!(CircuitModel::new(2, 2, vec![], None).is_err());
    }

    #[test]
    fn rejects_double_dump_and_mixing() {
        assert!(
            CircuitModel::new(2, 0, vec![dump("d", vec![0]), dump("e", vec![0])], None).is_err()
        );
        assert!(CircuitModel::new(2, 0, vec![dump("d", vec![0]), coupler("c")], None).is_err());
        assert!(CircuitModel::new(2, 0, vec![dump("d", vec![0, 1]), coupler("c")], None).is_ok());
    }

    #[test]
    fn rejects_source_after_dump() {
        let spiral = ComponentSpec::new(
            "s",
            ComponentKind::Waveguide(Waveguide::spiral(0, 1e-3, 1.0, 0.0)),
        );
        assert!(CircuitModel::new(1, 0, vec![dump("d", vec![0]), spiral], None).is_err());
    }

    #[test]
    fn reference_must_be_a_source() {
        assert!(CircuitModel::new(1, 0, vec![wg("a", 0)], Some("a".into())).is_err());
        assert!(matches!(
            CircuitModel::new(1, 0, vec![wg("a", 0)], Some("zz".into())),
            Err(Error::UnknownComponent(_))
        ));
    }

    #[test]
    fn pump_is_removed_by_dump() {
        let c = CircuitModel::new(
            2,
            0,
            vec![wg("a", 0), dump("d", vec![0, 1]), coupler("c")],
            None,
        )
        .unwrap();
        let t = propagate_pump(
            &c,
            &PumpState::single(2, 0, Complex64::new(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        assert_eq!(t.len(), 4);
        assert!((t[1].power() - 0.9).abs() < 1e-15);
        assert_eq!(t[3].power(), 0.0);
    }
}
