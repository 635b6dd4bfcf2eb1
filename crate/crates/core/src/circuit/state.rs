use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::component::PairClass;
use crate::linalg::RailMatrix;
use crate::spectral::{BiphotonAmplitude, SpectralGrid};
use crate::{Error, Result};

/// One term of the two-photon state: a pair amplitude `weight` times the
/// normalised JSA, with the signal on rail `rails.0` and the idler on
/// `rails.1`.
#[derive(Debug, Clone)]
pub struct PairContribution {
    pub rails: (usize, usize),
    pub weight: Complex64,
    pub jsa: Arc<BiphotonAmplitude>,
    /// Id of the generating stage.
    pub origin: String,
    pub class: PairClass,
    /// True for pairs born split across the two arms of an MZI.
    pub born_cross: bool,
}

impl PairContribution {
    fn same_mode(&self, other: &Self) -> bool {
        self.rails == other.rails
            && self.origin == other.origin
            && self.class == other.class
            && self.born_cross == other.born_cross
            && Arc::ptr_eq(&self.jsa, &other.jsa)
    }
}

/// First-order two-photon state of a circuit, resolved by rail and by origin.
#[derive(Debug, Clone)]
pub struct TwoPhotonState {
    n_rails: usize,
    grid: Arc<SpectralGrid>,
    contributions: Vec<PairContribution>,
}

impl TwoPhotonState {
    pub fn empty(n_rails: usize, grid: Arc<SpectralGrid>) -> Self {
        Self {
            n_rails,
            grid,
            contributions: Vec::new(),
        }
    }

    pub fn n_rails(&self) -> usize {
        self.n_rails
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    pub fn contributions(&self) -> &[PairContribution] {
        &self.contributions
    }

    pub fn is_empty(&self) -> bool {
        self.contributions.is_empty()
    }

    /// Adds a term, merging it with an existing term of the same mode.
    pub fn push(&mut self, c: PairContribution) -> Result<()> {
        if c.rails.0 >= self.n_rails || c.rails.1 >= self.n_rails {
            return Err(Error::RailMismatch {
                expected: self.n_rails,
                found: c.rails.0.max(c.rails.1) + 1,
            });
        }
        if !Arc::ptr_eq(c.jsa.grid(), &self.grid) && c.jsa.grid().as_ref() != self.grid.as_ref() {
            return Err(Error::InvalidGrid(
                "contribution JSA lives on a different grid".into(),
            ));
        }
        if let Some(e) = self.contributions.iter_mut().find(|e| e.same_mode(&c)) {
            e.weight += c.weight;
        } else {
            self.contributions.push(c);
        }
        Ok(())
    }

    /// Terms with the signal on `signal` and the idler on `idler`.
    pub fn on_port(&self, signal: usize, idler: usize) -> impl Iterator<Item = &PairContribution> {
        self.contributions
            .iter()
            .filter(move |c| c.rails == (signal, idler))
    }

    /// Unnormalised amplitude Σ wΦ on a rail pair, or `None` if nothing lands there.
    pub fn port_amplitude(&self, signal: usize, idler: usize) -> Option<Vec<Complex64>> {
        self.port_amplitude_where(signal, idler, |_| true)
    }

    pub fn port_amplitude_where(
        &self,
        signal: usize,
        idler: usize,
        keep: impl Fn(&PairContribution) -> bool,
    ) -> Option<Vec<Complex64>> {
        let mut out: Option<Vec<Complex64>> = None;
        for c in self.on_port(signal, idler).filter(|c| keep(c)) {
            let acc = out.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); self.grid.len()]);
            for (a, v) in acc.iter_mut().zip(c.jsa.values()) {
                *a += c.weight * v;
            }
        }
        out
    }

    /// Pair probability (to first order) on a rail pair.
    pub fn port_probability(&self, signal: usize, idler: usize) -> f64 {
        self.port_amplitude(signal, idler)
            .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area())
            .unwrap_or(0.0)
    }

    /// Total pair probability summed over all rail pairs.
    pub fn total_probability(&self) -> f64 {
        let mut p = 0.0;
        for s in 0..self.n_rails {
            for i in 0..self.n_rails {
                p += self.port_probability(s, i);
            }
        }
        p
    }
}

/// Sends every photon of every term through the rail transfer `m`.
pub fn scatter_pairs(m: &RailMatrix, state: &TwoPhotonState) -> Result<TwoPhotonState> {
    if m.dim() != state.n_rails {
        return Err(Error::RailMismatch {
            expected: state.n_rails,
            found: m.dim(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut out = TwoPhotonState::empty(state.n_rails, state.grid.clone());
    for c in &state.contributions {
        let (s, i) = c.rails;
        for so in 0..m.dim() {
            let ms = m[(so, s)];
            if ms == zero {
                continue;
            }
            for io in 0..m.dim() {
                let mi = m[(io, i)];
                if mi == zero {
                    continue;
                }
                out.push(PairContribution {
                    rails: (so, io),
                    weight: c.weight * (ms * mi),
                    jsa: c.jsa.clone(),
                    origin: c.origin.clone(),
                    class: c.class,
                    born_cross: c.born_cross,
                })?;
            }
        }
    }
    Ok(out)
}
