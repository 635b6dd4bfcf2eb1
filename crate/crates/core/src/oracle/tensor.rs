use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::circuit::TwoPhotonState;
use crate::spectral::{BiphotonAmplitude, SpectralGrid};
use crate::{Error, Result};

pub const MAX_RAILS: usize = 4;
pub const MAX_BINS: usize = 64;

/// Two-photon amplitude over (signal rail, signal bin, idler rail, idler bin),
/// stored as a square matrix whose row is the signal mode and column the
/// idler mode, each mode index being `rail * bins + bin`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTwoPhotonTensor {
    n_rails: usize,
    grid: Arc<SpectralGrid>,
    data: Vec<Complex64>,
}

impl DiscreteTwoPhotonTensor {
    pub fn zeros(n_rails: usize, grid: Arc<SpectralGrid>) -> Result<Self> {
        let (ns, ni) = grid.shape();
        if n_rails == 0 || n_rails > MAX_RAILS {
            return Err(Error::SizeLimit(format!(
                "oracle handles 1..={MAX_RAILS} rails, got {n_rails}"
            )));
        }
        if ns > MAX_BINS || ni > MAX_BINS {
            return Err(Error::SizeLimit(format!(
                "oracle grid is capped at {MAX_BINS}×{MAX_BINS}, got {ns}×{ni}"
            )));
        }
        Ok(Self {
            n_rails,
            data: vec![Complex64::new(0.0, 0.0); n_rails * ns * n_rails * ni],
            grid,
        })
    }

    /// Dense copy of a mode-resolved state.
    pub fn from_state(state: &TwoPhotonState) -> Result<Self> {
        let mut t = Self::zeros(state.n_rails(), state.grid().clone())?;
        for c in state.contributions() {
            t.add_pair(c.rails, c.weight, &c.jsa)?;
        }
        Ok(t)
    }

    pub fn n_rails(&self) -> usize {
        self.n_rails
    }

    pub fn grid(&self) -> &Arc<SpectralGrid> {
        &self.grid
    }

    /// Number of signal and idler modes.
    pub fn modes(&self) -> (usize, usize) {
        let (ns, ni) = self.grid.shape();
        (self.n_rails * ns, self.n_rails * ni)
    }

    fn index(&self, rs: usize, js: usize, ri: usize, ji: usize) -> usize {
        let (ns, ni) = self.grid.shape();
        ((rs * ns + js) * self.n_rails + ri) * ni + ji
    }

    pub fn get(&self, rs: usize, js: usize, ri: usize, ji: usize) -> Complex64 {
        self.data[self.index(rs, js, ri, ji)]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Adds `weight · Φ` with the signal on `rails.0` and the idler on `rails.1`.
    pub fn add_pair(
        &mut self,
        rails: (usize, usize),
        weight: Complex64,
        jsa: &BiphotonAmplitude,
    ) -> Result<()> {
        if rails.0 >= self.n_rails || rails.1 >= self.n_rails {
            return Err(Error::RailMismatch {
                expected: self.n_rails,
                found: rails.0.max(rails.1) + 1,
            });
        }
        if !(Arc::ptr_eq(jsa.grid(), &self.grid) || **jsa.grid() == *self.grid) {
            return Err(Error::InvalidGrid(
                "pair amplitude is on another grid".into(),
            ));
        }
        let (ns, ni) = self.grid.shape();
        for js in 0..ns {
            for ji in 0..ni {
                let k = self.index(rails.0, js, rails.1, ji);
                self.data[k] += weight * jsa.get(js, ji);
            }
        }
        Ok(())
    }

    pub fn add(&mut self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_rails != other.n_rails || *self.grid != *other.grid {
            return Err(Error::InvalidGrid("tensors have different shapes".into()));
        }
        Ok(())
    }

    /// Applies the single-photon operator `U = M ⊗ 1_bins` to both photons:
    /// T → U T Uᵀ, with `m` a row-major `n_rails × n_rails` matrix `[out][in]`.
    pub fn transform(&self, m: &[Complex64]) -> Result<Self> {
        let n = self.n_rails;
        if m.len() != n * n {
            return Err(Error::RailMismatch {
                expected: n * n,
                found: m.len(),
            });
        }
        let (ns, ni) = self.grid.shape();
        let (ds, di) = self.modes();
        let us = kron_identity(n, m, ns);
        let ui = kron_identity(n, m, ni);
        // U_s T
        let mut left = vec![Complex64::new(0.0, 0.0); ds * di];
        for a in 0..ds {
            for b in 0..ds {
                let u = us[a * ds + b];
                if u == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..di {
                    left[a * di + c] += u * self.data[b * di + c];
                }
            }
        }
        // (U_s T) U_iᵀ
        let mut out = vec![Complex64::new(0.0, 0.0); ds * di];
        for a in 0..ds {
            for c in 0..di {
                let v = left[a * di + c];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for d in 0..di {
                    out[a * di + d] += v * ui[d * di + c];
                }
            }
        }
        Ok(Self {
            n_rails: n,
            grid: self.grid.clone(),
            data: out,
        })
    }

    /// Copy keeping only the rail pairs `(signal, idler)` accepted by `keep`.
    pub fn masked(&self, keep: impl Fn(usize, usize) -> bool) -> Self {
        let (ns, ni) = self.grid.shape();
        let mut out = self.clone();
        for rs in 0..self.n_rails {
            for ri in 0..self.n_rails {
                if keep(rs, ri) {
                    continue;
                }
                for js in 0..ns {
                    for ji in 0..ni {
                        let k = self.index(rs, js, ri, ji);
                        out.data[k] = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        out
    }

    /// Signal-bin × idler-bin block on one rail pair.
    pub fn block(&self, rs: usize, ri: usize) -> Vec<Complex64> {
        let (ns, ni) = self.grid.shape();
        let mut out = Vec::with_capacity(ns * ni);
        for js in 0..ns {
            for ji in 0..ni {
                out.push(self.get(rs, js, ri, ji));
            }
        }
        out
    }

    /// ⟨Φ|T(rs, ri)⟩ dA: the weight of a normalised amplitude on a rail pair.
    pub fn project(&self, rails: (usize, usize), jsa: &BiphotonAmplitude) -> Complex64 {
        let b = self.block(rails.0, rails.1);
        let s: Complex64 = b.iter().zip(jsa.values()).map(|(t, p)| p.conj() * t).sum();
        s * self.grid.cell_area()
    }

    /// Σ|T|² dA over every mode.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Dense `(n·bins)²` matrix of `m ⊗ 1`.
fn kron_identity(n: usize, m: &[Complex64], bins: usize) -> Vec<Complex64> {
    let d = n * bins;
    let mut u = vec![Complex64::new(0.0, 0.0); d * d];
    for r in 0..n {
        for c in 0..n {
            for k in 0..bins {
                u[(r * bins + k) * d + c * bins + k] = m[r * n + c];
            }
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Arc<SpectralGrid> {
        Arc::new(SpectralGrid::square(1.0e15, 1.1e15, 1e12, n).unwrap())
    }

    #[test]
    fn enforces_size_limits() {
        assert!(DiscreteTwoPhotonTensor::zeros(5, grid(4)).is_err());
        assert!(DiscreteTwoPhotonTensor::zeros(2, grid(65)).is_err());
        assert!(DiscreteTwoPhotonTensor::zeros(4, grid(64)).is_ok());
    }

    #[test]
    fn swap_moves_blocks() {
        let g = grid(3);
        let a =
            BiphotonAmplitude::from_fn(g.clone(), |j, k| Complex64::new((j * 3 + k) as f64, 1.0))
                .unwrap();
        let mut t = DiscreteTwoPhotonTensor::zeros(2, g).unwrap();
        t.add_pair((0, 1), Complex64::new(2.0, 0.0), &a).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s = t.transform(&[zero, one, one, zero]).unwrap();
        assert_eq!(s.block(1, 0), t.block(0, 1));
        assert!(s.block(0, 1).iter().all(|z| *z == zero));
    }
}
