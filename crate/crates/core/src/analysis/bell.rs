//! Singlet generation by interfering two heralded photons.
//!
//! Photon 1 carries qubit |0⟩ and spectral state ρ₁ into input port 0 of a
//! balanced beamsplitter; photon 2 carries |1⟩ and ρ₂ into port 1. Keeping
//! only events with one photon per output port projects the qubits towards
//! |Ψ⁻⟩ = (|01⟩ − |10⟩)/√2, with a singlet weight set by how
//! indistinguishable the two spectra are. The success probability is the
//! joint probability of the coincidence pattern and a |Ψ⁻⟩ outcome.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::density::SpectralDensity;
use crate::circuit::CouplerCoeffs;
use crate::linalg::hermitian_eigen;
use crate::{Error, Result};

const MODE_CUTOFF: f64 = 1e-14;

/// Result of the singlet analysis. `rho` is the conditional two-qubit state
/// in the coincidence sector, basis |q_c q_d⟩ ordered 00, 01, 10, 11 with
/// q_c the qubit found in output port 0.
#[derive(Debug, Clone, PartialEq)]
pub struct BellReport {
    pub rho: [[Complex64; 4]; 4],
    pub rho_eigenvalues: [f64; 4],
    /// Tr(ρ₁ρ₂).
    pub overlap: f64,
    pub coincidence_probability: f64,
    /// Both photons in the same output port.
    pub bunched_probability: f64,
    /// ⟨Ψ⁻|ρ|Ψ⁻⟩ within the coincidence sector.
    pub singlet_fidelity: f64,
    pub success_probability: f64,
}

impl BellReport {
    pub fn rho_purity(&self) -> f64 {
        self.rho.iter().flatten().map(|z| z.norm_sqr()).sum()
    }
}

fn psi_minus() -> [Complex64; 4] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(-h, 0.0),
        Complex64::new(0.0, 0.0),
    ]
}

fn modes(rho: &SpectralDensity) -> Result<Vec<(f64, Vec<Complex64>)>> {
    let eig = rho.eigen()?;
    let max = eig.first().map(|e| e.0).unwrap_or(0.0);
    if !(max > 0.0) {
        return Err(Error::ZeroState(
            "spectral density has no positive eigenvalue".into(),
        ));
    }
    Ok(eig
        .into_iter()
        .filter(|(p, _)| *p > MODE_CUTOFF * max)
        .collect())
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Single photon after the beamsplitter: amplitude factor per (port, qubit)
/// times a spectral vector.
struct Photon<'a> {
    amp: [[Complex64; 2]; 2],
    spectrum: &'a [Complex64],
}

impl<'a> Photon<'a> {
    fn new(
        bs: &[[Complex64; 2]; 2],
        input_port: usize,
        qubit: usize,
        spectrum: &'a [Complex64],
    ) -> Self {
        let mut amp = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (p, row) in amp.iter_mut().enumerate() {
            row[qubit] = bs[p][input_port];
        }
        Photon { amp, spectrum }
    }
}

/// Unnormalised coincidence-sector qubit matrix for one pair of pure spectra,
/// plus the two-photon norm ‖u⊗v + v⊗u‖².
fn pure_pair(u: &Photon, v: &Photon) -> ([[Complex64; 4]; 4], f64) {
    let uu = inner(u.spectrum, u.spectrum);
    let vv = inner(v.spectrum, v.spectrum);
    let uv = inner(u.spectrum, v.spectrum);
    // Full single-photon inner products include the port/qubit factors.
    let mut su = Complex64::new(0.0, 0.0);
    let mut sv = Complex64::new(0.0, 0.0);
    let mut suv = Complex64::new(0.0, 0.0);
    for p in 0..2 {
        for q in 0..2 {
            su += u.amp[p][q].conj() * u.amp[p][q];
            sv += v.amp[p][q].conj() * v.amp[p][q];
            suv += u.amp[p][q].conj() * v.amp[p][q];
        }
    }
    let norm = 2.0 * (su * uu).re * (sv * vv).re + 2.0 * (suv * uv).norm_sqr();
    // Spectral overlaps between the four spectral factors u, v.
    let ov = |x: usize, y: usize| -> Complex64 {
        match (x, y) {
            (0, 0) => uu,
            (1, 1) => vv,
            (0, 1) => uv,
            _ => uv.conj(),
        }
    };
    let photons = [u, v];
    let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (row, (qc, qd)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
        for (col, (qc2, qd2)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            // Ψ(c qc, d qd) = u_c v_d + v_c u_d; term (x, y) puts photon x in c.
            for (x, y) in [(0usize, 1usize), (1, 0)] {
                for (x2, y2) in [(0usize, 1usize), (1, 0)] {
                    let a = photons[x].amp[0][qc] * photons[y].amp[1][qd];
                    let b = photons[x2].amp[0][qc2] * photons[y2].amp[1][qd2];
                    acc += a * b.conj() * ov(x2, x) * ov(y2, y);
                }
            }
            m[row][col] = acc * 2.0;
        }
    }
    (m, norm)
}

/// Interferes photons with spectral states `rho_a` (qubit 0, port 0) and
/// `rho_b` (qubit 1, port 1) on a lossless 50:50 beamsplitter.
pub fn bell_analysis(rho_a: &SpectralDensity, rho_b: &SpectralDensity) -> Result<BellReport> {
    bell_analysis_with(rho_a, rho_b, &CouplerCoeffs::balanced())
}

pub fn bell_analysis_with(
    rho_a: &SpectralDensity,
    rho_b: &SpectralDensity,
    bs: &CouplerCoeffs,
) -> Result<BellReport> {
    for r in [rho_a, rho_b] {
        if (r.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(
                "spectral density trace differs from 1".into(),
            ));
        }
    }
    let overlap = rho_a.overlap(rho_b)?;
    let ma = modes(rho_a)?;
    let mb = modes(rho_b)?;
    let u = bs.matrix();
    let mut acc = [[Complex64::new(0.0, 0.0); 4]; 4];
    let mut weight_total = 0.0;
    for (pa, fa) in &ma {
        for (pb, fb) in &mb {
            let (m, norm) = pure_pair(&Photon::new(&u, 0, 0, fa), &Photon::new(&u, 1, 1, fb));
            let w = pa * pb;
            weight_total += w;
            for i in 0..4 {
                for j in 0..4 {
                    acc[i][j] += m[i][j] * (w / norm);
                }
            }
        }
    }
    let mut coincidence = 0.0;
    for (i, row) in acc.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v /= weight_total;
        }
        coincidence += row[i].re;
    }
    if !(coincidence > 0.0) {
        return Err(Error::ZeroState("no coincidence events".into()));
    }
    let mut rho = acc;
    for row in &mut rho {
        for v in row.iter_mut() {
            *v /= coincidence;
        }
    }
    let flat: Vec<Complex64> = rho.iter().flatten().copied().collect();
    let eig = hermitian_eigen(4, &flat)?;
    if eig.iter().any(|(l, _)| *l < -1e-10) {
        return Err(Error::Numerical(
            "two-qubit density is not positive semidefinite".into(),
        ));
    }
    let mut rho_eigenvalues = [0.0; 4];
    for (k, (l, _)) in eig.iter().enumerate() {
        rho_eigenvalues[k] = *l;
    }
    let s = psi_minus();
    let mut fid = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            fid += s[i].conj() * rho[i][j] * s[j];
        }
    }
    let singlet_fidelity = fid.re;
    let bs_t2 = bs.t2_split() * bs.t2_split();
    Ok(BellReport {
        rho,
        rho_eigenvalues,
        overlap,
        coincidence_probability: coincidence * bs_t2,
        bunched_probability: (1.0 - coincidence) * bs_t2,
        singlet_fidelity,
        success_probability: coincidence * bs_t2 * singlet_fidelity,
    })
}

/// Σ p_k |v_k⟩⟨v_k| for (weight, vector) pairs; vectors are normalised here.
pub fn mixture(modes: &[(f64, Vec<Complex64>)]) -> Result<SpectralDensity> {
    let n = modes.first().map(|m| m.1.len()).unwrap_or(0);
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for (p, v) in modes {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] += v[i] * v[j].conj() * (p / norm);
            }
        }
    }
    SpectralDensity::from_matrix(n, data)
}
