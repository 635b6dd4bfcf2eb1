use num_complex::Complex64;

use crate::analysis::SpectralDensity;
use crate::circuit::CouplerCoeffs;
use crate::{Error, Result};

/// Coincidence statistics of the singlet experiment computed in first
/// quantisation.
#[derive(Debug, Clone, PartialEq)]
pub struct BellOracle {
    /// Two-qubit state given one photon per output port, basis 00, 01, 10,
    /// 11 with the first qubit the one leaving port 0.
    pub rho: [[Complex64; 4]; 4],
    pub coincidence_probability: f64,
    pub singlet_fidelity: f64,
    pub success_probability: f64,
}

/// Single-photon operator on (port, qubit, bin), dimension 4n.
struct Op {
    n: usize,
    data: alloc::vec::Vec<Complex64>,
}

impl Op {
    fn dim(&self) -> usize {
        4 * self.n
    }

    fn at(&self, a: usize, b: usize) -> Complex64 {
        self.data[a * self.dim() + b]
    }
}

fn mode(n: usize, port: usize, qubit: usize, bin: usize) -> usize {
    (port * 2 + qubit) * n + bin
}

/// ρ ⊗ |port, qubit⟩⟨port, qubit| pushed through the beamsplitter.
fn input_after_bs(
    rho: &SpectralDensity,
    port: usize,
    qubit: usize,
    bs: &[[Complex64; 2]; 2],
) -> Op {
    let n = rho.dim();
    let d = 4 * n;
    let mut data = alloc::vec![Complex64::new(0.0, 0.0); d * d];
    for po in 0..2 {
        for po2 in 0..2 {
            let f = bs[po][port] * bs[po2][port].conj();
            for k in 0..n {
                for k2 in 0..n {
                    data[mode(n, po, qubit, k) * d + mode(n, po2, qubit, k2)] = f * rho.get(k, k2);
                }
            }
        }
    }
    Op { n, data }
}

/// Photon with spectral state `rho_a` and qubit 0 enters port 0, `rho_b`
/// with qubit 1 enters port 1. The two-photon density is
/// ½(1+S)(A⊗B)(1+S) with S the particle exchange, transformed photon by
/// photon and projected on one photon per output port.
pub fn bell_oracle(
    rho_a: &SpectralDensity,
    rho_b: &SpectralDensity,
    bs: &CouplerCoeffs,
) -> Result<BellOracle> {
    if rho_a.dim() != rho_b.dim() {
        return Err(Error::InvalidGrid(
            "spectral densities of different dimension".into(),
        ));
    }
    let u = bs.matrix();
    let a = input_after_bs(rho_a, 0, 0, &u);
    let b = input_after_bs(rho_b, 1, 1, &u);
    let n = a.n;
    let basis = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut r = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (row, &(qc, qd)) in basis.iter().enumerate() {
        for (col, &(qc2, qd2)) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for k2 in 0..n {
                    let x = mode(n, 0, qc, k);
                    let y = mode(n, 1, qd, k2);
                    let xp = mode(n, 0, qc2, k);
                    let yp = mode(n, 1, qd2, k2);
                    acc += a.at(x, xp) * b.at(y, yp)
                        + a.at(y, xp) * b.at(x, yp)
                        + a.at(x, yp) * b.at(y, xp)
                        + a.at(y, yp) * b.at(x, xp);
                }
            }
            // ½ from the symmetriser, ×2 for the mirrored port assignment.
            r[row][col] = acc;
        }
    }
    let p: f64 = (0..4).map(|i| r[i][i].re).sum();
    if !(p > 0.0) {
        return Err(Error::ZeroState("no coincidences".into()));
    }
    for row in &mut r {
        for v in row.iter_mut() {
            *v /= p;
        }
    }
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let s = [0.0, h, -h, 0.0];
    let mut f = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            f += (r[i][j] * (s[i] * s[j])).re;
        }
    }
    Ok(BellOracle {
        rho: r,
        coincidence_probability: p,
        singlet_fidelity: f,
        success_probability: p * f,
    })
}
