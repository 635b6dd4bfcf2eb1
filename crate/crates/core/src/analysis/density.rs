use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::schmidt::{schmidt_matrix, PurityReport};
use crate::circuit::{PairClass, PairContribution, TwoPhotonState};
use crate::linalg::hermitian_eigen;
use crate::spectral::{FilterTarget, SpectralFilter};
use crate::{Error, Result};

const DENSITY_TOL: f64 = 1e-10;

fn keep_term(exclude_cross: bool) -> impl Fn(&PairContribution) -> bool {
    move |c| !(exclude_cross && c.class == PairClass::Spurious && c.born_cross)
}

fn check_target(f: &SpectralFilter, target: FilterTarget) -> Result<()> {
    if f.target() != target {
        return Err(Error::param(
            "filter target",
            format!("expected a {target:?} filter"),
        ));
    }
    Ok(())
}

/// Signal-row matrix [M_r1 | M_r2 | …] over the listed idler rails, each
/// block the filtered, measure-weighted coherent amplitude with the signal on
/// `port`. Returns (columns, data) with `ns` rows.
fn stacked_blocks(
    state: &TwoPhotonState,
    port: usize,
    idler_rails: &[usize],
    signal: &SpectralFilter,
    idler: Option<&SpectralFilter>,
    exclude_cross: bool,
) -> Result<(usize, Vec<Complex64>)> {
    check_target(signal, FilterTarget::Signal)?;
    if let Some(f) = idler {
        check_target(f, FilterTarget::Idler)?;
    }
    let grid = state.grid();
    let (ns, ni) = grid.shape();
    let ts: Vec<f64> = signal
        .sample(grid.signal())
        .into_iter()
        .map(libm::sqrt)
        .collect();
    let ti: Vec<f64> = match idler {
        Some(f) => f.sample(grid.idler()).into_iter().map(libm::sqrt).collect(),
        None => vec![1.0; ni],
    };
    let w = libm::sqrt(grid.cell_area());
    let keep = keep_term(exclude_cross);
    let blocks: Vec<Vec<Complex64>> = idler_rails
        .iter()
        .filter_map(|&r| state.port_amplitude_where(port, r, &keep))
        .collect();
    if blocks.is_empty() {
        return Err(Error::EmptyPort {
            signal: port,
            idler: idler_rails.first().copied().unwrap_or(port),
        });
    }
    let cols = ni * blocks.len();
    let mut data = vec![Complex64::new(0.0, 0.0); ns * cols];
    for (b, block) in blocks.iter().enumerate() {
        for j in 0..ns {
            for k in 0..ni {
                data[j * cols + b * ni + k] = block[j * ni + k] * (ts[j] * ti[k] * w);
            }
        }
    }
    Ok((cols, data))
}

/// Purity and g²(0) of the signal photons leaving `port`, without heralding.
///
/// Terms whose idler leaves on different rails are mixed incoherently; terms
/// sharing both rails add coherently. With `exclude_cross` spurious pairs born
/// split across an MZI are dropped.
pub fn unheralded_g2(
    state: &TwoPhotonState,
    port: usize,
    filter: &SpectralFilter,
    exclude_cross: bool,
) -> Result<PurityReport> {
    let rails: Vec<usize> = (0..state.n_rails()).collect();
    let (cols, data) = stacked_blocks(state, port, &rails, filter, None, exclude_cross)?;
    schmidt_matrix(state.grid().signal().len(), cols, &data)
}

/// Purity of signal photons on `port` heralded by a filtered idler detection
/// on `herald_rail`.
pub fn heralded_purity(
    state: &TwoPhotonState,
    port: usize,
    herald_rail: usize,
    signal: &SpectralFilter,
    idler: &SpectralFilter,
    exclude_cross: bool,
) -> Result<PurityReport> {
    let (cols, data) = stacked_blocks(
        state,
        port,
        &[herald_rail],
        signal,
        Some(idler),
        exclude_cross,
    )?;
    schmidt_matrix(state.grid().signal().len(), cols, &data)
}

/// Trace-one spectral density operator of a single photon on the signal
/// axis, in the measure-weighted basis (ρ = M M†).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    n: usize,
    data: Vec<Complex64>,
}

impl SpectralDensity {
    /// Validates a row-major Hermitian, trace-one, positive matrix.
    pub fn from_matrix(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n || n == 0 {
            return Err(Error::InvalidGrid(format!("density needs {n}×{n} entries")));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        let scale = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            for j in 0..=i {
                if (data[i * n + j] - data[j * n + i].conj()).norm() > DENSITY_TOL * scale.max(1.0)
                {
                    return Err(Error::NotNormalized(
                        "density matrix is not Hermitian".into(),
                    ));
                }
            }
        }
        let d = Self { n, data };
        let tr = d.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotNormalized(format!("density trace {tr}")));
        }
        Ok(d)
    }

    /// |ψ⟩⟨ψ| for a measure-weighted amplitude vector, normalised.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::ZeroState("empty single-photon amplitude".into()));
        }
        let n = psi.len();
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = psi[i] * psi[j].conj() / norm;
            }
        }
        Ok(Self { n, data })
    }

    /// ρ = M M† / Tr for a row-major `n × cols` matrix.
    pub fn from_rows(n: usize, cols: usize, m: &[Complex64]) -> Result<Self> {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            let ri = &m[i * cols..(i + 1) * cols];
            for j in 0..=i {
                let rj = &m[j * cols..(j + 1) * cols];
                let v: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                data[i * n + j] = v;
                data[j * n + i] = v.conj();
            }
        }
        let tr: f64 = (0..n).map(|i| data[i * n + i].re).sum();
        if !(tr > 0.0) {
            return Err(Error::ZeroState("density has zero trace".into()));
        }
        for v in &mut data {
            *v /= tr;
        }
        Ok(Self { n, data })
    }

    /// Heralded signal state on `port` for an idler detected on `herald_rail`.
    pub fn heralded(
        state: &TwoPhotonState,
        port: usize,
        herald_rail: usize,
        signal: &SpectralFilter,
        idler: &SpectralFilter,
        exclude_cross: bool,
    ) -> Result<Self> {
        let (cols, data) = stacked_blocks(
            state,
            port,
            &[herald_rail],
            signal,
            Some(idler),
            exclude_cross,
        )?;
        Self::from_rows(state.grid().signal().len(), cols, &data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.data[i * self.n + i].re).sum()
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Tr(ρ₁ρ₂) for Hermitian ρ₁, ρ₂.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::InvalidGrid(
                "densities of different dimension".into(),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// Eigenvalues (descending) with eigenvectors.
    pub fn eigen(&self) -> Result<Vec<(f64, Vec<Complex64>)>> {
        hermitian_eigen(self.n, &self.data)
    }
}
