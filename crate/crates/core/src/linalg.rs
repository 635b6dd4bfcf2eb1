//! Small dense complex matrices for rail transfer functions, plus thin
//! wrappers over nalgebra's SVD and Hermitian eigensolver.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix acting on rail amplitudes, indexed `[(output, input)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RailMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl RailMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Embeds a 2×2 block acting on rails `(a, b)` into an otherwise identity matrix.
    pub fn embed_2x2(n: usize, rails: (usize, usize), block: [[Complex64; 2]; 2]) -> Self {
        let mut m = Self::identity(n);
        let (a, b) = rails;
        m[(a, a)] = block[0][0];
        m[(a, b)] = block[0][1];
        m[(b, a)] = block[1][0];
        m[(b, b)] = block[1][1];
        m
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    /// Largest absolute entry of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for RailMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RailMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &RailMatrix {
    type Output = RailMatrix;
    fn mul(self, rhs: &RailMatrix) -> RailMatrix {
        assert_eq!(self.n, rhs.n);
        let mut out = RailMatrix::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..self.n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Singular values (descending) of a row-major `rows × cols` complex matrix.
pub fn singular_values(rows: usize, cols: usize, data: &[Complex64]) -> Result<Vec<f64>> {
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    let m = DMatrix::from_row_slice(rows, cols, data);
    let svd = m
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical(alloc::string::String::from("SVD did not converge")))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Eigen-decomposition of a Hermitian matrix given row-major. Returns
/// eigenvalues (descending) and the matching eigenvectors.
pub fn hermitian_eigen(n: usize, data: &[Complex64]) -> Result<Vec<(f64, Vec<Complex64>)>> {
    if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    let m = DMatrix::from_row_slice(n, n, data);
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            (
                eig.eigenvalues[k],
                eig.eigenvectors.column(k).iter().copied().collect(),
            )
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs)
}
