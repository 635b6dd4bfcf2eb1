use alloc::vec::Vec;

use num_complex::Complex64;

use super::tensor::DiscreteTwoPhotonTensor;
use crate::spectral::{FilterTarget, SpectralFilter};
use crate::{Error, Result};

/// Unheralded g²(0) of the signal photons leaving `port`, from the two-pair
/// term of the pair state.
///
/// With J_xy the measure-weighted, filtered amplitude for a signal photon in
/// bin x on `port` and an idler in mode y (any rail), the second-order
/// moment is G₂ = Σ J_xy J_x'y' conj(J_xy J_x'y' + J_xy' J_x'y) summed over
/// x, x', y, y', and g²(0) = G₂/⟨N⟩² with ⟨N⟩ = Σ|J_xy|².
pub fn g2_moment(
    tensor: &DiscreteTwoPhotonTensor,
    port: usize,
    filter: &SpectralFilter,
) -> Result<f64> {
    if filter.target() != FilterTarget::Signal {
        return Err(Error::param(
            "filter target",
            "g2_moment needs a signal filter",
        ));
    }
    if port >= tensor.n_rails() {
        return Err(Error::RailMismatch {
            expected: tensor.n_rails(),
            found: port + 1,
        });
    }
    let grid = tensor.grid();
    let (ns, ni) = grid.shape();
    let t = filter.sample(grid.signal());
    let w = libm::sqrt(grid.cell_area());
    let ny = tensor.n_rails() * ni;
    let mut j = Vec::with_capacity(ns * ny);
    for (x, tx) in t.iter().enumerate() {
        let a = libm::sqrt(*tx) * w;
        for ri in 0..tensor.n_rails() {
            for ji in 0..ni {
                j.push(tensor.get(port, x, ri, ji) * a);
            }
        }
    }
    let n: f64 = j.iter().map(|z| z.norm_sqr()).sum();
    if !(n > 0.0) {
        return Err(Error::ZeroState("no signal photons on the port".into()));
    }
    let mut g = Complex64::new(0.0, 0.0);
    for x in 0..ns {
        for xp in 0..ns {
            for y in 0..ny {
                let jxy = j[x * ny + y];
                let jxpy = j[xp * ny + y];
                for yp in 0..ny {
                    let jxpyp = j[xp * ny + yp];
                    let jxyp = j[x * ny + yp];
                    let p = jxy * jxpyp;
                    g += p * (p + jxyp * jxpy).conj();
                }
            }
        }
    }
    Ok(g.re / (n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{BiphotonAmplitude, SpectralGrid};
    use alloc::sync::Arc;

    fn setup(f: impl FnMut(usize, usize) -> Complex64) -> DiscreteTwoPhotonTensor {
        let g = Arc::new(SpectralGrid::square(1.0e15, 1.1e15, 1e12, 6).unwrap());
        let a = BiphotonAmplitude::from_fn(g.clone(), f)
            .unwrap()
            .normalized()
            .unwrap();
        let mut t = DiscreteTwoPhotonTensor::zeros(2, g).unwrap();
        t.add_pair((0, 1), Complex64::new(0.3, 0.1), &a).unwrap();
        t
    }

    #[test]
    fn separable_state_is_thermal() {
        let t =
            setup(|j, k| Complex64::new(1.0 + j as f64, 0.0) * Complex64::new(1.0, 0.5 * k as f64));
        let all = SpectralFilter::all_pass(FilterTarget::Signal);
        assert!((g2_moment(&t, 0, &all).unwrap() - 2.0).abs() < 1e-9);
        assert!(g2_moment(&t, 1, &all).is_err());
    }

    #[test]
    fn two_equal_modes() {
        let t = setup(|j, k| {
            if (j, k) == (0, 1) || (j, k) == (3, 4) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let all = SpectralFilter::all_pass(FilterTarget::Signal);
        assert!((g2_moment(&t, 0, &all).unwrap() - 1.5).abs() < 1e-9);
    }
}
