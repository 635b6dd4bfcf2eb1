use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{CouplerCoeffs, Mzi, PairClass, PairContribution, TwoPhotonState};
use crate::spectral::{BiphotonAmplitude, SpectralGrid};
use crate::Result;

/// Fixed seed list of the randomized oracle checks.
pub const DEFAULT_SEEDS: core::ops::Range<u64> = 1..101;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// MZI with every parameter drawn over its valid range, and a pump that
/// may enter on either or both rails.
pub fn random_mzi(rng: &mut ChaCha8Rng) -> Result<(Mzi, [Complex64; 2])> {
    let t2_split = rng.gen_range(0.5..=1.0);
    let bar = rng.gen_range(0.0..=1.0);
    let coupler = CouplerCoeffs::from_split(bar, t2_split)?;
    let mut m = Mzi::new(
        (0, 1),
        rng.gen_range(0.0..2.0 * PI),
        [rng.gen_range(0.0..5e-3), rng.gen_range(0.0..5e-3)],
        coupler,
        rng.gen_range(1e6..1e7),
    );
    m.arm_t2 = [rng.gen_range(0.3..=1.0), rng.gen_range(0.3..=1.0)];
    let pump = match rng.gen_range(0..3) {
        0 => [complex(rng), Complex64::new(0.0, 0.0)],
        1 => [Complex64::new(0.0, 0.0), complex(rng)],
        _ => [complex(rng), complex(rng)],
    };
    Ok((m, pump))
}

/// Normalised amplitude made of a few random separable modes.
pub fn random_amplitude(
    rng: &mut ChaCha8Rng,
    grid: Arc<SpectralGrid>,
) -> Result<BiphotonAmplitude> {
    let (ns, ni) = grid.shape();
    let modes = rng.gen_range(1..=3);
    let mut f: Vec<(Vec<Complex64>, Vec<Complex64>, Complex64)> = Vec::with_capacity(modes);
    for _ in 0..modes {
        let a = (0..ns).map(|_| complex(rng)).collect();
        let b = (0..ni).map(|_| complex(rng)).collect();
        f.push((a, b, complex(rng)));
    }
    BiphotonAmplitude::from_fn(grid, |j, k| f.iter().map(|(a, b, c)| a[j] * b[k] * c).sum())?
        .normalized()
}

/// State with a handful of random terms on random rail pairs.
pub fn random_state(
    rng: &mut ChaCha8Rng,
    n_rails: usize,
    grid: Arc<SpectralGrid>,
) -> Result<TwoPhotonState> {
    let mut s = TwoPhotonState::empty(n_rails, grid.clone());
    let terms = rng.gen_range(1..=4);
    for t in 0..terms {
        let jsa = Arc::new(random_amplitude(rng, grid.clone())?);
        let rails = (rng.gen_range(0..n_rails), rng.gen_range(0..n_rails));
        s.push(PairContribution {
            rails,
            weight: complex(rng),
            jsa,
            origin: format!("term{t}"),
            class: if t == 0 {
                PairClass::Source
            } else {
                PairClass::Spurious
            },
            born_cross: rails.0 != rails.1,
        })?;
    }
    Ok(s)
}
