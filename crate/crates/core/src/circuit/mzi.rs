use num_complex::Complex64;

use super::component::Mzi;

/// Pair amplitudes emerging from an MZI, as coefficients of the arm-averaged
/// JSA. `cross` applies to both (upper, lower) and (lower, upper) orderings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziPairTerms {
    pub bunched_upper: Complex64,
    pub bunched_lower: Complex64,
    pub cross: Complex64,
}

fn arm_factors(spec: &Mzi, wavenumber: f64) -> [Complex64; 2] {
    [
        Complex64::from_polar(
            libm::sqrt(spec.arm_t2[0]),
            wavenumber * spec.arm_lengths[0] + spec.theta,
        ),
        Complex64::from_polar(libm::sqrt(spec.arm_t2[1]), wavenumber * spec.arm_lengths[1]),
    ]
}

/// Field transfer matrix `[out][in]` over the (upper, lower) rails.
pub fn mzi_transfer(spec: &Mzi, wavenumber: f64) -> [[Complex64; 2]; 2] {
    let [a, b] = arm_factors(spec, wavenumber);
    let r = spec.coupler.r();
    let k = spec.coupler.kappa();
    let (r2, k2) = (r * r, k * k);
    let off = Complex64::new(0.0, k * r) * (a + b);
    [[a * r2 - b * k2, off], [off, b * r2 - a * k2]]
}

/// Pairs generated in the two arms by the pump amplitudes `pump` entering on
/// (upper, lower), carried through the second coupler.
pub fn mzi_pair_terms(spec: &Mzi, pump: [Complex64; 2]) -> MziPairTerms {
    let r = spec.coupler.r();
    let k = spec.coupler.kappa();
    let ik = Complex64::new(0.0, k);
    let u = [pump[0] * r + ik * pump[1], ik * pump[0] + pump[1] * r];
    let [ea, eb] = arm_factors_phase(spec);
    let b1 = u[0] * ea;
    let b2 = u[1] * eb;
    let g1 = b1 * b1 * spec.arm_lprime(0).value() * spec.generation_scale;
    let g2 = b2 * b2 * spec.arm_lprime(1).value() * spec.generation_scale;
    let (r2, k2) = (r * r, k * k);
    MziPairTerms {
        bunched_upper: g1 * r2 - g2 * k2,
        bunched_lower: g2 * r2 - g1 * k2,
        cross: Complex64::new(0.0, k * r) * (g1 + g2),
    }
}

/// Unit-modulus pump phase factors accumulated along each arm.
fn arm_factors_phase(spec: &Mzi) -> [Complex64; 2] {
    [
        Complex64::from_polar(1.0, spec.k_p * spec.arm_lengths[0] + spec.theta),
        Complex64::from_polar(1.0, spec.k_p * spec.arm_lengths[1]),
    ]
}
