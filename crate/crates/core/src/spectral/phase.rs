use num_complex::Complex64;

use crate::{Error, Result};

/// Unnormalised sinc: sin(x)/x with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // Taylor series; error below 1e-33 in this range.
        1.0 - x * x / 6.0
    } else {
        libm::sin(x) / x
    }
}

/// Phase-matching integral ∫₀ᴸ e^{iΔk z} dz = L·sinc(ΔkL/2)·e^{iΔkL/2}.
pub fn phase_matching(delta_k: f64, length: f64) -> Result<Complex64> {
    if !delta_k.is_finite() || !length.is_finite() {
        return Err(Error::NonFinite("phase matching arguments"));
    }
    if !(length > 0.0) {
        return Err(Error::param("length", "must be positive"));
    }
    let half = 0.5 * delta_k * length;
    Ok(Complex64::from_polar(length * sinc(half), half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn zero_mismatch_gives_length() {
        let p = phase_matching(0.0, 3.5e-3).unwrap();
        assert_eq!(p, Complex64::new(3.5e-3, 0.0));
    }

    #[test]
    fn first_zero_of_sinc() {
        let l = 2e-3;
        let p = phase_matching(2.0 * PI / l, l).unwrap();
        assert!(p.norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(phase_matching(f64::NAN, 1.0).is_err());
        assert!(phase_matching(1.0, 0.0).is_err());
    }
}
