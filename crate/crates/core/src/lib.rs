//! Nonlinear noise model for integrated photonic circuits.
//!
//! A coherent pump is propagated stage by stage through a circuit of
//! waveguides, resonators, interferometers and couplers. Every component that
//! carries pump light generates photon pairs by spontaneous four-wave mixing
//! (to first order), and the pairs already generated are scattered through the
//! remaining linear optics. The resulting mode-resolved two-photon state feeds
//! purity, g²(0), interference-fringe and Bell-state analyses.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and parallel sweeps live in the `sfwm` crate.

#![no_std]
// NaN must fail the positivity guards, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod circuit;
mod error;
pub mod linalg;
pub mod oracle;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
