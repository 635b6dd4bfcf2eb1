//! Independent brute-force reference calculations.
//!
//! The oracle propagates a dense two-photon amplitude over (rail ⊗ frequency
//! bin) through stage matrices it builds itself, generating pairs arm by arm
//! inside interferometers. It is limited to small circuits and coarse grids.

mod bell;
mod moments;
mod propagate;
mod random;
mod tensor;
mod validate;

pub use bell::{bell_oracle, BellOracle};
pub use moments::g2_moment;
pub use propagate::{
    coupler_matrix, fock_propagate, fock_propagate_with, mzi_matrix, Dense, FockOutput, FockPart,
};
pub use random::{random_amplitude, random_mzi, random_state, rng, DEFAULT_SEEDS};
pub use tensor::{DiscreteTwoPhotonTensor, MAX_BINS, MAX_RAILS};
pub use validate::{
    mzi_library, mzi_seed_deviation, validate_circuit, validate_g2, validate_mzis, ValidationCheck,
    ORACLE_TOLERANCE,
};
