//! JLO cocycle: divided differences, the `F_n` trace functionals, the twisted
//! Chern character and its pairing with the unitary `u`.

pub mod divdiff;
pub mod oracle;

pub use divdiff::{simplex_exp_integral, SimplexNodes};
pub mod engine;

pub use engine::FEngine;
pub mod chern;

pub use chern::{pairing, pairing_oracle, Jlo, OperatorHandle, PairingOracle, PairingRecord, SQRT_2I};
