//! Twisted Chern character, JLO cocycle and index pairing for quantum `SU(2)`.

pub mod cli;
pub mod error;
pub mod exec;
pub mod index;
pub mod jlo;
pub mod pw;
pub mod qalgebra;
pub mod report;
pub mod scalar;
pub mod twisted;

pub use error::{Error, Result};
pub use exec::Exec;
