//! Truncated Peter–Weyl representation, the Dirac operator, the twist and the
//! unitary `u`.

pub mod basis;
pub mod index;
pub mod sparse;

pub use basis::{PWBasis, Sector};
pub use index::PWIndex;
pub use sparse::{SparseOperator, Triplet};
pub mod operators;

pub use operators::{
    build_u, build_u_margin, compress_positive, dirac, frechet_norm, separating_tol, shift_pattern_violations,
    sigma_op, spectral_data_check, twist, twist_power, SpectralData, UnitaryU,
};
