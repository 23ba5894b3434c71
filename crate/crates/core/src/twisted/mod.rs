//! σ-twisted cyclic cochains over an abstract algebra: the operators
//! `T, N, U, V, b, B`, the bicomplex differentials and identity checks.

mod checks;
mod cochain;
mod handles;
mod scalar;

pub use checks::{
    argument_tuples, check_identities, entire_growth_check, norm_estimate, random_invariant_cochain, CheckConfig,
};
pub use cochain::{bicomplex_d, op_b, op_big_b, op_n, op_t, op_t_inv, op_u, op_v, BiCochain, Cochain, Which};
pub use handles::{AlgebraHandle, MatrixHandle, SymbolicHandle};
pub use scalar::Scalar;
