//! The coordinate algebra `A^∞` of `SU_q(2)`: normal-ordered monomials with
//! Laurent-polynomial coefficients in `q`, its Hopf structure, the Haar state
//! and the modular automorphism.

pub mod checks;
pub mod element;
pub mod functional;
pub mod hopf;
pub mod monomial;

pub use checks::{algebra_check, haar_check, lemma_check, AlgebraCheckConfig, LemmaConfig};
pub use element::{monomial_product, AlgebraElement};
pub use functional::{convolve, hochschild_d0, invariance_check, monomial_tuples, Functional, MultiFunctional};
pub use hopf::{coproduct, coproduct_monomial, counit, counit_monomial, haar, haar_monomial, TensorElement};
pub use monomial::Monomial;
