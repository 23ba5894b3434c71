use std::fmt::Debug;

use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use crate::scalar::{rat, Coeff, QScalar, Rat};

/// Scalar field used by a cochain calculus: exact (rationals, Laurent
/// polynomials in `q`) or floating point.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Magnitude used for reporting residuals.
    fn size(&self) -> f64;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        rat(n, d)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn size(&self) -> f64 {
        crate::scalar::rat_to_f64(self).abs()
    }
}

impl Scalar for QScalar {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        QScalar::rational(rat(n, d))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    /// Largest coefficient magnitude.
    fn size(&self) -> f64 {
        self.terms().map(|(_, c): (i32, &Coeff)| c.to_c64().norm()).fold(0.0, f64::max)
    }
}

impl Scalar for C64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        C64::new(n as f64 / d as f64, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == C64::new(0.0, 0.0)
    }
    fn size(&self) -> f64 {
        self.norm()
    }
}
