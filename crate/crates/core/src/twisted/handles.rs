use std::fmt::Debug;

use num_complex::Complex64 as C64;

use super::scalar::Scalar;
use crate::qalgebra::{AlgebraElement, Monomial};
use crate::scalar::{rat, QScalar, Rat};

/// An algebra with a distinguished basis and an automorphism `σ`.
pub trait AlgebraHandle: Send + Sync + 'static {
    type Elem: Clone + Debug + PartialEq + Send + Sync;
    type S: Scalar;

    fn name(&self) -> String;
    fn basis(&self) -> &[Self::Elem];
    /// Filtration degree of basis element `k`; tuples are cut off by total grade.
    fn grade(&self, _k: usize) -> u32 {
        0
    }
    fn unit(&self) -> Self::Elem;
    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sigma(&self, a: &Self::Elem) -> Self::Elem;
    fn sigma_inv(&self, a: &Self::Elem) -> Self::Elem;
    /// Dual-basis functional `δ_k(a)`.
    fn coefficient(&self, a: &Self::Elem, k: usize) -> Self::S;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, s: &Self::S) -> Self::Elem;
    fn elem_norm(&self, a: &Self::Elem) -> f64;
}

/// `n × n` matrices with `σ = Ad g`, `g = diag(w)`, so `σ(E_ij) = w_i/w_j E_ij`.
#[derive(Clone, Debug)]
pub struct MatrixHandle<S: Scalar> {
    n: usize,
    w: Vec<S>,
    w_inv: Vec<S>,
    basis: Vec<Vec<S>>,
}

impl<S: Scalar> MatrixHandle<S> {
    pub fn new(w: Vec<S>, w_inv: Vec<S>) -> Self {
        assert_eq!(w.len(), w_inv.len());
        for (a, b) in w.iter().zip(&w_inv) {
            assert!(a.mul(b).sub(&S::one()).size() < 1e-12, "w_inv must invert w");
        }
        let n = w.len();
        let basis = (0..n * n)
            .map(|k| {
                let mut e = vec![S::zero(); n * n];
                e[k] = S::one();
                e
            })
            .collect();
        MatrixHandle { n, w, w_inv, basis }
    }

    pub fn untwisted(n: usize) -> Self {
        Self::new(vec![S::one(); n], vec![S::one(); n])
    }

    fn conj(&self, a: &[S], l: &[S], r: &[S]) -> Vec<S> {
        let n = self.n;
        (0..n * n).map(|k| l[k / n].mul(&a[k]).mul(&r[k % n])).collect()
    }
}

impl MatrixHandle<Rat> {
    /// `σ = Ad diag(1, μ)` on `M₂(ℚ)`.
    pub fn diagonal_twist(mu: i64) -> Self {
        Self::new(vec![rat(1, 1), rat(mu, 1)], vec![rat(1, 1), rat(1, mu)])
    }
}

impl MatrixHandle<C64> {
    pub fn with_weights(w: &[f64]) -> Self {
        Self::new(w.iter().map(|x| C64::new(*x, 0.0)).collect(), w.iter().map(|x| C64::new(1.0 / x, 0.0)).collect())
    }
}

impl<S: Scalar> AlgebraHandle for MatrixHandle<S> {
    type Elem = Vec<S>;
    type S = S;

    fn name(&self) -> String {
        format!("M_{}({})", self.n, if S::EXACT { "exact" } else { "float" })
    }

    fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    fn unit(&self) -> Vec<S> {
        let n = self.n;
        (0..n * n).map(|k| if k / n == k % n { S::one() } else { S::zero() }).collect()
    }

    fn multiply(&self, a: &Vec<S>, b: &Vec<S>) -> Vec<S> {
        let n = self.n;
        let mut out = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = &a[i * n + k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = out[i * n + j].add(&x.mul(&b[k * n + j]));
                }
            }
        }
        out
    }

    fn sigma(&self, a: &Vec<S>) -> Vec<S> {
        self.conj(a, &self.w, &self.w_inv)
    }

    fn sigma_inv(&self, a: &Vec<S>) -> Vec<S> {
        self.conj(a, &self.w_inv, &self.w)
    }

    fn coefficient(&self, a: &Vec<S>, k: usize) -> S {
        a[k].clone()
    }

    fn add(&self, a: &Vec<S>, b: &Vec<S>) -> Vec<S> {
        a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
    }

    fn scale(&self, a: &Vec<S>, s: &S) -> Vec<S> {
        a.iter().map(|x| x.mul(s)).collect()
    }

    /// Frobenius norm.
    fn elem_norm(&self, a: &Vec<S>) -> f64 {
        a.iter().map(|x| x.size().powi(2)).sum::<f64>().sqrt()
    }
}

/// `A^∞` with monomial basis of degree ≤ `max_degree` and `σ = σ_1^power`
/// (`power = 0` is the untwisted case).
#[derive(Clone, Debug)]
pub struct SymbolicHandle {
    basis: Vec<AlgebraElement>,
    monomials: Vec<Monomial>,
    power: i32,
    q_report: f64,
}

impl SymbolicHandle {
    pub fn new(max_degree: u32, power: i32) -> Self {
        let monomials = Monomial::up_to_degree(max_degree);
        let basis = monomials.iter().map(|m| AlgebraElement::from(*m)).collect();
        SymbolicHandle { basis, monomials, power, q_report: 0.5 }
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }
}

impl AlgebraHandle for SymbolicHandle {
    type Elem = AlgebraElement;
    type S = QScalar;

    fn name(&self) -> String {
        format!("A_inf(deg<={}, sigma_1^{})", self.monomials.last().map(Monomial::degree).unwrap_or(0), self.power)
    }

    fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    fn grade(&self, k: usize) -> u32 {
        self.monomials[k].degree()
    }

    fn unit(&self) -> AlgebraElement {
        AlgebraElement::one()
    }

    fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a.multiply(b)
    }

    fn sigma(&self, a: &AlgebraElement) -> AlgebraElement {
        a.sigma_pow(self.power)
    }

    fn sigma_inv(&self, a: &AlgebraElement) -> AlgebraElement {
        a.sigma_pow(-self.power)
    }

    fn coefficient(&self, a: &AlgebraElement, k: usize) -> QScalar {
        a.coefficient(&self.monomials[k])
    }

    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a + b
    }

    fn scale(&self, a: &AlgebraElement, s: &QScalar) -> AlgebraElement {
        a.scale(s)
    }

    /// `Σ |c(q)|` at `q = 0.5`; only used for growth diagnostics.
    fn elem_norm(&self, a: &AlgebraElement) -> f64 {
        a.terms().map(|(_, c)| c.eval(self.q_report).norm()).sum()
    }
}
