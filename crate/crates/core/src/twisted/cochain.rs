use std::sync::Arc;

use super::handles::AlgebraHandle;
use super::scalar::Scalar;
use crate::error::{Error, Result};

type Eval<H> = dyn Fn(&[<H as AlgebraHandle>::Elem]) -> <H as AlgebraHandle>::S + Send + Sync;

/// An `(n+1)`-linear functional on the handle's algebra. Degree `−1` is the
/// zero space.
pub struct Cochain<H: AlgebraHandle> {
    degree: isize,
    handle: Arc<H>,
    eval: Arc<Eval<H>>,
    /// Elementary-tensor expansion `Σ c · δ_{k₀} ⊗ ... ⊗ δ_{k_n}`, when known.
    terms: Option<Arc<Vec<(H::S, Vec<usize>)>>>,
}

impl<H: AlgebraHandle> Clone for Cochain<H> {
    fn clone(&self) -> Self {
        Cochain { degree: self.degree, handle: self.handle.clone(), eval: self.eval.clone(), terms: self.terms.clone() }
    }
}

impl<H: AlgebraHandle> std::fmt::Debug for Cochain<H> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cochain").field("degree", &self.degree).field("terms", &self.terms).finish()
    }
}

impl<H: AlgebraHandle> Cochain<H> {
    pub fn from_fn(handle: Arc<H>, degree: isize, f: impl Fn(&[H::Elem]) -> H::S + Send + Sync + 'static) -> Self {
        Cochain { degree, handle, eval: Arc::new(f), terms: None }
    }

    pub fn zero(handle: Arc<H>, degree: isize) -> Self {
        Self::from_fn(handle, degree, |_| H::S::zero())
    }

    /// `Σ c · δ_{k₀} ⊗ ... ⊗ δ_{k_n}` over dual-basis functionals.
    pub fn elementary(handle: Arc<H>, terms: Vec<(H::S, Vec<usize>)>) -> Self {
        let degree = terms.first().map(|t| t.1.len() as isize - 1).unwrap_or(0);
        assert!(terms.iter().all(|t| t.1.len() as isize == degree + 1), "mixed arity");
        let terms = Arc::new(terms);
        let (h, t) = (handle.clone(), terms.clone());
        let eval = move |args: &[H::Elem]| {
            let mut s = H::S::zero();
            for (c, idx) in t.iter() {
                let mut v = c.clone();
                for (a, k) in args.iter().zip(idx) {
                    if v.is_zero() {
                        break;
                    }
                    v = v.mul(&h.coefficient(a, *k));
                }
                s = s.add(&v);
            }
            s
        };
        Cochain { degree, handle, eval: Arc::new(eval), terms: Some(terms) }
    }

    pub fn degree(&self) -> isize {
        self.degree
    }

    pub fn arity(&self) -> usize {
        (self.degree + 1).max(0) as usize
    }

    pub fn handle(&self) -> &Arc<H> {
        &self.handle
    }

    pub fn terms(&self) -> Option<&[(H::S, Vec<usize>)]> {
        self.terms.as_deref().map(|v| v.as_slice())
    }

    pub fn eval(&self, args: &[H::Elem]) -> H::S {
        if self.degree < 0 {
            return H::S::zero();
        }
        assert_eq!(args.len(), self.arity(), "cochain of degree {} evaluated on {} arguments", self.degree, args.len());
        (self.eval)(args)
    }

    pub fn scale(&self, s: H::S) -> Self {
        let f = self.eval.clone();
        Self::from_fn(self.handle.clone(), self.degree, move |a| f(a).mul(&s))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding cochains of different degree");
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Self::from_fn(self.handle.clone(), self.degree, move |a| f(a).add(&g(a)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(H::S::one().neg()))
    }

    fn sum(handle: &Arc<H>, degree: isize, parts: Vec<Self>) -> Self {
        if degree < 0 || parts.is_empty() {
            return Self::zero(handle.clone(), degree);
        }
        let fs: Vec<Arc<Eval<H>>> = parts.into_iter().map(|p| p.eval).collect();
        Self::from_fn(handle.clone(), degree, move |a| fs.iter().fold(H::S::zero(), |s, f| s.add(&f(a))))
    }

    /// `φ ∘ σ^{⊗(n+1)}`.
    pub fn pull_sigma(&self) -> Self {
        let (f, h) = (self.eval.clone(), self.handle.clone());
        Self::from_fn(self.handle.clone(), self.degree, move |a| {
            let s: Vec<H::Elem> = a.iter().map(|x| h.sigma(x)).collect();
            f(&s)
        })
    }
}

fn sign<S: Scalar>(n: isize) -> S {
    if n % 2 == 0 {
        S::one()
    } else {
        S::one().neg()
    }
}

/// `(T f)(a₀..a_n) = (−1)^n f(σ(a_n), a₀, ..., a_{n−1})`.
pub fn op_t<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n < 0 {
        return phi.clone();
    }
    let (f, h) = (phi.eval.clone(), phi.handle.clone());
    Cochain::from_fn(phi.handle.clone(), n, move |a| {
        let mut args = Vec::with_capacity(a.len());
        args.push(h.sigma(&a[a.len() - 1]));
        args.extend_from_slice(&a[..a.len() - 1]);
        f(&args).mul(&sign::<H::S>(n))
    })
}

/// `(T⁻¹ f)(a₀..a_n) = (−1)^n f(a₁, ..., a_n, σ⁻¹(a₀))`.
pub fn op_t_inv<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n < 0 {
        return phi.clone();
    }
    let (f, h) = (phi.eval.clone(), phi.handle.clone());
    Cochain::from_fn(phi.handle.clone(), n, move |a| {
        let mut args = Vec::with_capacity(a.len());
        args.extend_from_slice(&a[1..]);
        args.push(h.sigma_inv(&a[0]));
        f(&args).mul(&sign::<H::S>(n))
    })
}

pub fn op_t_pow<H: AlgebraHandle>(phi: &Cochain<H>, k: i64) -> Cochain<H> {
    let mut out = phi.clone();
    for _ in 0..k.unsigned_abs() {
        out = if k > 0 { op_t(&out) } else { op_t_inv(&out) };
    }
    out
}

/// `N_n = Σ_{j=0}^{n} T_n^j`.
pub fn op_n<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n < 0 {
        return phi.clone();
    }
    let parts = (0..=n as i64).map(|j| op_t_pow(phi, j)).collect();
    Cochain::sum(&phi.handle, n, parts)
}

/// `(U_n f)(a₀..a_{n−1}) = (−1)^n f(a₀, ..., a_{n−1}, 1)`.
pub fn op_u<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n <= 0 {
        return Cochain::zero(phi.handle.clone(), n - 1);
    }
    let (f, h) = (phi.eval.clone(), phi.handle.clone());
    Cochain::from_fn(phi.handle.clone(), n - 1, move |a| {
        let mut args = a.to_vec();
        args.push(h.unit());
        f(&args).mul(&sign::<H::S>(n))
    })
}

/// `(V_n f)(a₀..a_{n+1}) = (−1)^{n+1} f(σ(a_{n+1}) a₀, a₁, ..., a_n)`.
pub fn op_v<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n < 0 {
        return Cochain::zero(phi.handle.clone(), n + 1);
    }
    let (f, h) = (phi.eval.clone(), phi.handle.clone());
    Cochain::from_fn(phi.handle.clone(), n + 1, move |a| {
        let last = &a[a.len() - 1];
        let mut args = Vec::with_capacity(a.len() - 1);
        args.push(h.multiply(&h.sigma(last), &a[0]));
        args.extend_from_slice(&a[1..a.len() - 1]);
        f(&args).mul(&sign::<H::S>(n + 1))
    })
}

/// `b_n = Σ_{j=0}^{n+1} T_{n+1}^{−j−1} V_n T_n^j`.
pub fn op_b<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n < 0 {
        return Cochain::zero(phi.handle.clone(), n + 1);
    }
    let parts = (0..=(n + 1) as i64).map(|j| op_t_pow(&op_v(&op_t_pow(phi, j)), -j - 1)).collect();
    Cochain::sum(&phi.handle, n + 1, parts)
}

/// `B_n = N_{n−1} U_n (T_n − I)`; `B_0 = 0`.
pub fn op_big_b<H: AlgebraHandle>(phi: &Cochain<H>) -> Cochain<H> {
    let n = phi.degree;
    if n <= 0 {
        return Cochain::zero(phi.handle.clone(), n - 1);
    }
    op_n(&op_u(&op_t(phi).sub(phi)))
}

/// A cochain placed in `C^{n,m} ≅ C^{n−m}`.
#[derive(Clone, Debug)]
pub struct BiCochain<H: AlgebraHandle> {
    pub n: usize,
    pub m: usize,
    pub cochain: Cochain<H>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    D1,
    D2,
}

impl<H: AlgebraHandle> BiCochain<H> {
    pub fn new(n: usize, m: usize, cochain: Cochain<H>) -> Result<Self> {
        if n < m || cochain.degree() != (n - m) as isize {
            return Err(Error::Config(format!("cochain of degree {} does not live in C^({n},{m})", cochain.degree())));
        }
        Ok(BiCochain { n, m, cochain })
    }
}

/// `d₁ = (n−m+1) b : C^{n,m} → C^{n+1,m}` and `d₂ = B/(n−m) : C^{n,m} → C^{n,m+1}`.
pub fn bicomplex_d<H: AlgebraHandle>(phi: &BiCochain<H>, which: Which) -> Result<BiCochain<H>> {
    let k = (phi.n - phi.m) as i64;
    match which {
        Which::D1 => {
            Ok(BiCochain { n: phi.n + 1, m: phi.m, cochain: op_b(&phi.cochain).scale(H::S::from_ratio(k + 1, 1)) })
        }
        Which::D2 => {
            if k == 0 {
                return Err(Error::BicomplexDiagonal(phi.n));
            }
            Ok(BiCochain { n: phi.n, m: phi.m + 1, cochain: op_big_b(&phi.cochain).scale(H::S::from_ratio(1, k)) })
        }
    }
}
