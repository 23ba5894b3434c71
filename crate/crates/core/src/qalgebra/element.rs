use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use crate::scalar::{Coeff, QScalar, Rat};

/// Finite linear combination of normal-ordered monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, QScalar>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from(Monomial::ONE)
    }

    pub fn alpha() -> Self {
        Self::from(Monomial::ALPHA)
    }

    pub fn alpha_star() -> Self {
        Self::from(Monomial::ALPHA_STAR)
    }

    pub fn beta() -> Self {
        Self::from(Monomial::BETA)
    }

    pub fn beta_star() -> Self {
        Self::from(Monomial::BETA_STAR)
    }

    pub fn scalar(c: QScalar) -> Self {
        let mut e = Self::zero();
        e.add_term(Monomial::ONE, c);
        e
    }

    pub fn term(m: Monomial, c: QScalar) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &QScalar) -> Self {
        let mut e = Self::zero();
        for (m, v) in &self.terms {
            e.add_term(*m, v * c);
        }
        e
    }

    /// Normal-ordered product.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                let c = cx * cy;
                for (z, cz) in monomial_product(x, y).terms() {
                    out.add_term(*z, &c * cz);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.multiply(self))
    }

    /// The antilinear anti-multiplicative involution.
    pub fn involution(&self) -> Self {
        let mut out = Self::zero();
        for (x, c) in &self.terms {
            // (α^k β^l β*^m)* = β^m β*^l α^{-k} = q^{k(l+m)} α^{-k} β^m β*^l
            let star = Monomial::new(-x.k, x.m, x.l);
            out.add_term(star, c.conj().shift(x.k * (x.l + x.m) as i32));
        }
        out
    }

    /// `σ_s(α^k β^l β*^m) = q^{−2ks} α^k β^l β*^m`; `None` when some `2ks` is
    /// not an integer (no exact Laurent form).
    pub fn sigma(&self, s: &Rat) -> Option<Self> {
        let mut out = Self::zero();
        for (x, c) in &self.terms {
            let e = Rat::from_integer((-2 * x.k).into()) * s;
            if !e.is_integer() {
                return None;
            }
            let e: i32 = e.to_integer().try_into().ok()?;
            out.add_term(*x, c.shift(e));
        }
        Some(out)
    }

    /// Same as [`Self::sigma`] for an integer power of `σ = σ_1`.
    pub fn sigma_pow(&self, s: i32) -> Self {
        let mut out = Self::zero();
        for (x, c) in &self.terms {
            out.add_term(*x, c.shift(-2 * x.k * s));
        }
        out
    }

    /// True iff every monomial is a pure `β, β*` word.
    pub fn in_beta_subalgebra(&self) -> bool {
        self.terms.keys().all(|m| m.k == 0)
    }

    pub fn map_coefficients(&self, f: impl Fn(&QScalar) -> QScalar) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Coefficients evaluated at a numeric `q`.
    pub fn eval_coefficients(&self, q: f64) -> Vec<(Monomial, num_complex::Complex64)> {
        self.terms.iter().map(|(m, c)| (*m, c.eval(q))).collect()
    }
}

impl From<Monomial> for AlgebraElement {
    fn from(m: Monomial) -> Self {
        Self::term(m, QScalar::one())
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, o: &AlgebraElement) -> AlgebraElement {
        let mut e = self.clone();
        for (m, c) in &o.terms {
            e.add_term(*m, c.clone());
        }
        e
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, o: AlgebraElement) -> AlgebraElement {
        &self + &o
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, o: &AlgebraElement) -> AlgebraElement {
        let mut e = self.clone();
        for (m, c) in &o.terms {
            e.add_term(*m, -c.clone());
        }
        e
    }
}

impl Sub for AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, o: AlgebraElement) -> AlgebraElement {
        &self - &o
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, o: &AlgebraElement) -> AlgebraElement {
        self.multiply(o)
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, o: AlgebraElement) -> AlgebraElement {
        self.multiply(&o)
    }
}

impl Neg for AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(&QScalar::int(-1))
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·[{m}]")?;
        }
        Ok(())
    }
}

type ProductCache = DashMap<(Monomial, Monomial), Arc<AlgebraElement>>;

fn product_cache() -> &'static ProductCache {
    static CACHE: OnceLock<ProductCache> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// `α^{k1} α^{k2}` rewritten as `Σ c · α^k N^p` with `N = ββ*` pushed right.
fn alpha_word(k1: i32, k2: i32) -> Vec<(i32, u32, QScalar)> {
    if k1 >= 0 && k2 >= 0 || k1 <= 0 && k2 <= 0 {
        return vec![(k1 + k2, 0, QScalar::one())];
    }
    // α*α = 1 − N with Nα^j = q^{−2j} α^j N;  αα* = 1 − q²N with Nα*^j = q^{2j} α*^j N.
    let (inner, shift) =
        if k1 < 0 { (alpha_word(k1 + 1, k2 - 1), -2 * (k2 - 1)) } else { (alpha_word(k1 - 1, k2 + 1), -2 * k2) };
    let mut out: BTreeMap<(i32, u32), QScalar> = BTreeMap::new();
    for (k, p, c) in inner {
        *out.entry((k, p)).or_default() += &c;
        *out.entry((k, p + 1)).or_default() += &(-c.shift(shift));
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).map(|((k, p), c)| (k, p, c)).collect()
}

/// Product of two normal-ordered monomials, memoized.
pub fn monomial_product(x: &Monomial, y: &Monomial) -> Arc<AlgebraElement> {
    if let Some(hit) = product_cache().get(&(*x, *y)) {
        return hit.clone();
    }
    // β^l β*^m α^{k} = q^{−k(l+m)} α^{k} β^l β*^m for either sign of k.
    let swap = -y.k * (x.l + x.m) as i32;
    let mut out = AlgebraElement::zero();
    for (k, p, c) in alpha_word(x.k, y.k) {
        let mono = Monomial::new(k, x.l + y.l + p, x.m + y.m + p);
        out.add_term(mono, c.shift(swap));
    }
    let out = Arc::new(out);
    product_cache().insert((*x, *y), out.clone());
    out
}

/// `a · b` for scalar-times-monomial shorthand in tests and examples.
pub fn mono(k: i32, l: u32, m: u32) -> AlgebraElement {
    AlgebraElement::from(Monomial::new(k, l, m))
}

pub fn q(e: i32) -> QScalar {
    QScalar::q_pow(e)
}

pub fn c(re: i64) -> QScalar {
    QScalar::int(re)
}

pub fn complex(re: Rat, im: Rat) -> QScalar {
    QScalar::constant(Coeff::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn a() -> AlgebraElement {
        AlgebraElement::alpha()
    }
    fn b() -> AlgebraElement {
        AlgebraElement::beta()
    }
    fn a_s() -> AlgebraElement {
        AlgebraElement::alpha_star()
    }
    fn b_s() -> AlgebraElement {
        AlgebraElement::beta_star()
    }

    #[test]
    fn beta_alpha_reorders() {
        // βα = q⁻¹ αβ
        assert_eq!(b() * a(), mono(1, 1, 0).scale(&q(-1)));
    }

    #[test]
    fn unit_law() {
        for m in Monomial::up_to_degree(3) {
            let x = AlgebraElement::from(m);
            assert_eq!(AlgebraElement::one() * x.clone(), x);
            assert_eq!(x.clone() * AlgebraElement::one(), x);
        }
    }

    #[test]
    fn alpha_star_alpha() {
        // α*α = 1 − β*β
        assert_eq!(a_s() * a(), AlgebraElement::one() - b_s() * b());
        // αα* = 1 − q² ββ*
        assert_eq!(a() * a_s(), AlgebraElement::one() - (b() * b_s()).scale(&q(2)));
    }

    #[test]
    fn five_relations_vanish() {
        let one = AlgebraElement::one();
        let rels = [
            &(&(a_s() * a()) + &(b_s() * b())) - &one,
            &(&(a() * a_s()) + &(b() * b_s()).scale(&q(2))) - &one,
            &(a() * b()) - &(b() * a()).scale(&q(1)),
            &(a() * b_s()) - &(b_s() * a()).scale(&q(1)),
            &(b_s() * b()) - &(b() * b_s()),
        ];
        for r in rels {
            assert!(r.is_zero(), "{r}");
        }
    }

    #[test]
    fn involution_examples() {
        // (αβ)* = β*α*
        assert_eq!((a() * b()).involution(), b_s() * a_s());
        // (c·α)* = conj(c)·α*
        let cc = complex(rat(2, 3), rat(-5, 7));
        let star = a().scale(&cc).involution();
        assert_eq!(star, a_s().scale(&cc.conj()));
        assert_eq!(a_s().involution().involution(), a_s());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(b().sigma(&rat(1, 1)).unwrap(), b());
        assert_eq!(a().sigma(&rat(1, 1)).unwrap(), a().scale(&q(-2)));
        assert!(a().sigma(&rat(1, 4)).is_none());
        let x = &(a() * b()) + &mono(-2, 0, 1);
        let back = x.sigma(&rat(3, 2)).unwrap().sigma(&rat(-3, 2)).unwrap();
        assert_eq!(back, x);
    }
}
