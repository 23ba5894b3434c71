use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use num_traits::{One, Zero};

use super::element::{monomial_product, AlgebraElement};
use super::monomial::Monomial;
use crate::scalar::{QFraction, QScalar};

/// Element of the algebraic tensor square, `Σ c · x ⊗ y`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<(Monomial, Monomial), QScalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::simple(Monomial::ONE, Monomial::ONE, QScalar::one())
    }

    pub fn simple(x: Monomial, y: Monomial, c: QScalar) -> Self {
        let mut t = Self::zero();
        t.add_term(x, y, c);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, Monomial), &QScalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, x: Monomial, y: Monomial, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((x, y)).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(x, y));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for ((x, y), c) in &other.terms {
            t.add_term(*x, *y, c.clone());
        }
        t
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut t = self.clone();
        for ((x, y), c) in &other.terms {
            t.add_term(*x, *y, -c.clone());
        }
        t
    }

    /// Componentwise product `(a⊗b)(c⊗d) = ac ⊗ bd`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((x1, y1), c1) in &self.terms {
            for ((x2, y2), c2) in &other.terms {
                let c = c1 * c2;
                let left = monomial_product(x1, x2);
                let right = monomial_product(y1, y2);
                for (l, cl) in left.terms() {
                    let cl = &c * cl;
                    for (r, cr) in right.terms() {
                        out.add_term(*l, *r, &cl * cr);
                    }
                }
            }
        }
        out
    }

    pub fn from_element_pair(a: &AlgebraElement, b: &AlgebraElement) -> Self {
        let mut t = Self::zero();
        for (x, cx) in a.terms() {
            for (y, cy) in b.terms() {
                t.add_term(*x, *y, cx * cy);
            }
        }
        t
    }

    /// Applies `f` to the left leg: `Σ c · f(x) y`.
    pub fn contract_left(&self, f: impl Fn(&Monomial) -> QFraction) -> FractionElement {
        let mut out = FractionElement::default();
        for ((x, y), c) in &self.terms {
            let v = f(x);
            if !v.is_zero() {
                out.add(*y, v.scale(c));
            }
        }
        out
    }

    /// Applies `f` to the right leg: `Σ c · x f(y)`.
    pub fn contract_right(&self, f: impl Fn(&Monomial) -> QFraction) -> FractionElement {
        let mut out = FractionElement::default();
        for ((x, y), c) in &self.terms {
            let v = f(y);
            if !v.is_zero() {
                out.add(*x, v.scale(c));
            }
        }
        out
    }

    /// `Δ ⊗ id` or `id ⊗ Δ` applied to produce a triple tensor.
    pub fn expand(&self, left: bool) -> TripleTensor {
        let mut out = TripleTensor::default();
        for ((x, y), c) in &self.terms {
            let split = coproduct_monomial(if left { x } else { y });
            for ((a, b), d) in split.terms() {
                let key = if left { (*a, *b, *y) } else { (*x, *a, *b) };
                let e = out.terms.entry(key).or_default();
                *e += &(c * d);
                if e.is_zero() {
                    out.terms.remove(&key);
                }
            }
        }
        out
    }
}

/// Elements whose coefficients are q-fractions, produced by contracting a leg
/// against the Haar state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FractionElement {
    pub terms: BTreeMap<Monomial, QFraction>,
}

impl FractionElement {
    pub fn add(&mut self, m: Monomial, v: QFraction) {
        let e = self.terms.entry(m).or_default();
        *e = &*e + &v;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_element(a: &AlgebraElement) -> Self {
        let mut f = Self::default();
        for (m, c) in a.terms() {
            f.add(*m, QFraction::new(c.clone()));
        }
        f
    }

    pub fn scalar(v: QFraction) -> Self {
        let mut f = Self::default();
        f.add(Monomial::ONE, v);
        f
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut f = self.clone();
        for (m, v) in &o.terms {
            f.add(*m, -v.clone());
        }
        f
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TripleTensor {
    pub terms: BTreeMap<(Monomial, Monomial, Monomial), QScalar>,
}

fn generator_coproduct(g: Monomial) -> TensorElement {
    let a = Monomial::ALPHA;
    let a_s = Monomial::ALPHA_STAR;
    let b = Monomial::BETA;
    let b_s = Monomial::BETA_STAR;
    let one = QScalar::one();
    let mq = QScalar::monomial(1, crate::scalar::Coeff::int(-1));
    let pair = |x, y, c: &QScalar, u, v, d: &QScalar| {
        TensorElement::simple(x, y, c.clone()).add(&TensorElement::simple(u, v, d.clone()))
    };
    match g {
        // Δα = α⊗α − q β*⊗β
        Monomial::ALPHA => pair(a, a, &one, b_s, b, &mq),
        // Δα* = α*⊗α* − q β⊗β*
        Monomial::ALPHA_STAR => pair(a_s, a_s, &one, b, b_s, &mq),
        // Δβ = β⊗α + α*⊗β
        Monomial::BETA => pair(b, a, &one, a_s, b, &one),
        // Δβ* = β*⊗α* + α⊗β*
        Monomial::BETA_STAR => pair(b_s, a_s, &one, a, b_s, &one),
        _ => unreachable!("not a generator"),
    }
}

type CoproductCache = DashMap<Monomial, Arc<TensorElement>>;

fn coproduct_cache() -> &'static CoproductCache {
    static CACHE: OnceLock<CoproductCache> = OnceLock::new();
    CACHE.get_or_init(DashMap::new)
}

/// `Δ(α^k β^l β*^m) = Δ(α)^k Δ(β)^l Δ(β*)^m`, memoized.
pub fn coproduct_monomial(x: &Monomial) -> Arc<TensorElement> {
    if let Some(hit) = coproduct_cache().get(x) {
        return hit.clone();
    }
    let out = if *x == Monomial::ONE {
        TensorElement::one()
    } else if x.m > 0 {
        let rest = Monomial::new(x.k, x.l, x.m - 1);
        coproduct_monomial(&rest).multiply(&generator_coproduct(Monomial::BETA_STAR))
    } else if x.l > 0 {
        let rest = Monomial::new(x.k, x.l - 1, 0);
        coproduct_monomial(&rest).multiply(&generator_coproduct(Monomial::BETA))
    } else if x.k > 0 {
        coproduct_monomial(&Monomial::new(x.k - 1, 0, 0)).multiply(&generator_coproduct(Monomial::ALPHA))
    } else {
        coproduct_monomial(&Monomial::new(x.k + 1, 0, 0)).multiply(&generator_coproduct(Monomial::ALPHA_STAR))
    };
    let out = Arc::new(out);
    coproduct_cache().insert(*x, out.clone());
    out
}

pub fn coproduct(x: &AlgebraElement) -> TensorElement {
    let mut out = TensorElement::zero();
    for (m, c) in x.terms() {
        for ((l, r), d) in coproduct_monomial(m).terms() {
            out.add_term(*l, *r, c * d);
        }
    }
    out
}

/// `ε(α) = 1, ε(β) = 0`, extended multiplicatively.
pub fn counit_monomial(x: &Monomial) -> QScalar {
    if x.l == 0 && x.m == 0 {
        QScalar::one()
    } else {
        QScalar::zero()
    }
}

pub fn counit(x: &AlgebraElement) -> QScalar {
    let mut s = QScalar::zero();
    for (m, c) in x.terms() {
        if m.l == 0 && m.m == 0 {
            s += c;
        }
    }
    s
}

/// `h(α^k β^l β*^m) = δ_{k0} δ_{lm} (1 − q²)/(1 − q^{2l+2})`.
pub fn haar_monomial(x: &Monomial) -> QFraction {
    if x.k != 0 || x.l != x.m {
        return QFraction::zero();
    }
    QFraction::over_bracket(QScalar::one(), x.l + 1)
}

pub fn haar(x: &AlgebraElement) -> QFraction {
    let mut s = QFraction::zero();
    for (m, c) in x.terms() {
        if m.k == 0 && m.l == m.m {
            s = &s + &haar_monomial(m).scale(c);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::element::mono;

    #[test]
    fn unit_and_generators() {
        assert_eq!(coproduct(&AlgebraElement::one()), TensorElement::one());
        let da = coproduct(&AlgebraElement::alpha());
        assert_eq!(da.len(), 2);
        let db = coproduct(&AlgebraElement::beta());
        let expect = TensorElement::simple(Monomial::BETA, Monomial::ALPHA, QScalar::one())
            .add(&TensorElement::simple(Monomial::ALPHA_STAR, Monomial::BETA, QScalar::one()));
        assert_eq!(db, expect);
    }

    #[test]
    fn homomorphism_on_alpha_beta() {
        let ab = mono(1, 1, 0);
        let lhs = coproduct(&ab);
        let rhs = coproduct(&AlgebraElement::alpha()).multiply(&coproduct(&AlgebraElement::beta()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn counit_values() {
        assert_eq!(counit(&AlgebraElement::one()), QScalar::one());
        assert_eq!(counit(&mono(5, 0, 0)), QScalar::one());
        assert_eq!(counit(&mono(-2, 0, 0)), QScalar::one());
        assert!(counit(&mono(1, 1, 0)).is_zero());
        let d = coproduct(&AlgebraElement::beta());
        let left = d.contract_left(|x| counit_monomial(x).into());
        assert_eq!(left, FractionElement::from_element(&AlgebraElement::beta()));
    }

    #[test]
    fn haar_values() {
        assert_eq!(haar(&AlgebraElement::one()), QFraction::one());
        let n = mono(0, 1, 1);
        assert!((haar(&n).eval(0.5).re - 0.8).abs() < 1e-15);
        let aa_s = AlgebraElement::alpha() * AlgebraElement::alpha_star();
        let a_sa = AlgebraElement::alpha_star() * AlgebraElement::alpha();
        let gap = &haar(&aa_s) - &haar(&a_sa);
        assert!((gap.eval(0.5).re - 0.6).abs() < 1e-15);
        // (1 − q²)/(1 + q²), exactly
        let expect = QFraction::over_bracket(&QScalar::one() - &QScalar::q_pow(2), 2);
        assert_eq!(gap, expect);
    }
}
