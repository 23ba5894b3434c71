use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::element::{monomial_product, AlgebraElement};
use super::hopf::{coproduct_monomial, counit_monomial, haar_monomial};
use super::monomial::Monomial;
use crate::exec::Exec;
use crate::report::{CheckRecord, Report, Status};
use crate::scalar::{QFraction, QScalar};

/// Linear functional on `A^∞`, given by its values on the monomial basis.
#[derive(Clone, Debug, PartialEq)]
pub enum Functional {
    /// Finitely supported: zero off the listed monomials.
    Support(BTreeMap<Monomial, QFraction>),
    Counit,
    Haar,
}

impl Functional {
    /// Dual basis functional `δ_m` (the coefficient of `m`).
    pub fn delta(m: Monomial) -> Self {
        Functional::Support(BTreeMap::from([(m, QFraction::one())]))
    }

    pub fn from_values(values: impl IntoIterator<Item = (Monomial, QFraction)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, v) in values {
            if !v.is_zero() {
                map.insert(m, v);
            }
        }
        Functional::Support(map)
    }

    /// `terms` random monomials of degree ≤ `max_degree` with small integer values.
    pub fn random<R: Rng>(rng: &mut R, max_degree: u32, terms: usize) -> Self {
        let basis = Monomial::up_to_degree(max_degree);
        let mut map = BTreeMap::new();
        for _ in 0..terms {
            let m = basis[rng.gen_range(0..basis.len())];
            let v: i64 = rng.gen_range(-5..=5);
            if v != 0 {
                map.insert(m, QFraction::new(QScalar::int(v)));
            }
        }
        Functional::Support(map)
    }

    pub fn on_monomial(&self, m: &Monomial) -> QFraction {
        match self {
            Functional::Support(map) => map.get(m).cloned().unwrap_or_default(),
            Functional::Counit => counit_monomial(m).into(),
            Functional::Haar => haar_monomial(m),
        }
    }

    pub fn eval(&self, x: &AlgebraElement) -> QFraction {
        let mut s = QFraction::zero();
        for (m, c) in x.terms() {
            let v = self.on_monomial(m);
            if !v.is_zero() {
                s = &s + &v.scale(c);
            }
        }
        s
    }

    pub fn at_one(&self) -> QFraction {
        self.on_monomial(&Monomial::ONE)
    }

    /// True iff `f(xy) = f(yx)` for all monomials with `deg x + deg y ≤ cutoff`.
    pub fn is_trace_on(&self, cutoff: u32) -> bool {
        let d0 = MultiFunctional::Coboundary(self.clone());
        monomial_tuples(2, cutoff).iter().all(|t| d0.eval_monomials(t).is_zero())
    }
}

/// Serialized functional: monomial key → q-fraction value.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalRepr {
    Support { values: BTreeMap<String, FractionRepr> },
    Counit,
    Haar,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FractionRepr {
    pub numerator: QScalar,
    /// `(k, multiplicity)` of the q-integer `[k]` in the denominator.
    pub denominator: Vec<(u32, u32)>,
}

impl From<&Functional> for FunctionalRepr {
    fn from(f: &Functional) -> Self {
        match f {
            Functional::Counit => FunctionalRepr::Counit,
            Functional::Haar => FunctionalRepr::Haar,
            Functional::Support(map) => FunctionalRepr::Support {
                values: map
                    .iter()
                    .map(|(m, v)| {
                        let r = FractionRepr {
                            numerator: v.numerator().clone(),
                            denominator: v.denominator_factors().iter().map(|(k, m)| (*k, *m)).collect(),
                        };
                        (m.to_string(), r)
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<&FunctionalRepr> for Functional {
    type Error = crate::error::Error;
    fn try_from(r: &FunctionalRepr) -> Result<Self, Self::Error> {
        Ok(match r {
            FunctionalRepr::Counit => Functional::Counit,
            FunctionalRepr::Haar => Functional::Haar,
            FunctionalRepr::Support { values } => {
                let mut map = BTreeMap::new();
                for (k, v) in values {
                    let mut f = QFraction::new(v.numerator.clone());
                    for (b, mult) in &v.denominator {
                        for _ in 0..*mult {
                            f = &f * &QFraction::over_bracket(QScalar::one(), *b);
                        }
                    }
                    map.insert(k.parse()?, f);
                }
                Functional::Support(map)
            }
        })
    }
}

/// Multilinear functional on `A^∞_m`, evaluated exactly on monomial tuples.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiFunctional {
    Single(Functional),
    /// `Σ c · f₁ ⊗ ... ⊗ f_m`.
    Tensor {
        arity: usize,
        terms: Vec<(QFraction, Vec<Functional>)>,
    },
    /// `(φ ∗ ψ)(a₁..a_m) = φ(a₁⁽¹⁾..a_m⁽¹⁾) ψ(a₁⁽²⁾···a_m⁽²⁾)`.
    Convolution(Box<MultiFunctional>, Functional),
    /// `(∂ξ)(a, b) = ξ(ab) − ξ(ba)`.
    Coboundary(Functional),
    Combination(Vec<(QFraction, MultiFunctional)>),
}

impl MultiFunctional {
    pub fn arity(&self) -> usize {
        match self {
            MultiFunctional::Single(_) => 1,
            MultiFunctional::Tensor { arity, .. } => *arity,
            MultiFunctional::Convolution(phi, _) => phi.arity(),
            MultiFunctional::Coboundary(_) => 2,
            MultiFunctional::Combination(parts) => parts.first().map(|(_, p)| p.arity()).unwrap_or(0),
        }
    }

    pub fn eval_monomials(&self, args: &[Monomial]) -> QFraction {
        debug_assert_eq!(args.len(), self.arity());
        match self {
            MultiFunctional::Single(f) => f.on_monomial(&args[0]),
            MultiFunctional::Tensor { terms, .. } => {
                let mut s = QFraction::zero();
                for (c, fs) in terms {
                    let mut v = c.clone();
                    for (f, a) in fs.iter().zip(args) {
                        if v.is_zero() {
                            break;
                        }
                        v = &v * &f.on_monomial(a);
                    }
                    s = &s + &v;
                }
                s
            }
            MultiFunctional::Coboundary(xi) => {
                let ab = monomial_product(&args[0], &args[1]);
                let ba = monomial_product(&args[1], &args[0]);
                &xi.eval(&ab) - &xi.eval(&ba)
            }
            MultiFunctional::Combination(parts) => {
                let mut s = QFraction::zero();
                for (c, p) in parts {
                    s = &s + &(c * &p.eval_monomials(args));
                }
                s
            }
            MultiFunctional::Convolution(phi, psi) => convolve_eval(phi, psi, args),
        }
    }

    /// Multilinear extension to algebra elements.
    pub fn eval(&self, args: &[AlgebraElement]) -> QFraction {
        assert_eq!(args.len(), self.arity(), "arity mismatch");
        let mut s = QFraction::zero();
        let mut idx = vec![0usize; args.len()];
        let lists: Vec<Vec<(&Monomial, &QScalar)>> = args.iter().map(|a| a.terms().collect()).collect();
        if lists.iter().any(Vec::is_empty) {
            return s;
        }
        loop {
            let monos: Vec<Monomial> = idx.iter().zip(&lists).map(|(i, l)| *l[*i].0).collect();
            let v = self.eval_monomials(&monos);
            if !v.is_zero() {
                let mut c = QScalar::one();
                for (i, l) in idx.iter().zip(&lists) {
                    c = &c * l[*i].1;
                }
                s = &s + &v.scale(&c);
            }
            if !advance(&mut idx, &lists.iter().map(Vec::len).collect::<Vec<_>>()) {
                return s;
            }
        }
    }
}

fn advance(idx: &mut [usize], lens: &[usize]) -> bool {
    for p in (0..idx.len()).rev() {
        idx[p] += 1;
        if idx[p] < lens[p] {
            return true;
        }
        idx[p] = 0;
    }
    false
}

fn convolve_eval(phi: &MultiFunctional, psi: &Functional, args: &[Monomial]) -> QFraction {
    let splits: Vec<Vec<(Monomial, Monomial, QScalar)>> =
        args.iter().map(|a| coproduct_monomial(a).terms().map(|((x, y), c)| (*x, *y, c.clone())).collect()).collect();
    let lens: Vec<usize> = splits.iter().map(Vec::len).collect();
    let mut idx = vec![0usize; args.len()];
    let mut s = QFraction::zero();
    loop {
        let first: Vec<Monomial> = idx.iter().zip(&splits).map(|(i, sp)| sp[*i].0).collect();
        let v = phi.eval_monomials(&first);
        if !v.is_zero() {
            let mut second = AlgebraElement::one();
            let mut c = QScalar::one();
            for (i, sp) in idx.iter().zip(&splits) {
                second = second.multiply(&AlgebraElement::from(sp[*i].1));
                c = &c * &sp[*i].2;
            }
            let w = psi.eval(&second);
            if !w.is_zero() {
                s = &s + &(&v * &w).scale(&c);
            }
        }
        if !advance(&mut idx, &lens) {
            return s;
        }
    }
}

pub fn convolve(phi: &MultiFunctional, psi: &Functional) -> MultiFunctional {
    MultiFunctional::Convolution(Box::new(phi.clone()), psi.clone())
}

pub fn hochschild_d0(xi: &Functional) -> MultiFunctional {
    MultiFunctional::Coboundary(xi.clone())
}

/// All `arity`-tuples of monomials whose degrees sum to at most `max_total`.
pub fn monomial_tuples(arity: usize, max_total: u32) -> Vec<Vec<Monomial>> {
    let basis = Monomial::up_to_degree(max_total);
    let mut out: Vec<(Vec<Monomial>, u32)> = vec![(Vec::new(), 0)];
    for _ in 0..arity {
        let mut next = Vec::new();
        for (t, d) in &out {
            for m in &basis {
                let nd = d + m.degree();
                if nd <= max_total {
                    let mut t2 = t.clone();
                    t2.push(*m);
                    next.push((t2, nd));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(t, _)| t).collect()
}

/// Max residual of `φ ∗ ψ − ψ(1) φ` over monomial tuples with total degree
/// ≤ `cutoff`, for each witness `ψ`. PASS iff every residual is exactly zero.
pub fn invariance_check(phi: &MultiFunctional, witnesses: &[Functional], cutoff: u32, exec: Exec) -> Report {
    assert!(!witnesses.is_empty(), "invariance_check needs at least one witness");
    let tuples = monomial_tuples(phi.arity(), cutoff);
    let mut report = Report::new("invariance-check");
    for (w, psi) in witnesses.iter().enumerate() {
        let conv = convolve(phi, psi);
        let at_one = psi.at_one();
        let res: Vec<(bool, f64)> = exec.map(&tuples, |t| {
            let r = &conv.eval_monomials(t) - &(&at_one * &phi.eval_monomials(t));
            (r.is_zero(), r.eval(0.5).norm())
        });
        let all_zero = res.iter().all(|r| r.0);
        let max = res.iter().map(|r| r.1).fold(0.0, f64::max);
        let nonzero = res.iter().filter(|r| !r.0).count();
        report.push(
            CheckRecord::exact(format!("invariance[witness {w}]"), all_zero, max)
                .with("tuples", tuples.len())
                .with("nonzero_tuples", nonzero)
                .with("residual_evaluated_at_q", 0.5),
        );
    }
    if report.checks.iter().all(|c| c.status == Status::Pass) {
        report.status = Status::Pass;
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::element::mono;

    #[test]
    fn counit_is_convolution_unit() {
        let phi = MultiFunctional::Tensor {
            arity: 2,
            terms: vec![(
                QFraction::one(),
                vec![Functional::delta(Monomial::ALPHA), Functional::delta(Monomial::new(0, 1, 1))],
            )],
        };
        let conv = convolve(&phi, &Functional::Counit);
        for t in monomial_tuples(2, 4) {
            assert_eq!(conv.eval_monomials(&t), phi.eval_monomials(&t), "{t:?}");
        }
    }

    #[test]
    fn delta_alpha_convolved_with_counit() {
        let d = MultiFunctional::Single(Functional::delta(Monomial::ALPHA));
        let conv = convolve(&d, &Functional::Counit);
        assert_eq!(conv.eval(&[AlgebraElement::alpha()]), QFraction::one());
    }

    #[test]
    fn haar_is_invariant_and_delta_alpha_is_not() {
        let h = MultiFunctional::Single(Functional::Haar);
        let r = invariance_check(&h, &[Functional::delta(Monomial::ALPHA), Functional::Counit], 6, Exec::default());
        assert!(r.passed(), "{:?}", r.failing());
        let d = MultiFunctional::Single(Functional::delta(Monomial::ALPHA));
        let r = invariance_check(&d, &[Functional::delta(Monomial::ALPHA)], 3, Exec::default());
        assert!(!r.passed());
    }

    #[test]
    fn empty_arguments_give_zero() {
        let h = MultiFunctional::Single(Functional::Haar);
        assert!(h.eval(&[AlgebraElement::zero()]).is_zero());
    }

    #[test]
    fn coboundary_of_counit_vanishes_and_of_haar_does_not() {
        assert!(Functional::Counit.is_trace_on(4));
        assert!(!Functional::Haar.is_trace_on(2));
        let dh = hochschild_d0(&Functional::Haar);
        let v = dh.eval(&[AlgebraElement::alpha(), AlgebraElement::alpha_star()]);
        assert!((v.eval(0.5).re - 0.6).abs() < 1e-15);
        let _ = mono(0, 0, 0);
    }

    #[test]
    fn functional_serde_round_trip() {
        let f = Functional::from_values([
            (Monomial::ALPHA, QFraction::over_bracket(QScalar::int(3), 2)),
            (Monomial::new(0, 2, 2), QFraction::new(QScalar::q_pow(-1))),
        ]);
        let json = serde_json::to_string(&FunctionalRepr::from(&f)).unwrap();
        let back: FunctionalRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(Functional::try_from(&back).unwrap(), f);
    }
}
