//! Report builders for the exact algebra, Haar and Lemma suites.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::element::{q, AlgebraElement};
use super::functional::{convolve, hochschild_d0, monomial_tuples, Functional, MultiFunctional};
use super::hopf::{coproduct, coproduct_monomial, counit_monomial, haar, haar_monomial, FractionElement};
use super::monomial::Monomial;
use crate::exec::Exec;
use crate::report::{CheckRecord, Report};
use crate::scalar::{QFraction, QScalar};

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraCheckConfig {
    pub q: f64,
    /// Monomial degree cutoff for single-argument identities.
    pub cutoff: u32,
    /// Total-degree cutoff for products of pairs and triples.
    pub pair_cutoff: u32,
    pub triple_cutoff: u32,
    pub seed: u64,
    /// Exact zero tests; otherwise residuals at `q` are compared to `tol`.
    pub exact: bool,
    pub tol: f64,
}

impl Default for AlgebraCheckConfig {
    fn default() -> Self {
        AlgebraCheckConfig { q: 0.5, cutoff: 6, pair_cutoff: 4, triple_cutoff: 6, seed: 42, exact: true, tol: 1e-8 }
    }
}

impl AlgebraCheckConfig {
    fn zero(&self, name: impl Into<String>, is_zero: bool, numeric: f64) -> CheckRecord {
        if self.exact {
            CheckRecord::exact(name, is_zero, numeric)
        } else {
            CheckRecord::below(name, numeric, self.tol)
        }
    }

    fn aggregate(&self, name: &str, res: &[(bool, f64)], count_key: &str) -> CheckRecord {
        let all = res.iter().all(|r| r.0);
        let max = res.iter().map(|r| r.1).fold(0.0, f64::max);
        self.zero(name, all, max)
            .with(count_key, res.len())
            .with("nonzero", res.iter().filter(|r| !r.0).count())
            .with("residual_evaluated_at_q", self.q)
    }
}

fn elem_size(x: &AlgebraElement, qv: f64) -> f64 {
    x.eval_coefficients(qv).iter().map(|(_, c)| c.norm()).sum()
}

/// The five defining relations, each rewritten as `lhs − rhs`.
pub fn relation_residuals() -> Vec<(&'static str, AlgebraElement)> {
    let a = AlgebraElement::alpha();
    let a_s = AlgebraElement::alpha_star();
    let b = AlgebraElement::beta();
    let b_s = AlgebraElement::beta_star();
    let one = AlgebraElement::one();
    let qb = |x: &AlgebraElement, y: &AlgebraElement, e: i32| x.multiply(y).scale(&q(e));
    vec![
        ("alpha beta = q beta alpha", a.multiply(&b) - qb(&b, &a, 1)),
        ("alpha beta* = q beta* alpha", a.multiply(&b_s) - qb(&b_s, &a, 1)),
        ("beta* beta = beta beta*", b_s.multiply(&b) - b.multiply(&b_s)),
        ("alpha* alpha + beta* beta = 1", a_s.multiply(&a) + b_s.multiply(&b) - one.clone()),
        ("alpha alpha* + q^2 beta beta* = 1", a.multiply(&a_s) + qb(&b, &b_s, 2) - one),
    ]
}

fn tensor_size(t: &super::hopf::TensorElement, qv: f64) -> f64 {
    t.terms().map(|(_, c)| c.eval(qv).norm()).sum()
}

fn fraction_size(f: &FractionElement, qv: f64) -> f64 {
    f.terms.values().map(|v| v.eval(qv).norm()).sum()
}

/// Relations, associativity, `Δ` multiplicative and coassociative, counit laws.
pub fn algebra_check(cfg: &AlgebraCheckConfig, exec: Exec) -> Report {
    let mut report = Report::new("algebra-check").with_config(cfg);
    report.timed("relations", || {
        relation_residuals()
            .into_iter()
            .map(|(name, r)| cfg.zero(format!("relation: {name}"), r.is_zero(), elem_size(&r, cfg.q)))
            .collect()
    });
    report.timed("associativity", || {
        let triples = monomial_tuples(3, cfg.triple_cutoff);
        let res = exec.map(&triples, |t| {
            let (x, y, z) = (AlgebraElement::from(t[0]), AlgebraElement::from(t[1]), AlgebraElement::from(t[2]));
            let r = x.multiply(&y).multiply(&z) - x.multiply(&y.multiply(&z));
            (r.is_zero(), elem_size(&r, cfg.q))
        });
        vec![cfg.aggregate("associativity", &res, "triples").with("total_degree_max", cfg.triple_cutoff)]
    });
    report.timed("coproduct", || {
        let pairs = monomial_tuples(2, cfg.pair_cutoff);
        let hom = exec.map(&pairs, |t| {
            let (x, y) = (AlgebraElement::from(t[0]), AlgebraElement::from(t[1]));
            let r = coproduct(&x.multiply(&y)).sub(&coproduct(&x).multiply(&coproduct(&y)));
            (r.is_zero(), tensor_size(&r, cfg.q))
        });
        let monos = Monomial::up_to_degree(cfg.cutoff);
        let coassoc = exec.map(&monos, |m| {
            let d = coproduct_monomial(m);
            let ok = d.expand(true) == d.expand(false);
            (ok, if ok { 0.0 } else { 1.0 })
        });
        let counit = exec.map(&monos, |m| {
            let d = coproduct_monomial(m);
            let x = FractionElement::from_element(&AlgebraElement::from(*m));
            let l = d.contract_left(|y| counit_monomial(y).into()).sub(&x);
            let r = d.contract_right(|y| counit_monomial(y).into()).sub(&x);
            (l.is_zero() && r.is_zero(), fraction_size(&l, cfg.q) + fraction_size(&r, cfg.q))
        });
        vec![
            cfg.aggregate("coproduct is multiplicative", &hom, "pairs").with("total_degree_max", cfg.pair_cutoff),
            cfg.aggregate("coassociativity", &coassoc, "monomials").with("degree_max", cfg.cutoff),
            cfg.aggregate("counit laws", &counit, "monomials").with("degree_max", cfg.cutoff),
        ]
    });
    report
}

fn random_element(rng: &mut ChaCha8Rng, basis: &[Monomial], terms: usize) -> AlgebraElement {
    let mut x = AlgebraElement::zero();
    while x.is_zero() {
        for _ in 0..terms {
            let m = basis[rng.gen_range(0..basis.len())];
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                x.add_term(m, QScalar::int(c));
            }
        }
    }
    x
}

/// Bi-invariance, `h(1) = 1`, the non-trace witness, `h ∘ σ_1 = h` and positivity.
pub fn haar_check(cfg: &AlgebraCheckConfig, positivity_samples: usize, exec: Exec) -> Report {
    let mut report = Report::new("haar-check").with_config(cfg);
    let monos = Monomial::up_to_degree(cfg.cutoff);
    report.timed("invariance", || {
        let res = exec.map(&monos, |m| {
            let d = coproduct_monomial(m);
            let unit = FractionElement::scalar(haar_monomial(m));
            let l = d.contract_left(haar_monomial).sub(&unit);
            let r = d.contract_right(haar_monomial).sub(&unit);
            (l.is_zero() && r.is_zero(), fraction_size(&l, cfg.q) + fraction_size(&r, cfg.q))
        });
        let sigma = exec.map(&monos, |m| {
            let x = AlgebraElement::from(*m);
            let r = &haar(&x.sigma_pow(1)) - &haar(&x);
            (r.is_zero(), r.eval(cfg.q).norm())
        });
        let norm = &haar(&AlgebraElement::one()) - &QFraction::one();
        vec![
            cfg.aggregate("h bi-invariant", &res, "monomials").with("degree_max", cfg.cutoff),
            cfg.zero("h(1) = 1", norm.is_zero(), norm.eval(cfg.q).norm()),
            cfg.aggregate("h o sigma_1 = h", &sigma, "monomials").with("degree_max", cfg.cutoff),
        ]
    });
    report.timed("not a trace", || {
        let a = AlgebraElement::alpha();
        let a_s = AlgebraElement::alpha_star();
        let gap = &haar(&a.multiply(&a_s)) - &haar(&a_s.multiply(&a));
        let one_minus = QScalar::one() - QScalar::q_pow(2);
        let expect = QFraction::over_bracket(one_minus, 2);
        let diff = &gap - &expect;
        vec![
            cfg.zero("h(aa*) - h(a*a) = (1-q^2)/(1+q^2)", diff.is_zero(), diff.eval(cfg.q).norm())
                .with("value", gap.to_string()),
            CheckRecord::new("h is not a trace", crate::report::Status::from_bool(!gap.is_zero()))
                .with_value(gap.eval(cfg.q).re),
        ]
    });
    report.timed("positivity", || {
        let basis = Monomial::up_to_degree(3);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let xs: Vec<AlgebraElement> = (0..positivity_samples).map(|_| random_element(&mut rng, &basis, 4)).collect();
        let vals = exec.map(&xs, |x| haar(&x.involution().multiply(x)).eval(cfg.q));
        let min = vals.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let imag = vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let mut c = CheckRecord::new("h(x* x) > 0", crate::report::Status::from_bool(min > 0.0 && imag < 1e-12));
        c.value = Some(min);
        vec![c.with("samples", positivity_samples).with("max_imag", imag)]
    });
    report
}

/// `(∂ξ) ∗ τ − ∂(ξ ∗ τ)` on pairs of monomials of total degree ≤ `cutoff`.
pub fn lemma_residuals(xi: &Functional, tau: &Functional, cutoff: u32, exec: Exec) -> Vec<QFraction> {
    let lhs = convolve(&hochschild_d0(xi), tau);
    let inner = convolve(&MultiFunctional::Single(xi.clone()), tau);
    let pairs = monomial_tuples(2, cutoff);
    exec.map(&pairs, |t| {
        let ab = AlgebraElement::from(t[0]).multiply(&AlgebraElement::from(t[1]));
        let ba = AlgebraElement::from(t[1]).multiply(&AlgebraElement::from(t[0]));
        let rhs = &inner.eval(&[ab]) - &inner.eval(&[ba]);
        &lhs.eval_monomials(t) - &rhs
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaConfig {
    pub q: f64,
    pub samples: usize,
    pub cutoff: u32,
    /// Support degree and size of the random `ξ`.
    pub xi_degree: u32,
    pub xi_terms: usize,
    pub seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { q: 0.5, samples: 100, cutoff: 4, xi_degree: 4, xi_terms: 6, seed: 42 }
    }
}

/// PASS iff every residual vanishes for `τ = ε`, and the `τ = h` control has a nonzero entry.
pub fn lemma_check(cfg: &LemmaConfig, exec: Exec) -> Vec<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let xis: Vec<Functional> =
        (0..cfg.samples).map(|_| Functional::random(&mut rng, cfg.xi_degree, cfg.xi_terms)).collect();
    let pairs = monomial_tuples(2, cfg.cutoff).len();
    let summarize = |tau: &Functional| {
        let mut nonzero = 0usize;
        let mut max = 0.0f64;
        for xi in &xis {
            for r in lemma_residuals(xi, tau, cfg.cutoff, exec) {
                if !r.is_zero() {
                    nonzero += 1;
                    max = max.max(r.eval(cfg.q).norm());
                }
            }
        }
        (nonzero, max)
    };
    let (nz, max) = summarize(&Functional::Counit);
    let (nz_h, max_h) = summarize(&Functional::Haar);
    vec![
        CheckRecord::exact("lemma: (d xi)*eps = d(xi*eps)", nz == 0, max)
            .with("xi_samples", cfg.samples)
            .with("pairs", pairs)
            .with("total_degree_max", cfg.cutoff),
        CheckRecord::new("lemma control: tau = h gives a nonzero entry", crate::report::Status::from_bool(nz_h > 0))
            .with_value(max_h)
            .with("nonzero_entries", nz_h),
    ]
}
