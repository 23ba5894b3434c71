use std::sync::Arc;

use dashmap::DashMap;
use num_complex::Complex64 as C64;

use super::engine::FEngine;
use super::oracle;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::pw::operators::SpectralData;
use crate::pw::sparse::SparseOperator;
use crate::qalgebra::{AlgebraElement, Monomial};
use num_traits::{One, Zero};

use crate::scalar::{rat_to_f64, rational_from_f64, Coeff, QScalar, Rat};
use serde::Serialize;

use crate::twisted::{op_b, op_big_b, AlgebraHandle, Cochain};

/// Principal square root of `2i`.
pub const SQRT_2I: C64 = C64 { re: 1.0, im: 1.0 };

/// `A^∞` acting through the truncated representation, with `σ = σ_1`
/// and numeric coefficients at the representation's `q`.
#[derive(Clone, Debug)]
pub struct OperatorHandle {
    q: f64,
    basis: Vec<AlgebraElement>,
    monomials: Vec<Monomial>,
}

impl OperatorHandle {
    pub fn new(q: f64) -> Self {
        let monomials = Monomial::up_to_degree(1);
        let basis = monomials.iter().map(|m| AlgebraElement::from(*m)).collect();
        OperatorHandle { q, basis, monomials }
    }
}

impl AlgebraHandle for OperatorHandle {
    type Elem = AlgebraElement;
    type S = C64;

    fn name(&self) -> String {
        format!("pi(A_inf), q={}", self.q)
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
        a.sigma_pow(1)
    }

    fn sigma_inv(&self, a: &AlgebraElement) -> AlgebraElement {
        a.sigma_pow(-1)
    }

    fn coefficient(&self, a: &AlgebraElement, k: usize) -> C64 {
        a.coefficient(&self.monomials[k]).eval(self.q)
    }

    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a + b
    }

    fn scale(&self, a: &AlgebraElement, s: &C64) -> AlgebraElement {
        a.scale(&QScalar::constant(Coeff::new(rational_from_f64(s.re), rational_from_f64(s.im))))
    }

    fn elem_norm(&self, a: &AlgebraElement) -> f64 {
        a.terms().map(|(_, c)| c.eval(self.q).norm()).sum()
    }
}

/// The odd JLO components `φ_{2n+1}(a₀,…,a_{2n+1}) = √(2i) F_{2n+1}(a₀, [D,a₁], …, [D,a_{2n+1}])`
/// on a truncation, with represented elements cached.
#[derive(Debug)]
pub struct Jlo {
    sd: Arc<SpectralData>,
    engine: FEngine,
    plain: DashMap<AlgebraElement, Arc<SparseOperator>>,
    commuted: DashMap<AlgebraElement, Arc<SparseOperator>>,
}

impl Jlo {
    pub fn new(sd: Arc<SpectralData>, exec: Exec) -> Result<Self> {
        let engine = FEngine::new(&sd, exec)?;
        Ok(Jlo { sd, engine, plain: DashMap::new(), commuted: DashMap::new() })
    }

    pub fn spectral(&self) -> &Arc<SpectralData> {
        &self.sd
    }

    pub fn engine(&self) -> &FEngine {
        &self.engine
    }

    pub fn represent(&self, a: &AlgebraElement) -> Arc<SparseOperator> {
        let key = a.clone();
        if let Some(hit) = self.plain.get(&key) {
            return hit.clone();
        }
        let op = Arc::new(self.sd.basis.represent(a, self.engine.exec()));
        self.plain.insert(key, op.clone());
        op
    }

    fn commutator(&self, a: &AlgebraElement) -> Arc<SparseOperator> {
        let key = a.clone();
        if let Some(hit) = self.commuted.get(&key) {
            return hit.clone();
        }
        let op = Arc::new(self.sd.dirac_commutator(&self.represent(a)));
        self.commuted.insert(key, op.clone());
        op
    }

    /// `φ_{2n+1}` on `2n+2` algebra elements.
    pub fn chern_eval(&self, args: &[AlgebraElement]) -> Result<C64> {
        if args.len() < 2 || !args.len().is_multiple_of(2) {
            return Err(Error::Config(format!(
                "odd Chern component takes an even number of arguments, got {}",
                args.len()
            )));
        }
        let mut ops = vec![self.represent(&args[0])];
        ops.extend(args[1..].iter().map(|a| self.commutator(a)));
        let refs: Vec<&SparseOperator> = ops.iter().map(|o| o.as_ref()).collect();
        Ok(SQRT_2I * self.engine.f(&refs)?)
    }

    /// `φ_{2n+1}` as a cochain over [`OperatorHandle`].
    pub fn cochain(self: &Arc<Self>, n: usize) -> Cochain<OperatorHandle> {
        let h = Arc::new(OperatorHandle::new(self.sd.q()));
        let me = self.clone();
        Cochain::from_fn(h, (2 * n + 1) as isize, move |a| me.chern_eval(a).unwrap_or(C64::new(f64::NAN, f64::NAN)))
    }
}

/// Components of `(b+B)φ°` on a sample of argument tuples.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleResidual {
    /// Degree the component lands in, `2k`.
    pub degree: usize,
    pub tuples: usize,
    /// `max |bφ_{2k−1} + Bφ_{2k+1}|`.
    pub residual: f64,
    /// `max(|bφ_{2k−1}|, |Bφ_{2k+1}|)`, the size of what cancels.
    pub scale: f64,
    /// Heat mass of the shells a chain touching the truncation boundary can visit.
    pub tail_bound: f64,
}

/// `Σ e^{−(n2+1)²}(Σ_i q^{−2i})²` over shells `n2 ≥ n2max − reach`, including
/// everything beyond the truncation.
pub fn boundary_heat_mass(q: f64, n2max: u32, reach: u32) -> f64 {
    let from = n2max.saturating_sub(reach);
    let inside: f64 = (from..=n2max)
        .map(|n2| {
            let n = n2 as i32;
            let w: f64 = (-n..=n).step_by(2).map(|i2| q.powi(-i2)).sum();
            (-((n2 + 1) as f64).powi(2)).exp() * w * w
        })
        .sum();
    inside + crate::pw::operators::heat_tail(q, n2max, 1.0)
}

/// Weight-zero tuples of monomials of degree ≤ 2 with total degree ≤ `max_total`.
/// Tuples of odd length built from generators alone have odd total weight, so
/// products are needed for a non-vacuous sample.
pub fn sample_tuples(arity: usize, max_total: u32) -> Vec<Vec<AlgebraElement>> {
    let ms = Monomial::up_to_degree(2);
    let mut out = Vec::new();
    let mut stack: Vec<Monomial> = Vec::with_capacity(arity);
    fn rec(
        ms: &[Monomial],
        arity: usize,
        max_total: u32,
        stack: &mut Vec<Monomial>,
        out: &mut Vec<Vec<AlgebraElement>>,
    ) {
        let deg: u32 = stack.iter().map(Monomial::degree).sum();
        if stack.len() == arity {
            let wl: i32 = stack.iter().map(Monomial::w_left).sum();
            let wr: i32 = stack.iter().map(Monomial::w_right).sum();
            if wl == 0 && wr == 0 {
                out.push(stack.iter().map(|m| AlgebraElement::from(*m)).collect());
            }
            return;
        }
        for m in ms {
            if deg + m.degree() <= max_total {
                stack.push(*m);
                rec(ms, arity, max_total, stack, out);
                stack.pop();
            }
        }
    }
    rec(&ms, arity, max_total, &mut stack, &mut out);
    out
}

/// The degree-`2k` component `bφ_{2k−1} + Bφ_{2k+1}` of `(b+B)φ°` on `tuples`
/// (each of length `2k+1`), with `σ = σ_1`.
pub fn cocycle_residual(jlo: &Arc<Jlo>, k: usize, tuples: &[Vec<AlgebraElement>]) -> Result<CocycleResidual> {
    if let Some(t) = tuples.iter().find(|t| t.len() != 2 * k + 1) {
        return Err(Error::Dimension { expected: 2 * k + 1, got: t.len() });
    }
    let big_b = op_big_b(&jlo.cochain(k));
    let small_b = if k > 0 { Some(op_b(&jlo.cochain(k - 1))) } else { None };
    let (mut residual, mut scale) = (0.0f64, 0.0f64);
    for t in tuples {
        let x = small_b.as_ref().map(|c| c.eval(t)).unwrap_or_default();
        let y = big_b.eval(t);
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Config("non-finite cochain value".into()));
        }
        residual = residual.max((x + y).norm());
        scale = scale.max(x.norm()).max(y.norm());
    }
    let n2max = jlo.sd.basis.n2max();
    Ok(CocycleResidual {
        degree: 2 * k,
        tuples: tuples.len(),
        residual,
        scale,
        tail_bound: boundary_heat_mass(jlo.sd.q(), n2max, 2 * k as u32 + 2),
    })
}

/// Deterministic subsample of [`sample_tuples`] for the component landing in
/// degree `2k`.
pub fn default_samples(k: usize) -> Vec<Vec<AlgebraElement>> {
    match k {
        0 => sample_tuples(1, 2),
        1 => sample_tuples(3, 4),
        _ => {
            let all = sample_tuples(2 * k + 1, 6);
            let stride = (all.len() / 200).max(1);
            all.into_iter().step_by(stride).collect()
        }
    }
}

/// Exact scalar `√m · π^{p/2} · e^{iπθ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub modulus_sq: Rat,
    pub pi_half_power: i32,
    pub phase: Rat,
}

impl Prefactor {
    pub fn rational(r: Rat) -> Self {
        let phase = if r < Rat::zero() { Rat::one() } else { Rat::zero() };
        Prefactor { modulus_sq: &r * &r, pi_half_power: 0, phase }
    }

    /// Principal square root of `m · π^p · e^{iπθ}`, `θ ∈ (−1, 1]`.
    pub fn sqrt_of(m: Rat, pi_power: i32, theta: Rat) -> Self {
        assert!(theta > -Rat::one() && theta <= Rat::one());
        Prefactor { modulus_sq: m, pi_half_power: pi_power, phase: theta / Rat::from_integer(2.into()) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let two = Rat::from_integer(2.into());
        let mut phase = &self.phase + &o.phase;
        while phase > Rat::one() {
            phase -= &two;
        }
        while phase <= -Rat::one() {
            phase += &two;
        }
        Prefactor {
            modulus_sq: &self.modulus_sq * &o.modulus_sq,
            pi_half_power: self.pi_half_power + o.pi_half_power,
            phase,
        }
    }

    pub fn inv(&self) -> Self {
        Prefactor {
            modulus_sq: self.modulus_sq.recip(),
            pi_half_power: -self.pi_half_power,
            phase: -self.phase.clone(),
        }
        .mul(&Prefactor::rational(Rat::one()))
    }

    pub fn to_c64(&self) -> C64 {
        let m = rat_to_f64(&self.modulus_sq).sqrt() * std::f64::consts::PI.powf(self.pi_half_power as f64 / 2.0);
        C64::from_polar(m, std::f64::consts::PI * rat_to_f64(&self.phase))
    }
}

fn factorial(n: usize) -> Rat {
    (1..=n).fold(Rat::one(), |acc, k| acc * Rat::from_integer((k as i64).into()))
}

/// `√(2i) · (1/√(2πi)) · (2n+1)! · n!/(2n+1)! = n!/√π`, checked exactly.
pub fn prefactor_identity(n: usize) -> bool {
    let half = Rat::new(1.into(), 2.into());
    let sqrt_2i = Prefactor::sqrt_of(Rat::from_integer(2.into()), 0, half.clone());
    let inv_sqrt_2pi_i = Prefactor::sqrt_of(Rat::from_integer(2.into()), 1, half).inv();
    let lhs = sqrt_2i
        .mul(&inv_sqrt_2pi_i)
        .mul(&Prefactor::rational(factorial(2 * n + 1)))
        .mul(&Prefactor::rational(factorial(n) / factorial(2 * n + 1)));
    let rhs = Prefactor::rational(factorial(n)).mul(&Prefactor {
        modulus_sq: Rat::one(),
        pi_half_power: -1,
        phase: Rat::zero(),
    });
    lhs == rhs
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingRecord {
    pub q: f64,
    pub n2max: u32,
    pub terms: usize,
    /// `(−1)^n n! F_{2n+1}(u*, [D,u], [D,u*], …, [D,u]) / √π` as `[re, im]`.
    pub term_values: Vec<[f64; 2]>,
    pub partial_sums: Vec<[f64; 2]>,
    pub unitarity_defect: f64,
    /// `‖(u − I) P_top‖` on the outermost shell: how much of `u`'s
    /// nontrivial part reaches the truncation edge.
    pub tail_estimate: f64,
    pub prefactor_identity: bool,
}

impl PairingRecord {
    pub fn term_magnitudes(&self) -> Vec<f64> {
        self.term_values.iter().map(|v| v[0].hypot(v[1])).collect()
    }

    pub fn magnitudes_decrease(&self) -> bool {
        self.term_magnitudes().windows(2).all(|w| w[1] < w[0])
    }
}

/// Operator arguments of the `n`-th pairing term, `u^{−1}` taken as `u*`.
pub fn pairing_ops(sd: &SpectralData, u: &SparseOperator, n: usize) -> Vec<SparseOperator> {
    let us = u.adjoint();
    let du = sd.dirac_commutator(u);
    let dus = sd.dirac_commutator(&us);
    let mut ops = vec![us];
    for j in 1..=(2 * n + 1) {
        ops.push(if j % 2 == 1 { du.clone() } else { dus.clone() });
    }
    ops
}

/// Longest chain the engine packs is 15 operators, `2N + 2 ≤ 15`.
pub const MAX_PAIRING_TERMS: usize = 6;

/// Partial sums `S_N = (1/√π) Σ_{n≤N} (−1)^n n! F_{2n+1}(u*, [D,u], …)`
/// for `N = 0..=terms`.
pub fn pairing(jlo: &Jlo, u: &SparseOperator, terms: usize) -> Result<PairingRecord> {
    if terms > MAX_PAIRING_TERMS {
        return Err(Error::Config(format!("pairing supports terms ≤ {MAX_PAIRING_TERMS}, got {terms}")));
    }
    let sd = &jlo.sd;
    if u.dim() != jlo.engine.dim() {
        return Err(Error::Dimension { expected: jlo.engine.dim(), got: u.dim() });
    }
    let identity_holds = (0..=terms).all(prefactor_identity);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut values = Vec::new();
    let mut sums = Vec::new();
    let mut acc = C64::default();
    for n in 0..=terms {
        let ops = pairing_ops(sd, u, n);
        let refs: Vec<&SparseOperator> = ops.iter().collect();
        let f = jlo.engine.f(&refs)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let v = f * (sign * rat_to_f64(&factorial(n)) * inv_sqrt_pi);
        acc += v;
        values.push([v.re, v.im]);
        sums.push([acc.re, acc.im]);
    }
    let interior = sd.basis.interior();
    let defect = u.adjoint().mul(u).sub(&sd.identity()).norm_on(&interior);
    let n2max = sd.basis.n2max();
    let top: Vec<usize> = (0..u.dim()).filter(|a| sd.basis.labels()[*a].n2 == n2max).collect();
    let leakage = u.sub(&sd.identity()).norm_on(&top);
    Ok(PairingRecord {
        q: sd.q(),
        n2max,
        terms,
        term_values: values,
        partial_sums: sums,
        unitarity_defect: defect,
        tail_estimate: leakage,
        prefactor_identity: identity_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub engine: [f64; 2],
    pub block_exp: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingOracle {
    pub n2max: u32,
    pub rows: Vec<OracleRow>,
    /// Largest difference between the engine's partial sums and either oracle.
    pub max_abs_diff: f64,
}

/// Pairing terms `n ≤ terms` from the engine against the block-exponential
/// oracle, and against nested quadrature for `n ≤ quadrature_terms`.
pub fn pairing_oracle(jlo: &Jlo, u: &SparseOperator, terms: usize, quadrature_terms: usize) -> Result<PairingOracle> {
    let sd = &jlo.sd;
    let q = sd.q();
    let dirac: Vec<f64> = sd.basis.labels().iter().map(|p| p.dirac() as f64).collect();
    let twist: Vec<f64> = sd.basis.labels().iter().map(|p| q.powi(p.twist_exponent())).collect();
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let pair = |z: C64| [z.re, z.im];
    let mut rows = Vec::new();
    let (mut se, mut sb, mut sq) = (C64::default(), C64::default(), C64::default());
    let mut max_diff = 0.0f64;
    for n in 0..=terms {
        let ops = pairing_ops(sd, u, n);
        let refs: Vec<&SparseOperator> = ops.iter().collect();
        let w = (if n % 2 == 0 { 1.0 } else { -1.0 }) * rat_to_f64(&factorial(n)) * inv_sqrt_pi;
        let e = jlo.engine.f(&refs)? * w;
        let b = oracle::block_exp_f(&ops, &dirac, &twist)? * w;
        se += e;
        sb += b;
        max_diff = max_diff.max((se - sb).norm());
        let quad = if n <= quadrature_terms {
            let v = oracle::brute_force_f(&ops, &dirac, &twist)? * w;
            sq += v;
            max_diff = max_diff.max((se - sq).norm());
            Some(pair(v))
        } else {
            None
        };
        rows.push(OracleRow { n, engine: pair(e), block_exp: pair(b), quadrature: quad });
    }
    Ok(PairingOracle { n2max: sd.basis.n2max(), rows, max_abs_diff: max_diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::element::mono;

    fn jlo(n2max: u32) -> Arc<Jlo> {
        let sd = Arc::new(SpectralData::build(0.5, n2max, Exec::Parallel).unwrap());
        Arc::new(Jlo::new(sd, Exec::Parallel).unwrap())
    }

    #[test]
    fn trivial_values() {
        let j = jlo(4);
        let one = AlgebraElement::one();
        assert_eq!(j.chern_eval(&[one.clone(), one.clone()]).unwrap(), C64::default());
        assert!(j.chern_eval(std::slice::from_ref(&one)).is_err());
        let r = pairing(&j, &j.spectral().identity(), 2).unwrap();
        assert!(r.partial_sums.iter().all(|s| s[0] == 0.0 && s[1] == 0.0));
        assert!(r.prefactor_identity);
        assert!(pairing(&j, &j.spectral().identity(), 7).is_err());
    }

    #[test]
    fn sigma_invariance_and_linearity() {
        let j = jlo(6);
        let (a, b) = (AlgebraElement::alpha(), AlgebraElement::alpha_star());
        let v = j.chern_eval(&[a.clone(), b.clone()]).unwrap();
        let w = j.chern_eval(&[a.sigma_pow(1), b.sigma_pow(1)]).unwrap();
        assert!((v - w).norm() < 1e-10, "{v} {w}");
        let two_a = &a + &a;
        let v2 = j.chern_eval(&[two_a, b.clone()]).unwrap();
        assert!((v2 - v * 2.0).norm() < 1e-14);
        let x = mono(0, 1, 0);
        let sum = j.chern_eval(&[a.clone(), &b + &x]).unwrap();
        let parts = v + j.chern_eval(&[a, x]).unwrap();
        assert!((sum - parts).norm() < 1e-14);
    }

    #[test]
    fn cocycle_component_cancels() {
        let j = jlo(6);
        let r = cocycle_residual(&j, 1, &default_samples(1)).unwrap();
        assert!(r.scale > 0.1);
        assert!(r.residual < 1e-10, "{r:?}");
        assert!(cocycle_residual(&j, 1, &[vec![AlgebraElement::one()]]).is_err());
    }

    #[test]
    fn prefactors() {
        assert!((0..6).all(prefactor_identity));
        let s = Prefactor::sqrt_of(Rat::from_integer(2.into()), 0, Rat::new(1.into(), 2.into()));
        assert!((s.to_c64() - SQRT_2I).norm() < 1e-15);
    }
}
