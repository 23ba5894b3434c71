use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::basis::PWBasis;
use super::index::PWIndex;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::qalgebra::{AlgebraElement, Monomial};
use crate::report::{CheckRecord, Report};
use crate::scalar::{rat, QScalar};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn dirac(basis: &PWBasis) -> SparseOperator {
    basis.diag(|p| re(p.dirac() as f64))
}

pub fn twist(basis: &PWBasis) -> SparseOperator {
    twist_power(basis, 1.0)
}

/// `R^s`, diagonal with entries `q^{s(−2i−2j)}`.
pub fn twist_power(basis: &PWBasis, s: f64) -> SparseOperator {
    let q = basis.q();
    basis.diag(|p| re(q.powf(s * p.twist_exponent() as f64)))
}

/// `σ_s(X) = R^{−s} X R^{s}` on a truncated operator.
pub fn sigma_op(x: &SparseOperator, q: f64, s: f64) -> SparseOperator {
    x.scale_rows_cols(|p| re(q.powf(-s * p.twist_exponent() as f64)), |p| re(q.powf(s * p.twist_exponent() as f64)))
}

/// The represented spectral data `(π(A^∞), H, D, R)` at a truncation.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub basis: Arc<PWBasis>,
    pub d: SparseOperator,
    pub r: SparseOperator,
    pub alpha: SparseOperator,
    pub beta: SparseOperator,
}

impl SpectralData {
    pub fn new(basis: Arc<PWBasis>, exec: Exec) -> Self {
        let alpha = basis.represent(&AlgebraElement::alpha(), exec);
        let beta = basis.represent(&AlgebraElement::beta(), exec);
        SpectralData { d: dirac(&basis), r: twist(&basis), alpha, beta, basis }
    }

    pub fn build(q: f64, n2max: u32, exec: Exec) -> Result<Self> {
        Ok(Self::new(Arc::new(PWBasis::build(q, n2max, exec)?), exec))
    }

    pub fn q(&self) -> f64 {
        self.basis.q()
    }

    pub fn identity(&self) -> SparseOperator {
        SparseOperator::identity(self.basis.labels().clone())
    }

    /// `[D, X]`.
    pub fn dirac_commutator(&self, x: &SparseOperator) -> SparseOperator {
        self.d.commutator(x)
    }

    /// Residuals of the five defining relations on interior columns.
    pub fn relation_residuals(&self) -> Vec<(&'static str, f64)> {
        let interior = self.basis.interior();
        let q = self.q();
        let (a, b) = (&self.alpha, &self.beta);
        let (a_s, b_s) = (a.adjoint(), b.adjoint());
        let id = self.identity();
        let rels = [
            ("ab - q ba", a.mul(b).sub(&b.mul(a).scale(re(q)))),
            ("ab* - q b*a", a.mul(&b_s).sub(&b_s.mul(a).scale(re(q)))),
            ("bb* - b*b", b.mul(&b_s).sub(&b_s.mul(b))),
            ("a*a + b*b - 1", a_s.mul(a).add(&b_s.mul(b)).sub(&id)),
            ("aa* + q^2 bb* - 1", a.mul(&a_s).add(&b.mul(&b_s).scale(re(q * q))).sub(&id)),
        ];
        rels.into_iter().map(|(n, op)| (n, op.norm_on(&interior))).collect()
    }
}

/// Output of [`build_u`] with its reported postconditions.
#[derive(Debug, Clone, Serialize)]
pub struct UnitaryU {
    #[serde(skip)]
    pub u: SparseOperator,
    pub tol: f64,
    pub projection_rank: usize,
    /// Distance from 1 of the closest eigenvalue left out of the projection.
    pub nearest_outside: f64,
    pub unitarity_residual: f64,
    pub twist_commutator: f64,
}

/// `|1 − λ|` for every eigenvalue of `π(ββ*)`, sector by sector.
fn n_eigen(basis: &PWBasis, exec: Exec) -> Vec<(Vec<usize>, DMatrix<f64>, Vec<f64>)> {
    let n = basis.represent(&AlgebraElement::from(Monomial::new(0, 1, 1)), exec);
    let sectors: Vec<Vec<usize>> = basis.sectors().map(|s| s.positions.clone()).collect();
    exec.map(&sectors, |pos| {
        let block = n.block(pos, pos).map(|z| z.re);
        let sym = (&block + block.transpose()) * 0.5;
        let e = SymmetricEigen::new(sym);
        let dist = e.eigenvalues.iter().map(|l| (1.0 - l).abs()).collect();
        (pos.clone(), e.eigenvectors, dist)
    })
}

/// Largest `t ≤ tol` for which the eigenvalues of `π(ββ*)` split into a
/// cluster within `t` of 1 and a rest at distance ≥ `10 t`.
pub fn separating_tol(basis: &PWBasis, tol: f64, exec: Exec) -> Option<f64> {
    let mut d: Vec<f64> = n_eigen(basis, exec).into_iter().flat_map(|x| x.2).collect();
    d.sort_by(f64::total_cmp);
    let ok = |t: f64| d.iter().all(|x| *x <= t || *x >= 10.0 * t);
    if ok(tol) {
        return Some(tol);
    }
    d.iter().rev().copied().filter(|x| *x > 0.0 && *x <= tol).find(|x| ok(*x))
}

struct Projection {
    op: SparseOperator,
    rank: usize,
    nearest_outside: f64,
}

/// Spectral projection of `π(ββ*)` near 1, built from the sectors whose
/// lowest shell is at most `n2_limit`.
fn near_one_projection(basis: &PWBasis, tol: f64, n2_limit: u32, exec: Exec) -> Projection {
    let mut nearest_outside = f64::INFINITY;
    let mut op = SparseOperator::zero(basis.labels().clone());
    let mut rank = 0;
    for (pos, vecs, dist) in n_eigen(basis, exec) {
        if basis.labels()[pos[0]].n2 > n2_limit {
            continue;
        }
        for (k, dk) in dist.iter().enumerate() {
            if *dk > tol {
                nearest_outside = nearest_outside.min(*dk);
                continue;
            }
            rank += 1;
            let v = vecs.column(k);
            for (a, ra) in pos.iter().enumerate() {
                for (b, rb) in pos.iter().enumerate() {
                    let x = v[a] * v[b];
                    if x != 0.0 {
                        op.add_at(*ra, *rb, re(x));
                    }
                }
            }
        }
    }
    Projection { op, rank, nearest_outside }
}

fn finish_u(sd: &SpectralData, u: SparseOperator, tol: f64, p: &Projection) -> UnitaryU {
    let id = sd.identity();
    let interior = sd.basis.interior();
    let unitarity_residual = u.adjoint().mul(&u).sub(&id).norm_on(&interior);
    let twist_commutator = u.commutator(&sd.r).norm_on(&interior);
    UnitaryU {
        u,
        tol,
        projection_rank: p.rank,
        nearest_outside: p.nearest_outside,
        unitarity_residual,
        twist_commutator,
    }
}

/// `u = I₁(β*β)(π(β) − I) + I` with `I₁` the spectral projection of `π(β*β)`
/// onto eigenvalues within `tol` of 1, computed on the given truncation.
pub fn build_u(sd: &SpectralData, tol: f64, exec: Exec) -> Result<UnitaryU> {
    if tol <= 0.0 {
        return Err(Error::Config("build_u needs tol > 0".into()));
    }
    let p = near_one_projection(&sd.basis, tol, u32::MAX, exec);
    if p.nearest_outside < 10.0 * tol {
        return Err(Error::ClusterNotSeparated { gap: p.nearest_outside, need: 10.0 * tol });
    }
    let id = sd.identity();
    let u = p.op.mul(&sd.beta.sub(&id)).add(&id);
    Ok(finish_u(sd, u, tol, &p))
}

/// [`build_u`] evaluated on a basis with `margin` extra shells and compressed
/// back to `sd`'s truncation. Only sectors reaching the target truncation
/// enter the projection and the separation test, so boundary sectors of the
/// enlarged basis, whose eigenvalues near 1 have not converged, play no role.
pub fn build_u_margin(sd: &SpectralData, tol: f64, margin: u32, exec: Exec) -> Result<UnitaryU> {
    if tol <= 0.0 {
        return Err(Error::Config("build_u needs tol > 0".into()));
    }
    if margin == 0 {
        return build_u(sd, tol, exec);
    }
    let n2max = sd.basis.n2max();
    let big = PWBasis::build_exact(sd.basis.q_exact().clone(), n2max + margin, exec)?;
    let p = near_one_projection(&big, tol, n2max, exec);
    if p.nearest_outside < 10.0 * tol {
        return Err(Error::ClusterNotSeparated { gap: p.nearest_outside, need: 10.0 * tol });
    }
    let id = SparseOperator::identity(big.labels().clone());
    let beta = big.represent(&AlgebraElement::beta(), exec);
    let u_big = p.op.mul(&beta.sub(&id)).add(&id);
    let keep: Vec<usize> = sd.basis.labels().iter().map(|l| big.position(l).expect("nested truncation")).collect();
    let u = u_big.compress(&keep);
    Ok(finish_u(sd, u, tol, &p))
}

/// `P₊ X P₊` on `H₀ = span{e^n_{n,j}}`.
pub fn compress_positive(op: &SparseOperator, basis: &PWBasis) -> SparseOperator {
    op.compress(&basis.positive())
}

fn heat_trace(basis: &PWBasis, t: f64) -> f64 {
    let q = basis.q();
    crate::exec::compensated_sum(
        basis.labels().iter().map(|p| q.powi(p.twist_exponent()) * (-t * (p.dirac() as f64).powi(2)).exp()),
    )
}

/// `Σ_{n2 > n2max} e^{−t(n2+1)²} (Σ_i q^{−2i})²`, summed until negligible.
pub(crate) fn heat_tail(q: f64, n2max: u32, t: f64) -> f64 {
    let mut tail = 0.0;
    for n2 in n2max + 1..n2max + 400 {
        let n = n2 as i32;
        let w: f64 = (-n..=n).step_by(2).map(|i2| q.powi(-i2)).sum();
        let term = (-t * ((n2 + 1) as f64).powi(2)).exp() * w * w;
        tail += term;
        if term < 1e-300 || term <= tail * 1e-17 {
            break;
        }
    }
    tail
}

/// The twisted spectral-data conditions at the truncation.
pub fn spectral_data_check(sd: &SpectralData, exec: Exec) -> Report {
    let mut report = Report::new("spectral-check");
    let basis = &sd.basis;
    let q = sd.q();
    let interior = basis.interior();

    report.timed("commutator_bounds", || {
        let mut out = Vec::new();
        let here = [("alpha", &sd.alpha), ("beta", &sd.beta)].map(|(n, x)| (n, sd.dirac_commutator(x).norm()));
        let lower = if basis.n2max() >= 2 { SpectralData::build(q, basis.n2max() - 2, exec).ok() } else { None };
        for (k, (name, v)) in here.iter().enumerate() {
            let mut c = CheckRecord::info(format!("(i) ||[D,pi({name})]||"), *v).with("n2max", basis.n2max());
            if let Some(low) = &lower {
                let prev = low.dirac_commutator(if k == 0 { &low.alpha } else { &low.beta }).norm();
                c = c.with("previous_n2max", basis.n2max() - 2).with("previous_value", prev);
                c = c.with("relative_change", (v - prev).abs() / prev.max(1e-300));
            }
            out.push(c);
        }
        out
    });

    report.timed("dirac_twist_commute", || {
        let c = sd.d.commutator(&sd.r);
        vec![CheckRecord::exact("(ii) [D,R] = 0", c.nnz() == 0 || c.max_abs() == 0.0, c.max_abs())]
    });

    report.timed("sigma", || {
        let mut out = Vec::new();
        let a = AlgebraElement::alpha();
        let s1 = a.sigma(&rat(1, 1)).expect("integer s");
        let expect = a.scale(&QScalar::q_pow(-2));
        out.push(CheckRecord::exact("(iii) sigma_1(alpha) = q^-2 alpha", s1 == expect, 0.0));
        let conj_a = sigma_op(&sd.alpha, q, 1.0).sub(&sd.alpha.scale(re(q.powi(-2)))).norm_on(&interior);
        out.push(CheckRecord::below("(iii) R^-1 pi(alpha) R - q^-2 pi(alpha)", conj_a, 1e-12));
        let conj_b = sigma_op(&sd.beta, q, 1.0).sub(&sd.beta).norm_on(&interior);
        out.push(CheckRecord::below("(iii) R^-1 pi(beta) R - pi(beta)", conj_b, 1e-12));
        let monos = Monomial::up_to_degree(6);
        let bad = monos
            .iter()
            .filter(|m| {
                let x = AlgebraElement::from(**m);
                (x.sigma_pow(1) == x) != (m.k == 0)
            })
            .count();
        out.push(
            CheckRecord::exact("(iii) fixed points of sigma_1 are exactly the k = 0 monomials", bad == 0, bad as f64)
                .with("monomials", monos.len()),
        );
        out
    });

    report.timed("heat_trace", || {
        [0.5, 1.0, 2.0]
            .iter()
            .map(|t| {
                let v = heat_trace(basis, *t);
                let tail = heat_tail(q, basis.n2max(), *t);
                let mut c = CheckRecord::new(
                    format!("(iv) Tr(R exp(-{t} D^2))"),
                    crate::report::Status::from_bool(v.is_finite() && tail.is_finite()),
                );
                c.value = Some(v);
                c.with("tail_estimate", tail).with("t", *t)
            })
            .collect()
    });
    report
}

/// Lower bound for `sup_{s∈[−n,n]} (‖σ_s(x)‖ + ‖[D, σ_s(x)]‖)` on a grid of step 0.25.
pub fn frechet_norm(x: &AlgebraElement, n: u32, sd: &SpectralData, exec: Exec) -> f64 {
    let px = sd.basis.represent(x, exec);
    let steps = 8 * n as i32;
    let grid: Vec<f64> = (-steps..=steps).map(|k| k as f64 * 0.125).collect();
    let q = sd.q();
    exec.map(&grid, |s| {
        let y = sigma_op(&px, q, *s);
        y.norm() + sd.dirac_commutator(&y).norm()
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// Every interior entry of `π(α)` / `π(β)` moves `(n; i, j)` by the expected shift.
pub fn shift_pattern_violations(op: &SparseOperator, basis: &PWBasis, di2: i32, dj2: i32) -> usize {
    op.entries()
        .filter(|(r, c, v)| {
            let (pr, pc): (&PWIndex, &PWIndex) = (&basis.labels()[*r], &basis.labels()[*c]);
            basis.is_interior(pc)
                && v.norm() > 1e-14
                && !(pr.i2 - pc.i2 == di2 && pr.j2 - pc.j2 == dj2 && (pr.n2 as i32 - pc.n2 as i32).abs() == 1)
        })
        .count()
}
