//! The operator `A` on `H₀ = span{e^n_{n,j}}`, its kernel and cokernel, and the
//! `τ`-index with `τ(X) = Tr(XR)`.
//!
//! `A` preserves `s = n + j` and raises `d = n − j` by one, so on each sector it
//! is a lower bidiagonal matrix and `A*η = 0` is a one-step recursion.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{compensated_sum, Exec};
use crate::pw::index::PWIndex;
use crate::pw::sparse::{spectral_norm, SparseOperator};
use crate::report::{CheckRecord, Report, Status};

/// `|q^{2r} − 1/2|` below this is treated as the excluded boundary.
const BOUNDARY_TOL: f64 = 1e-12;

/// The integer `r ≥ 1` with `q^{2r} < 1/2 < q^{2r−2}`.
pub fn choose_r(q: f64) -> Result<u32> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Config(format!("q must lie in (0,1), got {q}")));
    }
    let mut r = 1u32;
    loop {
        let p = q.powi(2 * r as i32);
        if (p - 0.5).abs() <= BOUNDARY_TOL {
            return Err(Error::BoundaryR(r));
        }
        if p < 0.5 {
            return Ok(r);
        }
        r += 1;
    }
}

/// Reading of the square-root factor in the subdiagonal of `A`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subdiagonal {
    /// `(1 − q^{2(d+1)})^{1/2}`, the factor that reproduces the `p_n` product.
    #[default]
    Corrected,
    /// `(1 − q^{2(d−1)})^{1/2}`, the literal root.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorCoeffs {
    pub q: f64,
    pub r: u32,
    pub convention: Subdiagonal,
}

impl SectorCoeffs {
    /// `1 − q^{2rs}(1 − q^{2d})^r`.
    pub fn diag(&self, s: u32, d: u32) -> f64 {
        let (q, r) = (self.q, self.r as f64);
        let log = 2.0 * r * s as f64 * q.ln() + r * (-q.powi(2 * d as i32)).ln_1p();
        -log.exp_m1()
    }

    /// `−q^{s(2r+1)}(1 − q^{2d})^r · root(d)`; zero at `d = 0` before the root is looked at.
    pub fn sub(&self, s: u32, d: u32) -> f64 {
        if d == 0 {
            return 0.0;
        }
        let q = self.q;
        let annihilator = (1.0 - q.powi(2 * d as i32)).powi(self.r as i32);
        let root = match self.convention {
            Subdiagonal::Corrected => (1.0 - q.powi(2 * (d + 1) as i32)).sqrt(),
            Subdiagonal::Literal => (1.0 - q.powi(2 * (d - 1) as i32)).sqrt(),
        };
        -q.powi((s * (2 * self.r + 1)) as i32) * annihilator * root
    }
}

/// `A` on the truncation `{e^n_{n,j} : 2n ≤ n2max}`.
#[derive(Clone, Debug)]
pub struct OperatorA {
    pub coeffs: SectorCoeffs,
    pub n2max: u32,
    pub op: SparseOperator,
}

/// Basis of `H₀`, ordered by `(n2, j2)`.
pub fn h0_labels(n2max: u32) -> Vec<PWIndex> {
    let mut out = Vec::new();
    for n2 in 0..=n2max {
        let n = n2 as i32;
        for j2 in (-n..=n).step_by(2) {
            out.push(PWIndex { n2, i2: n, j2 });
        }
    }
    out
}

fn position(p: &PWIndex) -> usize {
    // shells 0..n2 hold Σ (k+1) = n2(n2+1)/2 vectors
    let n2 = p.n2 as usize;
    n2 * (n2 + 1) / 2 + ((p.j2 + p.n2 as i32) / 2) as usize
}

pub fn operator_a(q: f64, n2max: u32, convention: Subdiagonal) -> Result<OperatorA> {
    let r = choose_r(q)?;
    let coeffs = SectorCoeffs { q, r, convention };
    let labels = Arc::new(h0_labels(n2max));
    let mut op = SparseOperator::zero(labels.clone());
    for (col, p) in labels.iter().enumerate() {
        let (s, d) = p.sector_step();
        op.set(col, col, C64::new(coeffs.diag(s, d), 0.0));
        if p.n2 < n2max {
            let next = PWIndex { n2: p.n2 + 1, i2: p.i2 + 1, j2: p.j2 - 1 };
            op.set(position(&next), col, C64::new(coeffs.sub(s, d), 0.0));
        }
    }
    Ok(OperatorA { coeffs, n2max, op })
}

/// Entries violating `s(row) = s(col)` and `d(row) − d(col) ∈ {0, 1}`.
pub fn sector_violations(a: &OperatorA) -> usize {
    let labels = a.op.labels();
    a.op.entries()
        .filter(|(r, c, _)| {
            let (sr, dr) = labels[*r].sector_step();
            let (sc, dc) = labels[*c].sector_step();
            sr != sc || !(dr == dc || dr == dc + 1)
        })
        .count()
}

/// `τ(X) = Tr(XR)` with `R e^n_{i,j} = q^{−2i−2j} e^n_{i,j}`.
pub fn tau_trace(x: &SparseOperator, q: f64) -> f64 {
    let labels = x.labels();
    compensated_sum((0..x.dim()).map(|a| x.get(a, a).re * q.powi(labels[a].twist_exponent())))
}

/// Formal solution of `A*η = 0` in one sector, continued past the truncation.
#[derive(Clone, Debug, Serialize)]
pub struct SectorRecursion {
    pub s: u32,
    /// First `d` with `η_d ≠ 0`; earlier components are forced to zero.
    pub start: u32,
    /// `η_d` for `d = 0..=n2max−s`.
    pub eta: Vec<f64>,
    /// `min_d |η_{d+1}/η_d|` over the truncation, from `start` on.
    pub min_ratio: f64,
    pub max_ratio_tail: f64,
    /// `lim_d |η_{d+1}/η_d|`.
    pub ratio_limit: f64,
    /// `Σ_d η_d²` including the continuation beyond the truncation.
    pub norm2: f64,
    /// Part of `norm2` beyond the truncation.
    pub tail: f64,
    pub square_summable: bool,
}

fn recursion(c: &SectorCoeffs, s: u32, dmax: u32) -> SectorRecursion {
    // eq d: diag(d) η_d + sub(d) η_{d+1} = 0; a vanishing sub(d) forces η_d = 0
    // and frees η_{d+1}
    let start = (0..=dmax).take_while(|d| c.sub(s, *d) == 0.0).last().map(|d| d + 1).unwrap_or(0);
    let mut eta = vec![0.0; dmax as usize + 1];
    let mut ratios = Vec::new();
    let mut norm2_terms = Vec::new();
    let mut tail_terms = Vec::new();
    let mut cur = 1.0f64;
    let mut d = start;
    let mut grows = false;
    // continue beyond dmax until the terms are negligible or clearly diverge
    while d <= dmax + 400 {
        if d <= dmax {
            eta[d as usize] = cur;
            norm2_terms.push(cur * cur);
        } else {
            tail_terms.push(cur * cur);
        }
        let ratio = c.diag(s, d) / c.sub(s, d).abs();
        if d < dmax {
            ratios.push(ratio);
        }
        cur *= -c.diag(s, d) / c.sub(s, d);
        if !cur.is_finite() || cur.abs() > 1e150 {
            grows = true;
            break;
        }
        if d > dmax && cur * cur < 1e-40 * compensated_sum(norm2_terms.iter().copied()) {
            break;
        }
        d += 1;
    }
    // lim_d diag/|sub| is 0 for s = 0 and (1 − q^{2rs})/q^{s(2r+1)} > 1 otherwise
    let limit =
        if s == 0 { 0.0 } else { (1.0 - c.q.powi((2 * c.r * s) as i32)) / c.q.powi((s * (2 * c.r + 1)) as i32) };
    let grows = grows || limit >= 1.0;
    let tail = if grows { f64::INFINITY } else { compensated_sum(tail_terms.iter().copied()) };
    let norm2 = compensated_sum(norm2_terms.iter().copied()) + tail;
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio_tail = ratios.iter().rev().take(3).copied().fold(0.0, f64::max);
    SectorRecursion {
        s,
        start,
        eta,
        min_ratio,
        max_ratio_tail,
        ratio_limit: limit,
        norm2,
        tail,
        square_summable: !grows && norm2.is_finite(),
    }
}

/// Coefficients `p_n`, `n = n2/2`, of the cokernel vector `ξ = Σ p_n e^n_{n,−n}`.
#[derive(Clone, Debug, Serialize)]
pub struct XiVector {
    pub p: Vec<(u32, f64)>,
    pub norm2: f64,
    pub tail: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Cokernel {
    pub sectors: Vec<SectorRecursion>,
    pub dim: usize,
    pub xi: Option<XiVector>,
    /// `‖A*ξ‖/‖ξ‖` with the truncated operator and truncated `ξ`.
    pub residual: f64,
    /// Same, leaving out the outermost equation that the truncation cuts.
    pub interior_residual: f64,
}

pub fn cokernel_solve(a: &OperatorA, exec: Exec) -> Cokernel {
    let c = a.coeffs;
    let sectors = exec.map_range(a.n2max as usize + 1, |s| recursion(&c, s as u32, a.n2max - s as u32));
    let summable: Vec<&SectorRecursion> = sectors.iter().filter(|r| r.square_summable).collect();
    let dim = summable.len();
    let (mut residual, mut interior_residual, mut xi) = (f64::NAN, f64::NAN, None);
    if let Some(rec) = summable.iter().find(|r| r.s == 0) {
        let labels = a.op.labels();
        let mut v = vec![C64::default(); labels.len()];
        for (d, e) in rec.eta.iter().enumerate() {
            let p = PWIndex { n2: d as u32, i2: d as i32, j2: -(d as i32) };
            v[position(&p)] = C64::new(*e, 0.0);
        }
        let w = a.op.adjoint().apply(&v);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        residual = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / norm;
        interior_residual =
            w.iter().zip(labels.iter()).filter(|(_, p)| p.n2 < a.n2max).map(|(z, _)| z.norm_sqr()).sum::<f64>().sqrt()
                / norm;
        let p = rec.eta.iter().enumerate().map(|(d, e)| (d as u32, *e)).collect();
        xi = Some(XiVector { p, norm2: rec.norm2, tail: rec.tail });
    }
    Cokernel { sectors, dim, xi, residual, interior_residual }
}

/// Which exponents the closed-form `p_n` product runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeMode {
    /// Exponents `4n−2, 4n−4, …, 2`, i.e. every `d = 2n−1, …, 1`.
    #[default]
    Consecutive,
    /// Exponents `4n−2, 4n−6, …`, i.e. `d = 2n−1, 2n−3, …` down to 1 or 2.
    Alternate,
}

/// `[1 − (1−q^{2d})^r] / [(1−q^{2d+2})^{1/2} (1−q^{2d})^r]`.
pub fn p_factor(q: f64, r: u32, d: u32) -> f64 {
    let log_x = r as f64 * (-q.powi(2 * d as i32)).ln_1p();
    -log_x.exp_m1() / ((-q.powi(2 * d as i32 + 2)).ln_1p().exp().sqrt() * log_x.exp())
}

/// The closed-form product for `p_n`, `n = n2/2`.
pub fn p_n_product(n2: u32, q: f64, r: u32, mode: RangeMode) -> f64 {
    if n2 <= 1 {
        return 1.0;
    }
    let step = match mode {
        RangeMode::Consecutive => 1,
        RangeMode::Alternate => 2,
    };
    (1..n2).rev().step_by(step).map(|d| p_factor(q, r, d)).product()
}

/// Structural and numeric evidence that `Ker A = {0}`.
pub fn kernel_certificate(a: &OperatorA) -> Vec<CheckRecord> {
    let c = a.coeffs;
    let labels = a.op.labels().clone();
    let mut out = Vec::new();
    let violations = sector_violations(a);
    out.push(CheckRecord::exact("A lower triangular in (s; d)", violations == 0, violations as f64));
    let qr = c.q.powi(2 * c.r as i32);
    out.push(CheckRecord::below("q^(2r) < 1/2", qr, 0.5).with("r", c.r));
    let unit_top = labels.iter().filter(|p| p.sector_step().1 == 0).all(|p| {
        let (s, d) = p.sector_step();
        c.diag(s, d) == 1.0
    });
    out.push(CheckRecord::exact("diag(s, 0) = 1", unit_top, 0.0));
    let min_pos = labels
        .iter()
        .map(PWIndex::sector_step)
        .filter(|(s, _)| *s >= 1)
        .map(|(s, d)| c.diag(s, d))
        .fold(f64::INFINITY, f64::min);
    let mut rec = CheckRecord::new("diag(s>=1, d) > 1/2", Status::from_bool(min_pos > 0.5));
    rec.value = Some(min_pos);
    rec.threshold = Some(0.5);
    out.push(rec);
    let min_zero = (1..=a.n2max).map(|d| c.diag(0, d)).fold(f64::INFINITY, f64::min);
    let mut rec = CheckRecord::new("diag(0, d) > 0", Status::from_bool(min_zero > 0.0));
    rec.value = Some(min_zero);
    out.push(rec);
    let dense: DMatrix<C64> = a.op.to_dense();
    let sv = dense.singular_values();
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(CheckRecord::info("sigma_min(A)", smin).with("sigma_max", spectral_norm(&dense)));
    out
}

/// `Rξ = ξ` by index bookkeeping: every component `e^n_{n,−n}` has `i + j = 0`.
pub fn xi_is_r_invariant(xi: &XiVector) -> bool {
    xi.p.iter().all(|(n2, _)| PWIndex { n2: *n2, i2: *n2 as i32, j2: -(*n2 as i32) }.twist_exponent() == 0)
}

/// `−ind_τ(A) = −(τ(P_A) − τ(Q_A))` as an integer: `τ(P_A) = 0` from the
/// kernel certificate, `τ(Q_A) = ⟨ξ, Rξ⟩/‖ξ‖² = 1` from a one-dimensional
/// cokernel and `Rξ = ξ`.
pub fn tau_index(kernel_trivial: bool, cokernel: &Cokernel) -> Result<i64> {
    if !kernel_trivial {
        return Err(Error::Config("kernel certificate failed".into()));
    }
    match (&cokernel.xi, cokernel.dim) {
        (Some(xi), 1) if xi_is_r_invariant(xi) => Ok(1),
        _ => Err(Error::Config(format!(
            "expected a one-dimensional R-invariant cokernel, got dimension {}",
            cokernel.dim
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexConfig {
    pub q: f64,
    pub n2max: u32,
    pub convention: Subdiagonal,
    pub range_mode: RangeMode,
}

fn rank_one_tau(a: &OperatorA, xi: &XiVector) -> f64 {
    let mut proj = SparseOperator::zero(a.op.labels().clone());
    let norm2: f64 = xi.p.iter().map(|(_, v)| v * v).sum();
    for (n2, v) in &xi.p {
        let k = position(&PWIndex { n2: *n2, i2: *n2 as i32, j2: -(*n2 as i32) });
        proj.set(k, k, C64::new(v * v / norm2, 0.0));
    }
    tau_trace(&proj, a.coeffs.q)
}

fn cokernel_checks(cfg: &IndexConfig, a: &OperatorA, cok: &Cokernel) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let higher = || cok.sectors.iter().filter(|r| r.s >= 1);
    let growing = higher().all(|r| !r.square_summable && r.min_ratio > 1.0);
    let min_growth = higher().map(|r| r.min_ratio).fold(f64::INFINITY, f64::min);
    out.push(
        CheckRecord::new("sectors s>=1: recursion grows, not l2", Status::from_bool(growing))
            .with_value(min_growth)
            .with("structural", "|sub(s,d)| <= q^(2r+1) < 1/2 < diag(s,d)"),
    );
    let s0 = &cok.sectors[0];
    out.push(
        CheckRecord::new("sector 0: recursion square-summable", Status::from_bool(s0.square_summable))
            .with_value(s0.max_ratio_tail)
            .with("start_d", s0.start),
    );
    out.push(CheckRecord::exact("dim Ker A* = 1", cok.dim == 1, cok.dim as f64).with_value(cok.dim as f64));
    let Some(xi) = &cok.xi else {
        return out;
    };
    let p_half = xi.p.get(1).map(|x| x.1).unwrap_or(0.0);
    out.push(CheckRecord::exact("p_1/2 = 1", p_half == 1.0, (p_half - 1.0).abs()).with_value(p_half));
    out.push(CheckRecord::below("||A* xi|| / ||xi||", cok.residual, 1e-10).with("interior", cok.interior_residual));
    out.push(CheckRecord::exact("R xi = xi", xi_is_r_invariant(xi), 0.0));
    let tq = rank_one_tau(a, xi);
    out.push(CheckRecord::below("tau(Q_A) = 1", (tq - 1.0).abs(), 1e-12).with_value(tq));
    out.push(CheckRecord::info("||xi||^2", xi.norm2).with("tail", xi.tail));
    let r = a.coeffs.r;
    let upto = cfg.n2max.min(9);
    let diff = |mode| {
        (2..=upto)
            .map(|n2| {
                let back = xi.p[n2 as usize].1;
                ((p_n_product(n2, cfg.q, r, mode) - back) / back).abs()
            })
            .fold(0.0, f64::max)
    };
    out.push(
        CheckRecord::below("p_n product matches back-substitution, n <= 9/2", diff(cfg.range_mode), 1e-8)
            .with("range_mode", cfg.range_mode),
    );
    let other = match cfg.range_mode {
        RangeMode::Consecutive => RangeMode::Alternate,
        RangeMode::Alternate => RangeMode::Consecutive,
    };
    out.push(CheckRecord::info("p_n product, other range", diff(other)).with("range_mode", other));
    let table: Vec<(String, f64)> = xi.p.iter().map(|(n2, v)| (format!("{n2}/2"), *v)).collect();
    out.push(CheckRecord::info("p_n table", xi.p.len() as f64).with("p", table));
    out
}

/// The full index computation as a report.
pub fn index_report(cfg: &IndexConfig, exec: Exec) -> Result<Report> {
    let a = operator_a(cfg.q, cfg.n2max, cfg.convention)?;
    let mut report = Report::new("index").with_config(cfg);
    report.push(CheckRecord::info("r", a.coeffs.r as f64));
    let mut kernel_ok = true;
    report.timed("kernel", || {
        let checks = kernel_certificate(&a);
        kernel_ok = checks.iter().all(CheckRecord::passed);
        checks
    });
    let cok = cokernel_solve(&a, exec);
    report.timed("cokernel", || cokernel_checks(cfg, &a, &cok));
    match tau_index(kernel_ok, &cok) {
        Ok(v) => report.push(CheckRecord::exact("-ind_tau(A) = 1", v == 1, (v - 1) as f64).with_value(v as f64)),
        Err(e) => report.push(CheckRecord::new("-ind_tau(A) = 1", Status::Fail).with("error", e.to_string())),
    }
    if cfg.convention == Subdiagonal::Corrected {
        let lit = operator_a(cfg.q, cfg.n2max, Subdiagonal::Literal)?;
        let lc = cokernel_solve(&lit, exec);
        report.push(
            CheckRecord::info("literal subdiagonal: first nonzero d of xi", lc.sectors[0].start as f64)
                .with("dim", lc.dim)
                .with("note", "the literal root (1-q^(2(d-1)))^(1/2) vanishes at d=1, forcing p_1/2 = 0"),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_selection() {
        assert_eq!(choose_r(0.5).unwrap(), 1);
        assert_eq!(choose_r(0.9).unwrap(), 4);
        assert_eq!(choose_r(0.8).unwrap(), 2);
        assert!(matches!(choose_r(0.5f64.sqrt()), Err(Error::BoundaryR(1))));
        assert!(choose_r(1.0).is_err());
    }

    #[test]
    fn operator_entries() {
        let a = operator_a(0.5, 4, Subdiagonal::Corrected).unwrap();
        assert_eq!(a.op.get(0, 0).re, 1.0);
        assert!((a.coeffs.diag(0, 1) - 0.25).abs() < 1e-15);
        let col = position(&PWIndex { n2: 1, i2: 1, j2: -1 });
        let rows: Vec<usize> = (0..a.op.dim()).filter(|r| a.op.get(*r, col) != C64::default()).collect();
        assert_eq!(rows, vec![col, position(&PWIndex { n2: 2, i2: 2, j2: -2 })]);
        assert_eq!(sector_violations(&a), 0);
        for (k, p) in a.op.labels().iter().enumerate() {
            assert_eq!(position(p), k);
        }
    }

    #[test]
    fn tau_of_first_shell() {
        let shell = Arc::new(vec![
            PWIndex { n2: 1, i2: -1, j2: -1 },
            PWIndex { n2: 1, i2: -1, j2: 1 },
            PWIndex { n2: 1, i2: 1, j2: -1 },
            PWIndex { n2: 1, i2: 1, j2: 1 },
        ]);
        let t = tau_trace(&SparseOperator::identity(shell), 0.5);
        assert!((t - 6.25).abs() < 1e-14);
    }

    #[test]
    fn cokernel_and_index() {
        for q in [0.3, 0.5, 0.8] {
            let a = operator_a(q, 12, Subdiagonal::Corrected).unwrap();
            let c = cokernel_solve(&a, Exec::Sequential);
            assert_eq!(c.dim, 1, "q={q}");
            assert!(c.residual < 1e-10, "q={q} {}", c.residual);
            assert_eq!(c.xi.as_ref().unwrap().p[1].1, 1.0);
            assert_eq!(tau_index(true, &c).unwrap(), 1);
        }
        let lit = operator_a(0.5, 8, Subdiagonal::Literal).unwrap();
        assert_eq!(cokernel_solve(&lit, Exec::Sequential).sectors[0].start, 2);
    }

    #[test]
    fn closed_form_product_range() {
        let a = operator_a(0.5, 10, Subdiagonal::Corrected).unwrap();
        let xi = cokernel_solve(&a, Exec::Sequential).xi.unwrap();
        for n2 in 2..=9u32 {
            let back = xi.p[n2 as usize].1;
            let prod = p_n_product(n2, 0.5, 1, RangeMode::Consecutive);
            assert!(((prod - back) / back).abs() < 1e-12, "n2={n2}");
        }
        let alt = p_n_product(5, 0.5, 1, RangeMode::Alternate);
        assert!(((alt - xi.p[5].1) / xi.p[5].1).abs() > 1e-3);
    }

    #[test]
    fn report_passes() {
        for q in [0.3, 0.5, 0.8] {
            let cfg =
                IndexConfig { q, n2max: 12, convention: Subdiagonal::Corrected, range_mode: RangeMode::Consecutive };
            let r = index_report(&cfg, Exec::Parallel).unwrap();
            assert!(r.passed(), "q={q}: {:?}", r.failing());
        }
    }
}
