use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::cochain::{op_b, op_big_b, op_t, op_t_inv, op_t_pow, Cochain};
use super::handles::AlgebraHandle;
use super::scalar::Scalar;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::report::{CheckRecord, Report, Status};

type Expansion<S> = BTreeMap<Vec<usize>, S>;

fn add_into<S: Scalar>(e: &mut Expansion<S>, k: Vec<usize>, v: S) {
    let slot = e.entry(k.clone()).or_insert_with(S::zero);
    *slot = slot.add(&v);
    if slot.is_zero() {
        e.remove(&k);
    }
}

/// Expansion of `φ ∘ σ^{⊗}` for an elementary-tensor expansion `φ`, using
/// `δ_k ∘ σ = Σ_j δ_k(σ e_j) δ_j`.
fn pull_expansion<H: AlgebraHandle>(h: &H, sigma_cols: &[Vec<(usize, H::S)>], e: &Expansion<H::S>) -> Expansion<H::S> {
    // sigma_cols[k] = [(j, δ_k(σ e_j))]
    let mut out = Expansion::new();
    for (idx, c) in e {
        let mut partial: Vec<(Vec<usize>, H::S)> = vec![(Vec::new(), c.clone())];
        for k in idx {
            let mut next = Vec::new();
            for (p, v) in &partial {
                for (j, s) in &sigma_cols[*k] {
                    let mut p2 = p.clone();
                    p2.push(*j);
                    next.push((p2, v.mul(s)));
                }
            }
            partial = next;
        }
        for (p, v) in partial {
            add_into(&mut out, p, v);
        }
    }
    let _ = h;
    out
}

fn sigma_columns<H: AlgebraHandle>(h: &H) -> Vec<Vec<(usize, H::S)>> {
    let b = h.basis();
    let images: Vec<H::Elem> = b.iter().map(|e| h.sigma(e)).collect();
    (0..b.len())
        .map(|k| {
            images.iter().enumerate().map(|(j, img)| (j, h.coefficient(img, k))).filter(|(_, s)| !s.is_zero()).collect()
        })
        .collect()
}

/// Averages an elementary-tensor cochain over its `σ`-orbit; fails when the
/// orbit does not return within `max_orbit` steps.
pub fn symmetrize<H: AlgebraHandle>(
    h: &Arc<H>,
    terms: Vec<(H::S, Vec<usize>)>,
    max_orbit: usize,
) -> Result<Cochain<H>> {
    let cols = sigma_columns(h.as_ref());
    let mut start = Expansion::new();
    for (c, k) in terms {
        add_into(&mut start, k, c);
    }
    let mut orbit = vec![start.clone()];
    loop {
        let next = pull_expansion(h.as_ref(), &cols, orbit.last().expect("nonempty"));
        if next == start {
            break;
        }
        if orbit.len() >= max_orbit {
            return Err(Error::OrbitNotClosed(max_orbit));
        }
        orbit.push(next);
    }
    let len = orbit.len() as i64;
    let mut avg = Expansion::new();
    for e in orbit {
        for (k, v) in e {
            add_into(&mut avg, k, v.mul(&H::S::from_ratio(1, len)));
        }
    }
    Ok(Cochain::elementary(h.clone(), avg.into_iter().map(|(k, v)| (v, k)).collect()))
}

/// Sum of up to three σ-invariant elementary tensors of dual-basis
/// functionals supported on basis elements of grade ≤ `support_grade`.
pub fn random_invariant_cochain<H: AlgebraHandle, R: Rng>(
    h: &Arc<H>,
    degree: usize,
    support_grade: u32,
    rng: &mut R,
) -> Result<Cochain<H>> {
    let support: Vec<usize> = (0..h.basis().len()).filter(|k| h.grade(*k) <= support_grade).collect();
    let want = rng.gen_range(1..=3);
    let mut terms: Vec<(H::S, Vec<usize>)> = Vec::new();
    let mut attempts = 0;
    while terms.len() < want {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::OrbitNotClosed(8));
        }
        let idx: Vec<usize> = (0..=degree).map(|_| support[rng.gen_range(0..support.len())]).collect();
        let c = H::S::from_ratio(rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 }, 1);
        if let Ok(sym) = symmetrize(h, vec![(c, idx)], 8) {
            terms.extend(sym.terms().expect("elementary").iter().cloned());
        }
    }
    let mut merged = Expansion::new();
    for (c, k) in terms {
        add_into(&mut merged, k, c);
    }
    if merged.is_empty() {
        return Ok(Cochain::zero(h.clone(), degree as isize));
    }
    Ok(Cochain::elementary(h.clone(), merged.into_iter().map(|(k, v)| (v, k)).collect()))
}

/// Basis-index tuples with every entry of grade ≤ `arg_grade` and total grade ≤ `total_grade`.
pub fn argument_tuples<H: AlgebraHandle>(h: &H, arity: usize, arg_grade: u32, total_grade: u32) -> Vec<Vec<usize>> {
    let ks: Vec<usize> = (0..h.basis().len()).filter(|k| h.grade(*k) <= arg_grade).collect();
    let mut out: Vec<(Vec<usize>, u32)> = vec![(Vec::new(), 0)];
    for _ in 0..arity {
        let mut next = Vec::new();
        for (t, g) in &out {
            for k in &ks {
                let g2 = g + h.grade(*k);
                if g2 <= total_grade {
                    let mut t2 = t.clone();
                    t2.push(*k);
                    next.push((t2, g2));
                }
            }
        }
        out = next;
    }
    out.into_iter().map(|(t, _)| t).collect()
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub degrees: Vec<usize>,
    pub trials: usize,
    pub support_grade: u32,
    pub arg_grade: u32,
    pub total_grade: u32,
    pub float_tol: f64,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            degrees: vec![0, 1, 2],
            trials: 5,
            support_grade: 2,
            arg_grade: 2,
            total_grade: 4,
            float_tol: 1e-12,
            seed: 42,
            exec: Exec::default(),
        }
    }
}

struct Tally {
    max: f64,
    nonzero: usize,
    tuples: usize,
}

fn residual<H: AlgebraHandle>(
    h: &H,
    tuples: &[Vec<usize>],
    exec: Exec,
    tol: f64,
    f: impl Fn(&[H::Elem]) -> H::S + Sync + Send,
) -> Tally {
    let vals = exec.map(tuples, |t| {
        let args: Vec<H::Elem> = t.iter().map(|k| h.basis()[*k].clone()).collect();
        f(&args)
    });
    let bad = |s: &H::S| if H::S::EXACT { !s.is_zero() } else { s.size() >= tol };
    Tally {
        max: vals.iter().map(Scalar::size).fold(0.0, f64::max),
        nonzero: vals.iter().filter(|s| bad(s)).count(),
        tuples: tuples.len(),
    }
}

fn record(name: String, t: Tally, exact: bool) -> CheckRecord {
    let mut c = CheckRecord::new(name, Status::from_bool(t.nonzero == 0));
    c.residual = Some(t.max);
    c.with("tuples", t.tuples).with("nonzero", t.nonzero).with("scalar_mode", if exact { "exact" } else { "float" })
}

/// Evaluates `b²φ`, `B²φ`, `(bB + Bb)φ`, `T T⁻¹ φ − φ`, `T^{n+1}φ − φ` and
/// σ-invariance of `bφ`, `Bφ` on random σ-invariant cochains.
pub fn check_identities<H: AlgebraHandle>(h: Arc<H>, cfg: &CheckConfig) -> Report {
    let mut report = Report::new("complex-check");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let exact = H::S::EXACT;
    for &n in &cfg.degrees {
        let mut cochains = Vec::new();
        for _ in 0..cfg.trials {
            match random_invariant_cochain(&h, n, cfg.support_grade, &mut rng) {
                Ok(c) => cochains.push(c),
                Err(e) => {
                    report.push(
                        CheckRecord::new(format!("{} deg {n}: cochain generation", h.name()), Status::Fail)
                            .with("error", e.to_string()),
                    );
                }
            }
        }
        let tuples = |arity: usize| argument_tuples(h.as_ref(), arity, cfg.arg_grade, cfg.total_grade);
        let (t_n, t_n1, t_n2) = (tuples(n + 1), tuples(n + 2), tuples(n + 3));
        let t_nm1 = if n >= 1 { tuples(n) } else { Vec::new() };
        let t_nm2 = if n >= 2 { tuples(n - 1) } else { Vec::new() };
        let label = |what: &str| format!("{} deg {n}: {what}", h.name());
        let mut acc: BTreeMap<&str, Tally> = BTreeMap::new();
        let mut merge = |key: &'static str, t: Tally| {
            let e = acc.entry(key).or_insert(Tally { max: 0.0, nonzero: 0, tuples: 0 });
            e.max = e.max.max(t.max);
            e.nonzero += t.nonzero;
            e.tuples += t.tuples;
        };
        for phi in &cochains {
            let hh = h.as_ref();
            let invariant = |c: &Cochain<H>, ts: &[Vec<usize>]| {
                let pulled = c.pull_sigma();
                residual(hh, ts, cfg.exec, cfg.float_tol, |a| pulled.eval(a).sub(&c.eval(a)))
            };
            merge("phi sigma-invariant", invariant(phi, &t_n));
            let tt = op_t(&op_t_inv(phi));
            merge("T T^-1 = id", residual(hh, &t_n, cfg.exec, cfg.float_tol, |a| tt.eval(a).sub(&phi.eval(a))));
            let cyc = op_t_pow(phi, n as i64 + 1);
            merge("T^(n+1) = id", residual(hh, &t_n, cfg.exec, cfg.float_tol, |a| cyc.eval(a).sub(&phi.eval(a))));
            let b = op_b(phi);
            let bb = op_b(&b);
            merge("b^2 = 0", residual(hh, &t_n2, cfg.exec, cfg.float_tol, |a| bb.eval(a)));
            merge("b phi sigma-invariant", invariant(&b, &t_n1));
            let big = op_big_b(phi);
            if n >= 2 {
                let big2 = op_big_b(&big);
                merge("B^2 = 0", residual(hh, &t_nm2, cfg.exec, cfg.float_tol, |a| big2.eval(a)));
            } else {
                merge("B^2 = 0", Tally { max: 0.0, nonzero: 0, tuples: 0 });
            }
            if n >= 1 {
                merge("B phi sigma-invariant", invariant(&big, &t_nm1));
            }
            let anti = op_b(&big).add(&op_big_b(&b));
            merge("bB + Bb = 0", residual(hh, &t_n, cfg.exec, cfg.float_tol, |a| anti.eval(a)));
        }
        for (k, t) in acc {
            report.push(record(label(k), t, exact).with("trials", cochains.len()));
        }
    }
    report
}

/// Lower bound for `sup |φ(a₀..a_n)| / Π‖a_i‖`: a running supremum over all
/// basis tuples of grade ≤ `arg_grade` plus `random` random elements.
pub fn norm_estimate<H: AlgebraHandle, R: Rng>(phi: &Cochain<H>, arg_grade: u32, random: usize, rng: &mut R) -> f64 {
    let h = phi.handle().clone();
    let arity = phi.arity();
    let mut best = 0.0f64;
    let ratio = |args: &[H::Elem]| {
        let den: f64 = args.iter().map(|a| h.elem_norm(a)).product();
        if den > 0.0 {
            phi.eval(args).size() / den
        } else {
            0.0
        }
    };
    for t in argument_tuples(h.as_ref(), arity, arg_grade, arg_grade * arity as u32) {
        let args: Vec<H::Elem> = t.iter().map(|k| h.basis()[*k].clone()).collect();
        best = best.max(ratio(&args));
    }
    let ks: Vec<usize> = (0..h.basis().len()).filter(|k| h.grade(*k) <= arg_grade).collect();
    for _ in 0..random {
        let args: Vec<H::Elem> = (0..arity)
            .map(|_| {
                let mut e = h.scale(&h.unit(), &H::S::zero());
                for k in &ks {
                    let c = H::S::from_ratio(rng.gen_range(-4..=4), 1);
                    e = h.add(&e, &h.scale(&h.basis()[*k], &c));
                }
                e
            })
            .collect();
        best = best.max(ratio(&args));
    }
    best
}

/// Given `norms[n] = ‖φ_{2n}‖`, estimates `(‖φ_{2n}‖/n!)^{1/n}` for `n ≥ 1`;
/// PASS if the estimates decrease along the prefix.
pub fn entire_growth_check(norms: &[f64]) -> Report {
    let mut report = Report::new("entire-growth");
    let mut est = Vec::new();
    let mut fact = 1.0f64;
    for (n, v) in norms.iter().enumerate().skip(1) {
        fact *= n as f64;
        est.push((v / fact).powf(1.0 / n as f64));
    }
    let valid = norms.iter().all(|v| v.is_finite() && *v >= 0.0);
    let decreasing = est.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let ok = valid && est.len() >= 2 && decreasing;
    let mut c = CheckRecord::new("(||phi_2n||/n!)^(1/n) decreasing", Status::from_bool(ok));
    c.value = est.last().copied();
    report.push(c.with("estimates", &est).with("norms", norms));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use crate::twisted::handles::MatrixHandle;

    #[test]
    fn growth_examples() {
        assert!(entire_growth_check(&[1.0; 6]).passed());
        let f: Vec<f64> = (0..6).map(|n| (1..=n).map(|k| k as f64).product::<f64>().powi(2)).collect();
        assert!(!entire_growth_check(&f).passed());
    }

    #[test]
    fn symmetrize_rejects_non_invariant_tensor() {
        let h = Arc::new(MatrixHandle::diagonal_twist(3));
        // δ_{12} alone has weight 1/3: not invariant, orbit never closes
        assert!(symmetrize(&h, vec![(Rat::from_integer(1.into()), vec![1])], 8).is_err());
        assert!(symmetrize(&h, vec![(Rat::from_integer(1.into()), vec![1, 2])], 8).is_ok());
    }

    #[test]
    fn identities_on_twisted_matrices() {
        let h = Arc::new(MatrixHandle::diagonal_twist(3));
        let cfg = CheckConfig { degrees: vec![0, 1, 2], trials: 3, ..Default::default() };
        let r = check_identities(h, &cfg);
        assert!(r.passed(), "{:?}", r.failing());
    }
}
