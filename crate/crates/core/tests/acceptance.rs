use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suq2::index::{index_report, IndexConfig, RangeMode, Subdiagonal};
use suq2::jlo::chern::{cocycle_residual, default_samples};
use suq2::jlo::oracle::{brute_force_f, simplex_exp_quadrature};
use suq2::jlo::{pairing, pairing_oracle, simplex_exp_integral, Jlo};
use suq2::pw::{build_u_margin, spectral_data_check, PWBasis, SparseOperator, SpectralData};
use suq2::qalgebra::{algebra_check, haar_check, lemma_check, AlgebraCheckConfig, LemmaConfig};
use suq2::report::{CheckRecord, Report};
use suq2::scalar::{rat, Rat};
use suq2::twisted::{check_identities, CheckConfig, MatrixHandle, SymbolicHandle};
use suq2::Exec;

const EXEC: Exec = Exec::Parallel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn from_checks(checks: &[CheckRecord], detail: impl Into<String>) -> Outcome {
    let failing: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
    let mut detail = detail.into();
    if !failing.is_empty() {
        detail = format!("{detail}; failing: {}", failing.join(", "));
    }
    outcome(failing.is_empty(), detail)
}

fn value(r: &Report, name: &str) -> f64 {
    let c = r.check(name).unwrap_or_else(|| panic!("{name} missing"));
    c.residual.or(c.value).unwrap_or(f64::NAN)
}

fn index_reports() -> Vec<(f64, Report)> {
    [0.3, 0.5, 0.8]
        .into_iter()
        .map(|q| {
            let cfg =
                IndexConfig { q, n2max: 12, convention: Subdiagonal::Corrected, range_mode: RangeMode::Consecutive };
            (q, index_report(&cfg, EXEC).unwrap())
        })
        .collect()
}

fn c1_index() -> Outcome {
    let mut checks = Vec::new();
    let mut parts = Vec::new();
    for (q, r) in index_reports() {
        let wanted = [
            "-ind_tau(A) = 1",
            "A lower triangular in (s; d)",
            "diag(s>=1, d) > 1/2",
            "diag(0, d) > 0",
            "sectors s>=1: recursion grows, not l2",
            "sector 0: recursion square-summable",
            "dim Ker A* = 1",
            "||A* xi|| / ||xi||",
            "R xi = xi",
            "tau(Q_A) = 1",
        ];
        for name in wanted {
            checks.push(r.check(name).unwrap_or_else(|| panic!("{name} missing")).clone());
        }
        let idx = r.check("-ind_tau(A) = 1").and_then(|c| c.value).unwrap_or(f64::NAN);
        parts.push(format!("q={q}: -ind={idx}, ||A*xi||/||xi||={:.1e}", value(&r, "||A* xi|| / ||xi||")));
    }
    from_checks(&checks, parts.join("; "))
}

fn c2_p_n() -> Outcome {
    let mut checks = Vec::new();
    let mut parts = Vec::new();
    for (q, r) in index_reports() {
        for name in ["p_1/2 = 1", "p_n product matches back-substitution, n <= 9/2"] {
            checks.push(r.check(name).unwrap().clone());
        }
        parts.push(format!("q={q}: max rel diff {:.1e}", value(&r, "p_n product matches back-substitution, n <= 9/2")));
    }
    from_checks(&checks, parts.join("; "))
}

fn c3_hopf_haar() -> Outcome {
    let cfg = AlgebraCheckConfig::default();
    let mut r = algebra_check(&cfg, EXEC);
    r.extend(haar_check(&cfg, 200, EXEC));
    let witness = r.check("h is not a trace").unwrap().value.unwrap_or(0.0);
    from_checks(
        &r.checks,
        format!("{} exact checks, degree <= {}, h(aa*)-h(a*a) = {witness:.6} at q=0.5", r.checks.len(), cfg.cutoff),
    )
}

fn c4_lemma() -> Outcome {
    let cfg = LemmaConfig::default();
    let checks = lemma_check(&cfg, EXEC);
    from_checks(&checks, format!("{} random xi, pairs of total degree <= {}", cfg.samples, cfg.cutoff))
}

fn c5_twisted() -> Outcome {
    let cc = CheckConfig { exec: EXEC, ..Default::default() };
    let mut checks = check_identities(Arc::new(MatrixHandle::diagonal_twist(3)), &cc).checks;
    checks.extend(check_identities(Arc::new(MatrixHandle::<Rat>::untwisted(2)), &cc).checks);
    checks.extend(check_identities(Arc::new(SymbolicHandle::new(2, 1)), &cc).checks);
    checks.extend(check_identities(Arc::new(SymbolicHandle::new(2, 0)), &cc).checks);
    from_checks(
        &checks,
        format!(
            "{} exact checks on M_2 (twisted, untwisted) and A (sigma_1, id), degrees {:?}",
            checks.len(),
            cc.degrees
        ),
    )
}

fn node_set(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.gen_range(1..=5);
    let mut v: Vec<f64> = (0..len).map(|_| rng.gen_range(0.0..50.0)).collect();
    if len > 1 && rng.gen_bool(0.5) {
        let c = v[0].min(49.0);
        let spread = [1e-9, 1e-6, 1e-3, 0.5][rng.gen_range(0..4)];
        let k = rng.gen_range(2..=len);
        for x in v.iter_mut().take(k) {
            *x = c + rng.gen_range(0.0..spread);
        }
    }
    v
}

fn c6_divided_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sets: Vec<Vec<f64>> = (0..1000).map(|_| node_set(&mut rng)).collect();
    let rel = EXEC.map(&sets, |v| {
        let a = simplex_exp_integral(v);
        let b = simplex_exp_quadrature(v);
        (a - b).abs() / b.abs()
    });
    let worst = rel.iter().copied().fold(0.0, f64::max);
    let mut perm_bad = 0;
    for v in &sets {
        let mut w = v.clone();
        for i in (1..w.len()).rev() {
            w.swap(i, rng.gen_range(0..=i));
        }
        if simplex_exp_integral(v).to_bits() != simplex_exp_integral(&w).to_bits() {
            perm_bad += 1;
        }
    }
    let mut equal_worst = 0.0f64;
    for n in 0..8 {
        for lambda in [0.0f64, 0.7, 3.0, 12.5, 40.0] {
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            let expect = (-lambda).exp() / fact;
            let got = simplex_exp_integral(&vec![lambda; n + 1]);
            equal_worst = equal_worst.max((got - expect).abs() / expect);
        }
    }
    outcome(
        worst < 1e-8 && perm_bad == 0 && equal_worst < 1e-12,
        format!(
            "1000 sets: max rel {worst:.1e}; permutation mismatches {perm_bad}; equal nodes max rel {equal_worst:.1e}"
        ),
    )
}

fn small_spectral() -> (Arc<SpectralData>, SparseOperator) {
    let basis = PWBasis::build_exact(rat(1, 2), 2, EXEC).unwrap();
    let sd = Arc::new(SpectralData::new(Arc::new(basis), EXEC));
    let u = build_u_margin(&sd, 1e-8, 6, EXEC).unwrap().u;
    (sd, u)
}

fn c7_oracle() -> Outcome {
    let (sd, u) = small_spectral();
    let jlo = Jlo::new(sd.clone(), EXEC).unwrap();
    let q = sd.q();
    let dirac: Vec<f64> = sd.basis.labels().iter().map(|p| p.dirac() as f64).collect();
    let twist: Vec<f64> = sd.basis.labels().iter().map(|p| q.powi(p.twist_exponent())).collect();
    let db = sd.dirac_commutator(&sd.beta);
    // operator, R-weight
    let ops = [
        (sd.identity(), 0),
        (sd.beta.clone(), 1),
        (sd.beta.adjoint(), -1),
        (db.adjoint(), -1),
        (db, 1),
        (u.adjoint(), 0),
        (u, 0),
    ];
    let mut tuples: Vec<Vec<usize>> = vec![vec![]];
    let mut all = Vec::new();
    for n in 0..=3 {
        tuples = tuples.iter().flat_map(|t| (0..ops.len()).map(move |k| [t.as_slice(), &[k]].concat())).collect();
        if n < 3 {
            all.extend(tuples.iter().cloned());
        } else {
            let balanced = tuples.iter().filter(|t| t.iter().map(|k| ops[*k].1).sum::<i32>() == 0);
            all.extend(balanced.step_by(5).cloned());
        }
    }
    let diffs = EXEC.map(&all, |t| {
        let args: Vec<SparseOperator> = t.iter().map(|k| ops[*k].0.clone()).collect();
        let refs: Vec<&SparseOperator> = args.iter().collect();
        let e = jlo.engine().f(&refs).unwrap();
        let b = brute_force_f(&args, &dirac, &twist).unwrap();
        ((e - b).norm(), b.norm())
    });
    let worst = diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    let nonzero = diffs.iter().filter(|d| d.1 > 1e-12).count();
    outcome(
        worst < 1e-8 && nonzero > 0,
        format!("{} tuples (all n <= 2, weight-zero stride sample at n = 3; nonzero {nonzero}) over I, pi(b), pi(b)*, [D,pi(b)], its adjoint, u, u*: max |diff| {worst:.1e}", all.len()),
    )
}

fn c8_cocycle() -> Outcome {
    let res = |n2max| {
        let sd = Arc::new(SpectralData::build(0.5, n2max, EXEC).unwrap());
        let jlo = Arc::new(Jlo::new(sd, EXEC).unwrap());
        cocycle_residual(&jlo, 1, &default_samples(1)).unwrap()
    };
    let (r6, r8) = (res(6), res(8));
    outcome(
        r8.residual < 1e-6 && r8.residual * 10.0 <= r6.residual,
        format!(
            "|b phi_1 + B phi_3| = {:.1e} (n2max 6), {:.1e} (n2max 8) on {} tuples, cancelling scale {:.2}",
            r6.residual, r8.residual, r8.tuples, r8.scale
        ),
    )
}

fn c9_pairing() -> Outcome {
    let basis = PWBasis::build_exact(rat(1, 2), 8, EXEC).unwrap();
    let sd = Arc::new(SpectralData::new(Arc::new(basis), EXEC));
    let u = build_u_margin(&sd, 1e-8, 6, EXEC).unwrap();
    let jlo = Jlo::new(sd, EXEC).unwrap();
    let rec = pairing(&jlo, &u.u, 3).unwrap();
    let sums: Vec<String> = rec.partial_sums.iter().map(|s| format!("{:.4}", s[0])).collect();
    let mags: Vec<String> = rec.term_magnitudes().iter().map(|m| format!("{m:.4}")).collect();
    let last = rec.partial_sums[3];
    println!(
        "    INFO S_0..S_3 = [{}], |S_3 - 1| = {:.3}, term magnitudes [{}] decreasing: {}, ||u*u - I|| = {:.3}, ||(u-I)P_top|| = {:.3}",
        sums.join(", "),
        (last[0] - 1.0).hypot(last[1]),
        mags.join(", "),
        rec.magnitudes_decrease(),
        rec.unitarity_defect,
        rec.tail_estimate,
    );
    let (small, u_small) = small_spectral();
    let jlo_small = Jlo::new(small, EXEC).unwrap();
    let oracle = pairing_oracle(&jlo_small, &u_small, 3, 1).unwrap();
    outcome(
        oracle.max_abs_diff < 1e-8 && rec.prefactor_identity && rec.partial_sums.len() == 4,
        format!("oracle gate at n2max 2, N <= 3: max |S_N diff| {:.1e}", oracle.max_abs_diff),
    )
}

fn c10_spectral() -> Outcome {
    let sd = SpectralData::build(0.5, 8, EXEC).unwrap();
    let r = spectral_data_check(&sd, EXEC);
    let traces: Vec<String> = [0.5, 1.0, 2.0]
        .iter()
        .map(|t| format!("t={t}: {:.4}", r.check(&format!("(iv) Tr(R exp(-{t} D^2))")).unwrap().value.unwrap()))
        .collect();
    from_checks(&r.checks, format!("Tr(R e^(-tD^2)) {}", traces.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("index value", Duration::from_secs(10), c1_index),
        ("p_n consistency", Duration::from_secs(1), c2_p_n),
        ("Hopf/Haar exact suite", Duration::from_secs(60), c3_hopf_haar),
        ("Lemma property", Duration::from_secs(30), c4_lemma),
        ("twisted complex identities", Duration::from_secs(60), c5_twisted),
        ("divided-difference engine", Duration::from_secs(10), c6_divided_differences),
        ("JLO oracle equivalence", Duration::from_secs(60), c7_oracle),
        ("cocycle residual", Duration::from_secs(300), c8_cocycle),
        ("pairing series", Duration::from_secs(600), c9_pairing),
        ("spectral-data conditions", Duration::from_secs(30), c10_spectral),
    ];
    let mut failed = Vec::new();
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let elapsed = t.elapsed();
        let within = elapsed <= *budget;
        let pass = o.pass && within;
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s, budget {} s{}]",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if within { "" } else { ", over budget" },
        );
        if !pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
