use suq2::index::{
    cokernel_solve, index_report, kernel_certificate, operator_a, sector_violations, tau_index, xi_is_r_invariant,
    IndexConfig, RangeMode, Subdiagonal,
};
use suq2::Exec;

#[test]
fn cokernel_is_stable_in_the_truncation() {
    for q in [0.3, 0.5, 0.8] {
        let mut reference: Option<Vec<(u32, f64)>> = None;
        for n2max in 8..=16 {
            let a = operator_a(q, n2max, Subdiagonal::Corrected).unwrap();
            assert_eq!(sector_violations(&a), 0);
            let kernel_ok = kernel_certificate(&a).iter().all(|c| c.passed());
            assert!(kernel_ok, "q={q} n2max={n2max}");
            let ck = cokernel_solve(&a, Exec::Parallel);
            assert_eq!(ck.dim, 1, "q={q} n2max={n2max}");
            assert!(ck.interior_residual < 1e-10, "q={q} n2max={n2max}: {}", ck.interior_residual);
            let xi = ck.xi.clone().unwrap();
            assert_eq!(xi.p[0], (0, 0.0));
            assert_eq!(xi.p[1], (1, 1.0));
            assert!(xi_is_r_invariant(&xi));
            assert_eq!(tau_index(kernel_ok, &ck).unwrap(), 1, "q={q} n2max={n2max}");
            let head: Vec<(u32, f64)> = xi.p.iter().take(9).copied().collect();
            match &reference {
                None => reference = Some(head),
                Some(r) => {
                    for ((d, x), (_, y)) in head.iter().zip(r) {
                        assert!((x - y).abs() <= 1e-14 * y.abs().max(1.0), "q={q} n2max={n2max} d={d}");
                    }
                }
            }
        }
    }
}

#[test]
fn reports_pass_for_each_q() {
    for q in [0.3, 0.5, 0.8] {
        let cfg = IndexConfig { q, n2max: 12, convention: Subdiagonal::Corrected, range_mode: RangeMode::Consecutive };
        let r = index_report(&cfg, Exec::Parallel).unwrap();
        assert!(r.passed(), "q={q}: {:?}", r.failing());
        assert_eq!(r.check("-ind_tau(A) = 1").unwrap().value, Some(1.0));
    }
}
