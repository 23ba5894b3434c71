use suq2::pw::{shift_pattern_violations, sigma_op, SpectralData};
use suq2::Exec;

const QS: [f64; 3] = [0.3, 0.5, 0.8];

#[test]
fn gns_representation_on_a_grid() {
    for q in QS {
        for n2max in [4, 6, 8] {
            let sd = SpectralData::build(q, n2max, Exec::Parallel).unwrap();
            let b = &sd.basis;
            let tag = format!("q={q} n2max={n2max}");
            assert!(b.orthonormality_residual() < 1e-10, "{tag}");
            for (name, r) in sd.relation_residuals() {
                assert!(r < 1e-10, "{tag} {name}: {r}");
            }
            assert_eq!(shift_pattern_violations(&sd.alpha, b, -1, -1), 0, "{tag}");
            assert_eq!(shift_pattern_violations(&sd.beta, b, 1, -1), 0, "{tag}");
            let interior = b.interior();
            let ca = sigma_op(&sd.alpha, q, 1.0)
                .sub(&sd.alpha.scale(num_complex::Complex64::new(q.powi(-2), 0.0)))
                .norm_on(&interior);
            let cb = sigma_op(&sd.beta, q, 1.0).sub(&sd.beta).norm_on(&interior);
            assert!(ca < 1e-12 * q.powi(-2) && cb < 1e-12, "{tag}: {ca} {cb}");
        }
    }
}

#[test]
fn dirac_commutators_plateau() {
    for q in QS {
        let norms = |n2max| {
            let sd = SpectralData::build(q, n2max, Exec::Parallel).unwrap();
            [&sd.alpha, &sd.beta].map(|x| sd.dirac_commutator(x).norm())
        };
        let (a, b) = (norms(6), norms(8));
        for k in 0..2 {
            let change = (b[k] - a[k]).abs() / a[k];
            println!("q={q} generator {k}: ||[D,x]|| {:.6} -> {:.6} ({:.2}%)", a[k], b[k], 100.0 * change);
            assert!(change < 0.05, "q={q}: {change}");
        }
    }
}
