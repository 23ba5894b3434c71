use proptest::prelude::*;
use suq2::jlo::oracle::simplex_exp_quadrature;
use suq2::jlo::{simplex_exp_integral, SimplexNodes};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// 1 to 5 nodes in [0, 50]; about half the sets squeeze some nodes into a
/// cluster of spread ≤ 1e-6.
fn node_sets() -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(0.0f64..50.0, 1..=5), any::<bool>(), prop::collection::vec(0.0f64..1e-6, 5)).prop_map(
        |(mut v, cluster, jitter)| {
            if cluster && v.len() > 1 {
                let c = v[0].min(50.0 - 1e-6);
                let k = v.len().div_ceil(2) + 1;
                for (x, j) in v.iter_mut().take(k.min(5)).zip(jitter) {
                    *x = c + j;
                }
            }
            v
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn agrees_with_quadrature(nodes in node_sets()) {
        let a = simplex_exp_integral(&nodes);
        let b = simplex_exp_quadrature(&nodes);
        prop_assert!((a - b).abs() <= 1e-8 * b.abs(), "{nodes:?}: {a} vs {b}");
    }

    #[test]
    fn permutation_invariant_positive_and_bounded(nodes in node_sets(), seed in any::<u64>()) {
        let a = simplex_exp_integral(&nodes);
        let mut shuffled = nodes.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(a.to_bits(), simplex_exp_integral(&shuffled).to_bits());
        let n = nodes.len() - 1;
        let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(a > 0.0);
        prop_assert!(a <= (-lo).exp() / factorial(n) * (1.0 + 1e-12));
    }

    #[test]
    fn equal_nodes(lambda in 0.0f64..50.0, n in 0usize..8) {
        let v = simplex_exp_integral(&vec![lambda; n + 1]);
        let expect = (-lambda).exp() / factorial(n);
        prop_assert!((v - expect).abs() <= 1e-12 * expect, "{v} {expect}");
    }
}

#[test]
fn nodes_are_validated() {
    assert!(SimplexNodes::new(vec![]).is_err());
    assert!(SimplexNodes::new(vec![1.0, f64::NAN]).is_err());
    let s = SimplexNodes::new(vec![3.0, 1.0]).unwrap();
    assert_eq!(s.as_slice(), &[1.0, 3.0]);
    assert!((s.integral() - ((-1.0f64).exp() - (-3.0f64).exp()) / 2.0).abs() < 1e-15);
}
