use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use suq2::jlo::Jlo;
use suq2::pw::{SparseOperator, SpectralData};
use suq2::qalgebra::{AlgebraElement, Monomial};
use suq2::scalar::QScalar;
use suq2::Exec;

fn jlo(n2max: u32) -> Arc<Jlo> {
    static CACHE: OnceLock<[Arc<Jlo>; 2]> = OnceLock::new();
    let make = |n| {
        let sd = Arc::new(SpectralData::build(0.5, n, Exec::Parallel).unwrap());
        Arc::new(Jlo::new(sd, Exec::Parallel).unwrap())
    };
    let c = CACHE.get_or_init(|| [make(3), make(6)]);
    c[if n2max == 3 { 0 } else { 1 }].clone()
}

fn element() -> impl Strategy<Value = AlgebraElement> {
    let basis = Monomial::up_to_degree(2);
    prop::collection::vec((0..basis.len(), -3i64..=3), 1..=3).prop_map(move |terms| {
        let mut x = AlgebraElement::one();
        for (k, c) in terms {
            x.add_term(basis[k], QScalar::int(c));
        }
        x
    })
}

fn monomial() -> impl Strategy<Value = AlgebraElement> {
    let basis = Monomial::up_to_degree(2);
    (0..basis.len()).prop_map(move |k| AlgebraElement::from(basis[k]))
}

fn heat_trace(sd: &SpectralData) -> f64 {
    let q = sd.q();
    sd.basis.labels().iter().map(|p| q.powi(p.twist_exponent()) * (-((p.dirac() as f64).powi(2))).exp()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f_n_bound(xs in prop::collection::vec((element(), any::<bool>()), 1..=4)) {
        let j = jlo(3);
        let sd = j.spectral();
        let ops: Vec<SparseOperator> = xs
            .iter()
            .map(|(x, commute)| {
                let op = sd.basis.represent(x, Exec::Sequential);
                if *commute { sd.dirac_commutator(&op) } else { op }
            })
            .collect();
        let refs: Vec<&SparseOperator> = ops.iter().collect();
        let f = j.engine().f(&refs).unwrap();
        let n = ops.len() - 1;
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let bound = ops.iter().map(SparseOperator::norm).product::<f64>() * heat_trace(sd) / fact;
        prop_assert!(f.norm() <= bound * (1.0 + 1e-12), "|F| = {} > {}", f.norm(), bound);
    }

    #[test]
    fn chern_character_is_sigma_invariant(args in prop::collection::vec(monomial(), 2)) {
        let j = jlo(6);
        let v = j.chern_eval(&args).unwrap();
        let s: Vec<AlgebraElement> = args.iter().map(|a| a.sigma_pow(1)).collect();
        let w = j.chern_eval(&s).unwrap();
        prop_assert!((v - w).norm() <= 1e-10 * v.norm().max(1.0), "{v} vs {w}");
    }

    #[test]
    fn chern_character_is_multilinear(a in element(), b in element(), c in element(), k in -3i64..=3) {
        let j = jlo(3);
        let lhs = j.chern_eval(&[a.clone(), &b + &c.scale(&QScalar::int(k))]).unwrap();
        let rhs = j.chern_eval(&[a.clone(), b]).unwrap() + j.chern_eval(&[a, c]).unwrap() * k as f64;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }
}

#[test]
fn sequential_and_parallel_engines_agree() {
    let sd = Arc::new(SpectralData::build(0.5, 4, Exec::Parallel).unwrap());
    let a = Jlo::new(sd.clone(), Exec::Sequential).unwrap();
    let b = Jlo::new(sd, Exec::Parallel).unwrap();
    let args =
        [AlgebraElement::alpha(), AlgebraElement::alpha_star(), AlgebraElement::beta(), AlgebraElement::beta_star()];
    assert_eq!(a.chern_eval(&args).unwrap(), b.chern_eval(&args).unwrap());
}
