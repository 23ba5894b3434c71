use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;

use dashmap::DashMap;
use num_complex::Complex64 as C64;

use super::divdiff::simplex_exp_integral;
use crate::error::{Error, Result};
use crate::exec::{compensated_sum_c, Exec};
use crate::pw::operators::SpectralData;
use crate::pw::sparse::SparseOperator;

type Fixed<K, V> = HashMap<K, V, BuildHasherDefault<DefaultHasher>>;

/// Shell multisets are packed four bits per shell.
const MAX_SHELL: u32 = 15;
const MAX_CHAIN: usize = 15;

/// Evaluates `F_n(A₀,…,A_n) = ∫_{Σ_n} Tr(A₀ e^{−t₀D²} A₁ ⋯ A_n e^{−t_nD²} R) dt`
/// on a truncation by summing matrix-element chains, each weighted by the
/// simplex exponential integral over the eigenvalues it visits.
///
/// For every closing index the chains are grouped by their shell multiset as
/// they are extended, so a chain costs one table update per step and the
/// divided difference is computed once per multiset.
#[derive(Debug)]
pub struct FEngine {
    shell: Vec<u32>,
    lambda: Vec<f64>,
    twist: Vec<f64>,
    memo: DashMap<u64, f64>,
    exec: Exec,
}

impl FEngine {
    pub fn new(sd: &SpectralData, exec: Exec) -> Result<Self> {
        let n2max = sd.basis.n2max();
        if n2max > MAX_SHELL {
            return Err(Error::Config(format!("F_n engine supports n2max ≤ {MAX_SHELL}, got {n2max}")));
        }
        let labels = sd.basis.labels();
        let q = sd.q();
        Ok(FEngine {
            shell: labels.iter().map(|p| p.n2).collect(),
            lambda: (0..=n2max).map(|n2| ((n2 + 1) as f64).powi(2)).collect(),
            twist: labels.iter().map(|p| q.powi(p.twist_exponent())).collect(),
            memo: DashMap::new(),
            exec,
        })
    }

    pub fn exec(&self) -> Exec {
        self.exec
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn dim(&self) -> usize {
        self.shell.len()
    }

    /// Eigenvalues of `D²` and `R` in basis order.
    pub fn spectrum(&self) -> (Vec<f64>, Vec<f64>) {
        (self.shell.iter().map(|s| self.lambda[*s as usize]).collect(), self.twist.clone())
    }

    fn weight(&self, ms: u64) -> f64 {
        if let Some(v) = self.memo.get(&ms) {
            return *v;
        }
        let mut nodes = Vec::new();
        for (s, lam) in self.lambda.iter().enumerate() {
            let count = (ms >> (4 * s)) & 0xf;
            nodes.extend(std::iter::repeat_n(*lam, count as usize));
        }
        let v = simplex_exp_integral(&nodes);
        self.memo.insert(ms, v);
        v
    }

    fn closing(&self, a0: usize, ops: &[&SparseOperator]) -> C64 {
        let n = ops.len() - 1;
        let bump = |ms: u64, c: usize| ms + (1u64 << (4 * self.shell[c]));
        let mut states: Fixed<(usize, u64), C64> = Fixed::default();
        states.insert((a0, bump(0, a0)), C64::new(self.twist[a0], 0.0));
        for op in &ops[..n] {
            let mut next: Fixed<(usize, u64), C64> = Fixed::default();
            for ((c, ms), amp) in &states {
                for (c2, v) in op.row(*c) {
                    *next.entry((*c2, bump(*ms, *c2))).or_default() += amp * v;
                }
            }
            next.retain(|_, v| *v != C64::default());
            states = next;
        }
        let last = ops[n];
        let mut closed: Fixed<u64, C64> = Fixed::default();
        for ((c, ms), amp) in &states {
            let v = last.get(*c, a0);
            if v != C64::default() {
                *closed.entry(*ms).or_default() += amp * v;
            }
        }
        let mut terms: Vec<(u64, C64)> = closed.into_iter().collect();
        terms.sort_by_key(|t| t.0);
        compensated_sum_c(terms.into_iter().map(|(ms, a)| a * self.weight(ms)))
    }

    pub fn f(&self, ops: &[&SparseOperator]) -> Result<C64> {
        if ops.is_empty() || ops.len() > MAX_CHAIN {
            return Err(Error::Config(format!("F_n takes 1..={MAX_CHAIN} operators, got {}", ops.len())));
        }
        for op in ops {
            if op.dim() != self.dim() {
                return Err(Error::Dimension { expected: self.dim(), got: op.dim() });
            }
        }
        let parts = self.exec.map_range(self.dim(), |a0| self.closing(a0, ops));
        Ok(compensated_sum_c(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jlo::oracle::brute_force_f;

    #[test]
    fn identity_chains_reduce_to_heat_trace() {
        let sd = SpectralData::build(0.5, 4, Exec::Sequential).unwrap();
        let e = FEngine::new(&sd, Exec::Parallel).unwrap();
        let id = sd.identity();
        let (lam, r) = e.spectrum();
        let heat: f64 = lam.iter().zip(&r).map(|(l, r)| (-l).exp() * r).sum();
        for n in 0..4usize {
            let ops = vec![&id; n + 1];
            let v = e.f(&ops).unwrap();
            let fact: f64 = (1..=n).map(|k| k as f64).product();
            assert!((v.re - heat / fact).abs() < 1e-14 * heat, "n={n}");
            assert!(v.im.abs() < 1e-16);
        }
    }

    #[test]
    fn matches_brute_force_on_small_truncation() {
        let sd = SpectralData::build(0.5, 2, Exec::Sequential).unwrap();
        let e = FEngine::new(&sd, Exec::Sequential).unwrap();
        let db = sd.dirac_commutator(&sd.beta);
        let ops = [&sd.alpha, &db, &sd.beta];
        let fast = e.f(&ops).unwrap();
        let (lam, r) = e.spectrum();
        let dirac: Vec<f64> = lam.iter().map(|l| l.sqrt()).collect();
        let owned: Vec<SparseOperator> = ops.iter().map(|o| (*o).clone()).collect();
        let slow = brute_force_f(&owned, &dirac, &r).unwrap();
        assert!((fast - slow).norm() < 1e-10 * slow.norm().max(1e-3), "{fast} {slow}");
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let sd = SpectralData::build(0.5, 4, Exec::Sequential).unwrap();
        let a = FEngine::new(&sd, Exec::Sequential).unwrap();
        let b = FEngine::new(&sd, Exec::Parallel).unwrap();
        let db = sd.dirac_commutator(&sd.beta);
        let bs = sd.beta.adjoint();
        let ops = [&bs, &db, &sd.alpha, &db];
        assert_eq!(a.f(&ops).unwrap(), b.f(&ops).unwrap());
    }
}
