//! Quadrature reference implementations, deliberately free of divided
//! differences. Slow; meant for tests and cross-checks.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::pw::sparse::SparseOperator;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_64, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_DEPTH: u32 = 40;

fn gk15(f: &mut dyn FnMut(f64) -> C64, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

fn adapt(f: &mut dyn FnMut(f64) -> C64, a: f64, b: f64, whole: (C64, f64), tol: f64, depth: u32) -> C64 {
    let (v, err) = whole;
    if err <= tol || depth >= MAX_DEPTH || b - a < 1e-14 {
        return v;
    }
    let m = 0.5 * (a + b);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    adapt(f, a, m, left, 0.5 * tol, depth + 1) + adapt(f, m, b, right, 0.5 * tol, depth + 1)
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
pub fn integrate(f: &mut dyn FnMut(f64) -> C64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> C64 {
    if b <= a {
        return C64::default();
    }
    let first = gk15(f, a, b);
    let tol = abs_tol.max(rel_tol * first.0.norm());
    adapt(f, a, b, first, tol, 0)
}

pub fn integrate_real(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    integrate(&mut |x| C64::new(f(x), 0.0), a, b, abs_tol, rel_tol).re
}

fn two_node(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let d = hi - lo;
    if d == 0.0 {
        (-lo).exp()
    } else {
        (-lo).exp() * -(-d).exp_m1() / d
    }
}

/// Requested relative tolerance per nesting level.
pub const SIMPLEX_REL_TOL: f64 = 1e-10;
pub const BRUTE_FORCE_REL_TOL: f64 = 1e-9;

/// `∫_{Σ_n} exp(−Σ t_k λ_k) dt` by nested quadrature,
/// `S(λ₀..λ_n) = ∫₀¹ e^{−sλ_n} (1−s)^{n−1} S((1−s)λ₀..(1−s)λ_{n−1}) ds`,
/// with the innermost one-dimensional integral in closed form.
pub fn simplex_exp_quadrature(nodes: &[f64]) -> f64 {
    match nodes.len() {
        0 => 0.0,
        1 => (-nodes[0]).exp(),
        2 => two_node(nodes[0], nodes[1]),
        n => {
            let (last, rest) = nodes.split_last().unwrap();
            let p = (n - 2) as i32;
            let mut scaled = rest.to_vec();
            integrate_real(
                &mut |s| {
                    for (dst, src) in scaled.iter_mut().zip(rest) {
                        *dst = (1.0 - s) * src;
                    }
                    (-s * last).exp() * (1.0 - s).powi(p) * simplex_exp_quadrature(&scaled)
                },
                0.0,
                1.0,
                1e-300,
                SIMPLEX_REL_TOL,
            )
        }
    }
}

pub const BRUTE_FORCE_MAX_DIM: usize = 64;

/// `∫_{Σ_n} Tr(A₀ e^{−t₀D²} A₁ ⋯ A_n e^{−t_n D²} R) dt` with dense matrices
/// and nested adaptive quadrature over every simplex coordinate.
pub fn brute_force_f(ops: &[SparseOperator], dirac: &[f64], twist: &[f64]) -> Result<C64> {
    let dim = dirac.len();
    if ops.is_empty() {
        return Err(Error::Config("F_n needs at least one operator".into()));
    }
    if dim > BRUTE_FORCE_MAX_DIM {
        return Err(Error::Config(format!("brute force limited to dimension {BRUTE_FORCE_MAX_DIM}, got {dim}")));
    }
    for op in ops {
        if op.dim() != dim {
            return Err(Error::Dimension { expected: dim, got: op.dim() });
        }
    }
    if twist.len() != dim {
        return Err(Error::Dimension { expected: dim, got: twist.len() });
    }
    let lam: Vec<f64> = dirac.iter().map(|d| d * d).collect();
    let dense: Vec<DMatrix<C64>> = ops.iter().map(SparseOperator::to_dense).collect();
    let r = DMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(twist[i], 0.0) } else { C64::default() });
    let n = ops.len() - 1;
    Ok(level(&dense, &lam, n, 1.0, r))
}

/// Integrates over `t_k ∈ [0, mass]` with `tail = A_{k+1} E(t_{k+1}) ⋯ R`
/// already accumulated; `t₀` takes whatever mass is left.
fn level(ops: &[DMatrix<C64>], lam: &[f64], k: usize, mass: f64, tail: DMatrix<C64>) -> C64 {
    let heat = |t: f64, m: &DMatrix<C64>| {
        let mut out = m.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= C64::new((-t * lam[i]).exp(), 0.0);
        }
        out
    };
    if k == 0 {
        return (&ops[0] * heat(mass, &tail)).trace();
    }
    integrate(
        &mut |t| {
            let next = &ops[k] * heat(t, &tail);
            level(ops, lam, k - 1, mass - t, next)
        },
        0.0,
        mass,
        1e-15,
        BRUTE_FORCE_REL_TOL,
    )
}

pub const BLOCK_EXP_MAX_DIM: usize = 2048;

/// Same functional as [`brute_force_f`], read off the corner block of
/// `exp(M)` for the block-bidiagonal `M` with `−D²` on the diagonal and
/// `A₁..A_n` above it.
pub fn block_exp_f(ops: &[SparseOperator], dirac: &[f64], twist: &[f64]) -> Result<C64> {
    let dim = dirac.len();
    if ops.is_empty() {
        return Err(Error::Config("F_n needs at least one operator".into()));
    }
    let n = ops.len() - 1;
    let big = (n + 1) * dim;
    if big > BLOCK_EXP_MAX_DIM {
        return Err(Error::Config(format!("block exponential limited to dimension {BLOCK_EXP_MAX_DIM}, got {big}")));
    }
    if twist.len() != dim {
        return Err(Error::Dimension { expected: dim, got: twist.len() });
    }
    for op in ops {
        if op.dim() != dim {
            return Err(Error::Dimension { expected: dim, got: op.dim() });
        }
    }
    let mut m = DMatrix::<C64>::zeros(big, big);
    for b in 0..=n {
        for i in 0..dim {
            m[(b * dim + i, b * dim + i)] = C64::new(-dirac[i] * dirac[i], 0.0);
        }
    }
    for (b, op) in ops.iter().enumerate().skip(1) {
        let a = op.to_dense();
        m.view_mut(((b - 1) * dim, b * dim), (dim, dim)).copy_from(&a);
    }
    let e = m.exp();
    let corner = e.view((0, n * dim), (dim, dim));
    let a0 = ops[0].to_dense();
    let mut s = C64::default();
    for i in 0..dim {
        for k in 0..dim {
            s += a0[(i, k)] * corner[(k, i)] * twist[i];
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jlo::divdiff::simplex_exp_integral;

    #[test]
    fn quadrature_matches_closed_forms() {
        let v = integrate_real(&mut |x| x.sin(), 0.0, std::f64::consts::PI, 1e-15, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        let nodes = [0.5, 3.0, 3.0, 9.0];
        let a = simplex_exp_quadrature(&nodes);
        let b = simplex_exp_integral(&nodes);
        assert!((a - b).abs() < 1e-11 * b, "{a} {b}");
        let e = simplex_exp_quadrature(&[2.0; 3]);
        assert!((e - (-2.0f64).exp() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn block_exponential_matches_nested_quadrature() {
        use crate::pw::SpectralData;
        use crate::Exec;
        let sd = SpectralData::build(0.5, 2, Exec::Sequential).unwrap();
        let dirac: Vec<f64> = sd.basis.labels().iter().map(|p| p.dirac() as f64).collect();
        let q = sd.q();
        let twist: Vec<f64> = sd.basis.labels().iter().map(|p| q.powi(p.twist_exponent())).collect();
        let db = sd.dirac_commutator(&sd.beta);
        let ops = vec![sd.beta.adjoint(), db.clone(), sd.alpha.clone()];
        let a = brute_force_f(&ops, &dirac, &twist).unwrap();
        let b = block_exp_f(&ops, &dirac, &twist).unwrap();
        assert!((a - b).norm() < 1e-10 * a.norm().max(1e-3), "{a} {b}");
        let id = sd.identity();
        let heat: f64 = dirac.iter().zip(&twist).map(|(d, r)| r * (-d * d).exp()).sum();
        let c = block_exp_f(&[id.clone(), id.clone(), id], &dirac, &twist).unwrap();
        assert!((c.re - heat / 2.0).abs() < 1e-12, "{c}");
    }
}
