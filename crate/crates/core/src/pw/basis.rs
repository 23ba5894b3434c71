use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use dashmap::DashMap;
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};

use super::index::PWIndex;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::qalgebra::{haar, monomial_product, AlgebraElement, Monomial};
use crate::scalar::{rat_to_f64, rational_from_f64, Coeff, Rat};

/// One weight sector `(i, j)`: the monomials `α^k β^{l₀+p} β*^{m₀+p}` and the
/// exact Gram–Schmidt data turning them into `e^n_{i,j}`.
#[derive(Clone, Debug)]
pub struct Sector {
    pub i2: i32,
    pub j2: i32,
    pub monomials: Vec<Monomial>,
    /// Row `p`: the unnormalized orthogonal vector `f'_p` in monomial coordinates.
    pub coeffs: Vec<Vec<Rat>>,
    /// `‖f'_p‖²`, exact.
    pub norm2: Vec<Rat>,
    pub inv_norm: Vec<f64>,
    /// Global position of `e_p` in the basis ordering.
    pub positions: Vec<usize>,
}

impl Sector {
    pub fn n2_min(&self) -> u32 {
        self.i2.unsigned_abs().max(self.j2.unsigned_abs())
    }
}

/// Truncated Peter–Weyl basis of `L²(SU_q(2), h)` built by exact GNS.
pub struct PWBasis {
    q: Rat,
    qf: f64,
    n2max: u32,
    labels: Arc<Vec<PWIndex>>,
    lookup: HashMap<PWIndex, usize>,
    sectors: BTreeMap<(i32, i32), Sector>,
    /// `h(m* t)` at `q`, keyed by `(m, t)`.
    haar_cache: DashMap<(Monomial, Monomial), Rat>,
    /// `t · m` with coefficients evaluated at `q`.
    product_cache: DashMap<(Monomial, Monomial), Arc<Vec<(Monomial, Coeff)>>>,
}

impl std::fmt::Debug for PWBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PWBasis").field("q", &self.qf).field("n2max", &self.n2max).field("dim", &self.dim()).finish()
    }
}

fn sector_monomials(i2: i32, j2: i32, n2max: u32) -> Vec<Monomial> {
    let k = -(i2 + j2) / 2;
    let diff = (i2 - j2) / 2;
    let (l0, m0) = if diff >= 0 { (diff as u32, 0) } else { (0, (-diff) as u32) };
    let n2min = i2.unsigned_abs().max(j2.unsigned_abs());
    let count = (n2max - n2min) / 2 + 1;
    (0..count).map(|p| Monomial::new(k, l0 + p, m0 + p)).collect()
}

impl PWBasis {
    pub fn build(q: f64, n2max: u32, exec: Exec) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Config(format!("q must lie in (0, 1), got {q}")));
        }
        Self::build_exact(rational_from_f64(q), n2max, exec)
    }

    pub fn build_exact(q: Rat, n2max: u32, exec: Exec) -> Result<Self> {
        let qf = rat_to_f64(&q);
        if !(q > Rat::zero() && q < Rat::one()) {
            return Err(Error::Config(format!("q must lie in (0, 1), got {q}")));
        }
        let labels = Arc::new(PWIndex::enumerate(n2max));
        let lookup: HashMap<PWIndex, usize> = labels.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let mut basis = PWBasis {
            q,
            qf,
            n2max,
            labels,
            lookup,
            sectors: BTreeMap::new(),
            haar_cache: DashMap::new(),
            product_cache: DashMap::new(),
        };
        let n = n2max as i32;
        let mut keys = Vec::new();
        for i2 in -n..=n {
            for j2 in -n..=n {
                if (i2 - j2) % 2 == 0 {
                    keys.push((i2, j2));
                }
            }
        }
        let built = exec.map(&keys, |&(i2, j2)| basis.orthonormalize(i2, j2));
        for s in built {
            let s = s?;
            basis.sectors.insert((s.i2, s.j2), s);
        }
        Ok(basis)
    }

    fn orthonormalize(&self, i2: i32, j2: i32) -> Result<Sector> {
        let monomials = sector_monomials(i2, j2, self.n2max);
        let size = monomials.len();
        let mut gram = vec![vec![Rat::zero(); size]; size];
        for x in 0..size {
            for y in x..size {
                let g = self.haar_pair(&monomials[x], &monomials[y]);
                gram[y][x] = g.clone();
                gram[x][y] = g;
            }
        }
        let mut coeffs: Vec<Vec<Rat>> = Vec::with_capacity(size);
        let mut norm2: Vec<Rat> = Vec::with_capacity(size);
        for a in 0..size {
            let mut v = vec![Rat::zero(); size];
            v[a] = Rat::one();
            for b in 0..a {
                // ⟨f'_b, m_a⟩ / ‖f'_b‖²
                let proj: Rat = (0..=b).map(|x| &coeffs[b][x] * &gram[x][a]).sum::<Rat>() / &norm2[b];
                for x in 0..=b {
                    v[x] -= &proj * &coeffs[b][x];
                }
            }
            let mut nn = Rat::zero();
            for x in 0..=a {
                for y in 0..=a {
                    nn += &v[x] * &v[y] * &gram[x][y];
                }
            }
            if nn <= Rat::zero() {
                return Err(Error::SingularGram { i2, j2, pos: a });
            }
            coeffs.push(v);
            norm2.push(nn);
        }
        let n2min = i2.unsigned_abs().max(j2.unsigned_abs());
        let positions = (0..size).map(|p| self.lookup[&PWIndex { n2: n2min + 2 * p as u32, i2, j2 }]).collect();
        let inv_norm = norm2.iter().map(|d| 1.0 / rat_to_f64(d).sqrt()).collect();
        Ok(Sector { i2, j2, monomials, coeffs, norm2, inv_norm, positions })
    }

    /// `h(m* t)` evaluated at `q`.
    fn haar_pair(&self, m: &Monomial, t: &Monomial) -> Rat {
        if let Some(v) = self.haar_cache.get(&(*m, *t)) {
            return v.clone();
        }
        let v = if m.weights2() != t.weights2() {
            Rat::zero()
        } else {
            let star = AlgebraElement::from(*m).involution();
            let prod = star.multiply(&AlgebraElement::from(*t));
            haar(&prod).eval_rat(&self.q).re
        };
        self.haar_cache.insert((*m, *t), v.clone());
        v
    }

    fn product(&self, t: &Monomial, m: &Monomial) -> Arc<Vec<(Monomial, Coeff)>> {
        if let Some(v) = self.product_cache.get(&(*t, *m)) {
            return v.clone();
        }
        let p = monomial_product(t, m);
        let v: Arc<Vec<_>> = Arc::new(p.terms().map(|(mm, c)| (*mm, c.eval_rat(&self.q))).collect());
        self.product_cache.insert((*t, *m), v.clone());
        v
    }

    pub fn q(&self) -> f64 {
        self.qf
    }

    pub fn q_exact(&self) -> &Rat {
        &self.q
    }

    pub fn n2max(&self) -> u32 {
        self.n2max
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &Arc<Vec<PWIndex>> {
        &self.labels
    }

    pub fn position(&self, p: &PWIndex) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    pub fn sectors(&self) -> impl Iterator<Item = &Sector> {
        self.sectors.values()
    }

    pub fn sector(&self, i2: i32, j2: i32) -> Option<&Sector> {
        self.sectors.get(&(i2, j2))
    }

    /// True iff the vector lies one shell below the cutoff.
    pub fn is_interior(&self, p: &PWIndex) -> bool {
        p.n2 < self.n2max
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.dim()).filter(|k| self.is_interior(&self.labels[*k])).collect()
    }

    pub fn positive(&self) -> Vec<usize> {
        (0..self.dim()).filter(|k| self.labels[*k].is_positive()).collect()
    }

    /// Exact coordinates `⟨f'_a, y⟩` of a vector `y ∈ A^∞` (given with evaluated
    /// coefficients) against the unnormalized basis, keyed by global position.
    fn coordinates(&self, y: &BTreeMap<Monomial, Coeff>) -> Vec<(usize, Coeff, f64)> {
        let mut by_sector: BTreeMap<(i32, i32), Vec<(&Monomial, &Coeff)>> = BTreeMap::new();
        for (m, c) in y {
            by_sector.entry(m.weights2()).or_default().push((m, c));
        }
        let mut out = Vec::new();
        for (key, terms) in by_sector {
            let Some(sector) = self.sectors.get(&key) else { continue };
            let g: Vec<Coeff> = sector
                .monomials
                .iter()
                .map(|mx| {
                    let mut acc = Coeff::zero();
                    for (t, c) in &terms {
                        let h = self.haar_pair(mx, t);
                        if !h.is_zero() {
                            acc = &acc + &c.scale(&h);
                        }
                    }
                    acc
                })
                .collect();
            for (a, row) in sector.coeffs.iter().enumerate() {
                let mut acc = Coeff::zero();
                for (x, cx) in row.iter().enumerate().take(a + 1) {
                    if !cx.is_zero() {
                        acc = &acc + &g[x].scale(cx);
                    }
                }
                if !acc.is_zero() {
                    out.push((sector.positions[a], acc, sector.inv_norm[a]));
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `x`, compressed to the truncated space.
    pub fn represent(&self, x: &AlgebraElement, exec: Exec) -> SparseOperator {
        let xs: Vec<(Monomial, Coeff)> = x.terms().map(|(m, c)| (*m, c.eval_rat(&self.q))).collect();
        let sectors: Vec<&Sector> = self.sectors.values().collect();
        let columns = exec.map(&sectors, |sector| {
            let mut cols = Vec::new();
            for (b, row) in sector.coeffs.iter().enumerate() {
                let mut y: BTreeMap<Monomial, Coeff> = BTreeMap::new();
                for (t, cx) in &xs {
                    for (ym, cy) in sector.monomials.iter().zip(row) {
                        if cy.is_zero() {
                            continue;
                        }
                        let w = cx.scale(cy);
                        for (mm, cp) in self.product(t, ym).iter() {
                            let e = y.entry(*mm).or_default();
                            *e = &*e + &(&w * cp);
                        }
                    }
                }
                y.retain(|_, c| !c.is_zero());
                let col = sector.positions[b];
                for (r, v, inv_a) in self.coordinates(&y) {
                    cols.push((r, col, v.to_c64() * (inv_a * sector.inv_norm[b])));
                }
            }
            cols
        });
        let mut op = SparseOperator::zero(self.labels.clone());
        for (r, c, v) in columns.into_iter().flatten() {
            op.set(r, c, v);
        }
        op
    }

    /// Coefficients of `e_a` on monomials, in floating point.
    pub fn vector_in_monomials(&self, a: usize) -> Vec<(Monomial, f64)> {
        let p = self.labels[a];
        let s = &self.sectors[&(p.i2, p.j2)];
        let k = s.positions.iter().position(|x| *x == a).expect("position belongs to its sector");
        s.monomials
            .iter()
            .zip(&s.coeffs[k])
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (*m, rat_to_f64(c) * s.inv_norm[k]))
            .collect()
    }

    /// `max |⟨e_a, e_b⟩ − δ_ab|` from a fresh exact Gram evaluation.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in self.sectors.values() {
            let size = s.monomials.len();
            for a in 0..size {
                for b in 0..size {
                    let mut ip = Rat::zero();
                    for x in 0..size {
                        for y in 0..size {
                            if s.coeffs[a][x].is_zero() || s.coeffs[b][y].is_zero() {
                                continue;
                            }
                            ip += &s.coeffs[a][x] * &s.coeffs[b][y] * self.haar_pair(&s.monomials[x], &s.monomials[y]);
                        }
                    }
                    let v = rat_to_f64(&ip) * s.inv_norm[a] * s.inv_norm[b];
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((v - target).abs());
                }
            }
        }
        worst
    }

    pub fn diag(&self, f: impl Fn(&PWIndex) -> C64) -> SparseOperator {
        SparseOperator::diagonal(self.labels.clone(), f)
    }
}
