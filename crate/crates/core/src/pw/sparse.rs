use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::index::PWIndex;
use crate::error::{Error, Result};

/// Square sparse matrix on a labelled truncated Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    labels: Arc<Vec<PWIndex>>,
    rows: Vec<BTreeMap<usize, C64>>,
}

/// One stored entry of the sparse-triplet exchange format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: PWIndex,
    pub col: PWIndex,
    pub re: f64,
    pub im: f64,
}

impl SparseOperator {
    pub fn zero(labels: Arc<Vec<PWIndex>>) -> Self {
        let rows = vec![BTreeMap::new(); labels.len()];
        SparseOperator { labels, rows }
    }

    pub fn identity(labels: Arc<Vec<PWIndex>>) -> Self {
        Self::diagonal(labels, |_| C64::new(1.0, 0.0))
    }

    pub fn diagonal(labels: Arc<Vec<PWIndex>>, f: impl Fn(&PWIndex) -> C64) -> Self {
        let mut op = Self::zero(labels.clone());
        for (a, p) in labels.iter().enumerate() {
            op.set(a, a, f(p));
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &Arc<Vec<PWIndex>> {
        &self.labels
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.rows[r].get(&c).copied().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        if v == C64::default() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    pub fn add_at(&mut self, r: usize, c: usize, v: C64) {
        let e = self.rows[r].entry(c).or_default();
        *e += v;
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, C64> {
        &self.rows[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, *v)))
    }

    fn check_same(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels,
            "operators live on different spaces"
        );
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.labels.clone());
        for (r, c, v) in self.entries() {
            out.rows[c].insert(r, v.conj());
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for row in &mut out.rows {
            for v in row.values_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = self.clone();
        for (r, c, v) in other.entries() {
            out.add_at(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut out = Self::zero(self.labels.clone());
        for (r, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (c, b) in &other.rows[*k] {
                    out.add_at(r, *c, a * b);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// `D_l · self · D_r` for diagonal weights.
    pub fn scale_rows_cols(&self, left: impl Fn(&PWIndex) -> C64, right: impl Fn(&PWIndex) -> C64) -> Self {
        let mut out = self.clone();
        for (r, row) in out.rows.iter_mut().enumerate() {
            let lr = left(&self.labels[r]);
            for (c, v) in row.iter_mut() {
                *v *= lr * right(&self.labels[*c]);
            }
        }
        out
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|row| row.iter().map(|(c, v)| v * x[*c]).sum()).collect()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Dense block with the given rows and columns.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> DMatrix<C64> {
        let pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let mut m = DMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.iter().enumerate() {
            for (c, v) in &self.rows[*r] {
                if let Some(j) = pos.get(c) {
                    m[(i, *j)] = *v;
                }
            }
        }
        m
    }

    /// Restriction to the subspace spanned by `keep` (compression `P·self·P`).
    pub fn compress(&self, keep: &[usize]) -> Self {
        let labels: Arc<Vec<PWIndex>> = Arc::new(keep.iter().map(|k| self.labels[*k]).collect());
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let mut out = Self::zero(labels);
        for (i, r) in keep.iter().enumerate() {
            for (c, v) in &self.rows[*r] {
                if let Some(j) = pos.get(c) {
                    out.rows[i].insert(*j, *v);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value of the columns `cols` (all rows).
    pub fn norm_on(&self, cols: &[usize]) -> f64 {
        let all: Vec<usize> = (0..self.dim()).collect();
        spectral_norm(&self.block(&all, cols))
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.to_dense())
    }

    pub fn to_triplets(&self) -> Vec<Triplet> {
        self.entries()
            .map(|(r, c, v)| Triplet { row: self.labels[r], col: self.labels[c], re: v.re, im: v.im })
            .collect()
    }

    pub fn from_triplets(labels: Arc<Vec<PWIndex>>, triplets: &[Triplet]) -> Result<Self> {
        let pos: HashMap<PWIndex, usize> = labels.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        let mut out = Self::zero(labels);
        for t in triplets {
            let find = |p: &PWIndex| pos.get(p).copied().ok_or_else(|| Error::Parse(format!("label {p} not in space")));
            out.add_at(find(&t.row)?, find(&t.col)?, C64::new(t.re, t.im));
        }
        Ok(out)
    }

    /// Whitespace-separated text form, one entry per line:
    /// `n2 i2 j2  n2 i2 j2  re im`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in self.to_triplets() {
            s.push_str(&format!(
                "{} {} {} {} {} {} {:e} {:e}\n",
                t.row.n2, t.row.i2, t.row.j2, t.col.n2, t.col.i2, t.col.j2, t.re, t.im
            ));
        }
        s
    }
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n2max: u32) -> Arc<Vec<PWIndex>> {
        Arc::new(PWIndex::enumerate(n2max))
    }

    #[test]
    fn adjoint_product_rule() {
        let l = space(1);
        let mut a = SparseOperator::zero(l.clone());
        let mut b = SparseOperator::zero(l.clone());
        a.set(0, 1, C64::new(1.0, 2.0));
        a.set(2, 3, C64::new(-0.5, 0.0));
        b.set(1, 2, C64::new(0.0, 1.0));
        b.set(3, 3, C64::new(2.0, 0.0));
        let lhs = a.mul(&b).adjoint();
        let rhs = b.adjoint().mul(&a.adjoint());
        assert_eq!(lhs, rhs);
        assert_eq!(a.mul(&b).get(0, 2), C64::new(1.0, 2.0) * C64::new(0.0, 1.0));
    }

    #[test]
    fn triplet_round_trip() {
        let l = space(2);
        let mut a = SparseOperator::zero(l.clone());
        a.set(4, 7, C64::new(0.25, -1.0));
        let json = serde_json::to_string(&a.to_triplets()).unwrap();
        let back: Vec<Triplet> = serde_json::from_str(&json).unwrap();
        assert_eq!(SparseOperator::from_triplets(l, &back).unwrap(), a);
        assert_eq!(a.to_text().lines().count(), 1);
    }

    #[test]
    fn identity_norm_and_compression() {
        let l = space(2);
        let id = SparseOperator::identity(l);
        assert!((id.norm() - 1.0).abs() < 1e-12);
        let c = id.compress(&[0, 3, 5]);
        assert_eq!(c.dim(), 3);
        assert_eq!(c.nnz(), 3);
    }
}
