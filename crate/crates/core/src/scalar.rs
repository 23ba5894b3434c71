//! Exact scalars in the deformation parameter `q`.
//!
//! [`Coeff`] is a Gaussian rational, [`QScalar`] a Laurent polynomial in `q`
//! with `Coeff` coefficients, and [`QFraction`] a quotient of a Laurent
//! polynomial by a product of q-integers `[k] = 1 + q² + ... + q^{2(k-1)}`.
//! Haar state values live in `QFraction`; everything in the algebra itself
//! stays polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // to_f64 can fail on huge numerators/denominators; scale by bit length.
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 512;
        let n = if shift > 0 { r.numer() >> shift as usize } else { r.numer().clone() };
        let d = if shift > 0 { r.denom() >> shift as usize } else { r.denom().clone() };
        n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(f64::INFINITY)
    })
}

/// Parses `"3/7"`, `"-2"`, `"0.25"` or `"1.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Shortest decimal rendering of `x`, read back exactly.
pub fn rational_from_f64(x: f64) -> Rat {
    parse_rational(&format!("{x}")).expect("finite float renders as decimal")
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coeff {
    pub re: Rat,
    pub im: Rat,
}

impl Coeff {
    pub fn real(re: Rat) -> Self {
        Coeff { re, im: Rat::zero() }
    }

    pub fn new(re: Rat, im: Rat) -> Self {
        Coeff { re, im }
    }

    pub fn int(n: i64) -> Self {
        Self::real(Rat::from_integer(n.into()))
    }

    pub fn i() -> Self {
        Coeff { re: Rat::zero(), im: Rat::one() }
    }

    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_real() {
            return Some(Self::real(self.re.recip()));
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Coeff { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Coeff { re: &self.re * r, im: &self.im * r }
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::int(1)
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        &self + &o
    }
}

impl<'a> Add<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        if self.is_real() && o.is_real() {
            return Coeff::real(&self.re + &o.re);
        }
        Coeff { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        &self * &o
    }
}

impl<'a> Mul<&'a Coeff> for &'a Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.is_real() && o.is_real() {
            return Coeff::real(&self.re * &o.re);
        }
        Coeff { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({}{}{}i)", self.re, if self.im.is_negative() { "" } else { "+" }, self.im)
        }
    }
}

/// Laurent polynomial in `q`: exponent → coefficient, zero entries never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QScalar {
    terms: BTreeMap<i32, Coeff>,
}

impl QScalar {
    pub fn constant(c: Coeff) -> Self {
        let mut s = QScalar::default();
        s.add_term(0, c);
        s
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Coeff::int(n))
    }

    pub fn rational(r: Rat) -> Self {
        Self::constant(Coeff::real(r))
    }

    /// `c · q^e`.
    pub fn monomial(e: i32, c: Coeff) -> Self {
        let mut s = QScalar::default();
        s.add_term(e, c);
        s
    }

    pub fn q_pow(e: i32) -> Self {
        Self::monomial(e, Coeff::one())
    }

    /// The q-integer `[k] = 1 + q² + ... + q^{2(k-1)} = (1 − q^{2k})/(1 − q²)`.
    pub fn q_bracket(k: u32) -> Self {
        let mut s = QScalar::default();
        for t in 0..k {
            s.add_term(2 * t as i32, Coeff::one());
        }
        s
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Coeff)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: i32) -> Coeff {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: i32, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &QScalar, factor: &QScalar) {
        for (e1, c1) in &factor.terms {
            for (e2, c2) in &other.terms {
                self.add_term(e1 + e2, c1 * c2);
            }
        }
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: i32) -> QScalar {
        QScalar { terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    pub fn scale(&self, c: &Coeff) -> QScalar {
        if c.is_zero() {
            return QScalar::default();
        }
        QScalar { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    /// Complex conjugation of the coefficients (`q` is real).
    pub fn conj(&self) -> QScalar {
        QScalar { terms: self.terms.iter().map(|(k, c)| (*k, c.conj())).collect() }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(Coeff::is_real)
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Exact value at a rational `q`.
    pub fn eval_rat(&self, q: &Rat) -> Coeff {
        let mut acc = Coeff::zero();
        for (e, c) in &self.terms {
            let p = rat_pow(q, *e);
            acc = &acc + &c.scale(&p);
        }
        acc
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            acc += c.to_c64() * q.powi(*e);
        }
        acc
    }

    /// Exact quotient `self / d` when `d` divides `self` in `Coeff[q, q⁻¹]`.
    pub fn div_exact(&self, d: &QScalar) -> Option<QScalar> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QScalar::default());
        }
        let d_lo = d.min_exp().unwrap();
        let d_hi = d.max_exp().unwrap();
        let lead_inv = d.terms[&d_hi].inv()?;
        let mut rem = self.clone();
        let mut quot = QScalar::default();
        // Long division from the top; the divisor is normalized to start at q^0.
        while let Some(hi) = rem.max_exp() {
            let lo = rem.min_exp().unwrap();
            if hi - lo < d_hi - d_lo {
                return None;
            }
            let c = &rem.terms[&hi] * &lead_inv;
            let e = hi - d_hi;
            quot.add_term(e, c.clone());
            for (de, dc) in &d.terms {
                rem.add_term(e + de, -(dc * &c));
            }
        }
        Some(quot)
    }
}

pub(crate) fn rat_pow(q: &Rat, e: i32) -> Rat {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

impl Zero for QScalar {
    fn zero() -> Self {
        QScalar::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for QScalar {
    fn one() -> Self {
        QScalar::int(1)
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        let mut s = self.clone();
        for (e, c) in &o.terms {
            s.add_term(*e, c.clone());
        }
        s
    }
}

impl Add for QScalar {
    type Output = QScalar;
    fn add(self, o: QScalar) -> QScalar {
        &self + &o
    }
}

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        for (e, c) in &o.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        let mut s = self.clone();
        for (e, c) in &o.terms {
            s.add_term(*e, -c.clone());
        }
        s
    }
}

impl Sub for QScalar {
    type Output = QScalar;
    fn sub(self, o: QScalar) -> QScalar {
        &self - &o
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        let mut s = QScalar::default();
        s.add_scaled(self, o);
        s
    }
}

impl Mul for QScalar {
    type Output = QScalar;
    fn mul(self, o: QScalar) -> QScalar {
        &self * &o
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}·q^{e}")?,
            }
        }
        Ok(())
    }
}

/// Serialized form of a Laurent polynomial: `(exponent, numerator, denominator)`
/// for the real part, plus the imaginary part when present.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QScalarRepr {
    pub re: Vec<(i32, String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<(i32, String, String)>,
}

impl From<&QScalar> for QScalarRepr {
    fn from(s: &QScalar) -> Self {
        let part = |pick: fn(&Coeff) -> &Rat| {
            s.terms
                .iter()
                .filter(|(_, c)| !pick(c).is_zero())
                .map(|(e, c)| (*e, pick(c).numer().to_string(), pick(c).denom().to_string()))
                .collect::<Vec<_>>()
        };
        QScalarRepr { re: part(|c| &c.re), im: part(|c| &c.im) }
    }
}

impl TryFrom<&QScalarRepr> for QScalar {
    type Error = Error;
    fn try_from(r: &QScalarRepr) -> Result<Self, Error> {
        let mut s = QScalar::default();
        for (e, n, d) in &r.re {
            s.add_term(*e, Coeff::real(parse_rational(&format!("{n}/{d}"))?));
        }
        for (e, n, d) in &r.im {
            let im = parse_rational(&format!("{n}/{d}"))?;
            s.add_term(*e, Coeff::new(Rat::zero(), im));
        }
        Ok(s)
    }
}

impl Serialize for QScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        QScalarRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = QScalarRepr::deserialize(d)?;
        QScalar::try_from(&r).map_err(serde::de::Error::custom)
    }
}

/// `num / Π [k]^{mult}` with q-integer denominators.
///
/// Addition brings both sides to the multiset-maximum of their denominator
/// factors; after every operation any factor that divides the numerator
/// exactly is cancelled. The zero test is exact since denominators never vanish
/// for `0 < q`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QFraction {
    num: QScalar,
    den: BTreeMap<u32, u32>,
}

impl QFraction {
    pub fn new(num: QScalar) -> Self {
        QFraction { num, den: BTreeMap::new() }
    }

    /// `num / [k]`.
    pub fn over_bracket(num: QScalar, k: u32) -> Self {
        let mut den = BTreeMap::new();
        if k > 1 {
            den.insert(k, 1);
        }
        let mut f = QFraction { num, den };
        f.reduce();
        f
    }

    pub fn numerator(&self) -> &QScalar {
        &self.num
    }

    pub fn denominator(&self) -> QScalar {
        let mut d = QScalar::one();
        for (k, m) in &self.den {
            for _ in 0..*m {
                d = &d * &QScalar::q_bracket(*k);
            }
        }
        d
    }

    pub fn denominator_factors(&self) -> &BTreeMap<u32, u32> {
        &self.den
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let keys: Vec<u32> = self.den.keys().copied().collect();
        for k in keys {
            let br = QScalar::q_bracket(k);
            while self.den.get(&k).copied().unwrap_or(0) > 0 {
                match self.num.div_exact(&br) {
                    Some(qt) => {
                        self.num = qt;
                        let m = self.den.get_mut(&k).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            self.den.remove(&k);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    fn lift(&self, target: &BTreeMap<u32, u32>) -> QScalar {
        let mut n = self.num.clone();
        for (k, m) in target {
            let have = self.den.get(k).copied().unwrap_or(0);
            for _ in have..*m {
                n = &n * &QScalar::q_bracket(*k);
            }
        }
        n
    }

    fn common_den(&self, o: &QFraction) -> BTreeMap<u32, u32> {
        let mut d = self.den.clone();
        for (k, m) in &o.den {
            let e = d.entry(*k).or_insert(0);
            *e = (*e).max(*m);
        }
        d
    }

    pub fn scale(&self, s: &QScalar) -> QFraction {
        let mut f = QFraction { num: &self.num * s, den: self.den.clone() };
        f.reduce();
        f
    }

    pub fn conj(&self) -> QFraction {
        QFraction { num: self.num.conj(), den: self.den.clone() }
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.num.eval(q) / self.denominator().eval(q)
    }

    pub fn eval_rat(&self, q: &Rat) -> Coeff {
        let d = self.denominator().eval_rat(q);
        let n = self.num.eval_rat(q);
        &n * &d.inv().expect("q-integers are positive for q > 0")
    }

    pub fn as_polynomial(&self) -> Option<&QScalar> {
        self.den.is_empty().then_some(&self.num)
    }
}

impl From<QScalar> for QFraction {
    fn from(s: QScalar) -> Self {
        QFraction::new(s)
    }
}

impl Zero for QFraction {
    fn zero() -> Self {
        QFraction::default()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for QFraction {
    fn one() -> Self {
        QFraction::new(QScalar::one())
    }
}

impl<'a> Add<&'a QFraction> for &'a QFraction {
    type Output = QFraction;
    fn add(self, o: &QFraction) -> QFraction {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let den = self.common_den(o);
        let mut f = QFraction { num: &self.lift(&den) + &o.lift(&den), den };
        f.reduce();
        f
    }
}

impl Add for QFraction {
    type Output = QFraction;
    fn add(self, o: QFraction) -> QFraction {
        &self + &o
    }
}

impl<'a> Sub<&'a QFraction> for &'a QFraction {
    type Output = QFraction;
    fn sub(self, o: &QFraction) -> QFraction {
        self + &(-o.clone())
    }
}

impl Sub for QFraction {
    type Output = QFraction;
    fn sub(self, o: QFraction) -> QFraction {
        &self - &o
    }
}

impl<'a> Mul<&'a QFraction> for &'a QFraction {
    type Output = QFraction;
    fn mul(self, o: &QFraction) -> QFraction {
        let mut den = self.den.clone();
        for (k, m) in &o.den {
            *den.entry(*k).or_insert(0) += m;
        }
        let mut f = QFraction { num: &self.num * &o.num, den };
        f.reduce();
        f
    }
}

impl Mul for QFraction {
    type Output = QFraction;
    fn mul(self, o: QFraction) -> QFraction {
        &self * &o
    }
}

impl Neg for QFraction {
    type Output = QFraction;
    fn neg(self) -> QFraction {
        QFraction { num: -self.num, den: self.den }
    }
}

impl fmt::Display for QFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / (", self.num)?;
        for (i, (k, m)) in self.den.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "[{k}]")?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        write!(f, ")")
    }
}
