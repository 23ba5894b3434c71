use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Normal-ordered monomial `α^k β^l β*^m`; negative `k` means `α*^{-k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub k: i32,
    pub l: u32,
    pub m: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { k: 0, l: 0, m: 0 };
    pub const ALPHA: Monomial = Monomial { k: 1, l: 0, m: 0 };
    pub const ALPHA_STAR: Monomial = Monomial { k: -1, l: 0, m: 0 };
    pub const BETA: Monomial = Monomial { k: 0, l: 1, m: 0 };
    pub const BETA_STAR: Monomial = Monomial { k: 0, l: 0, m: 1 };

    pub fn new(k: i32, l: u32, m: u32) -> Self {
        Monomial { k, l, m }
    }

    pub fn degree(&self) -> u32 {
        self.k.unsigned_abs() + self.l + self.m
    }

    /// Left bidegree `wL = k − l + m`.
    pub fn w_left(&self) -> i32 {
        self.k - self.l as i32 + self.m as i32
    }

    /// Right bidegree `wR = k + l − m`.
    pub fn w_right(&self) -> i32 {
        self.k + self.l as i32 - self.m as i32
    }

    /// Doubled Peter–Weyl weights `(2i, 2j) = (−wL, −wR)` of the vector `x·1`.
    pub fn weights2(&self) -> (i32, i32) {
        (-self.w_left(), -self.w_right())
    }

    /// Every monomial of total degree at most `d`, ordered by degree then key.
    pub fn up_to_degree(d: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for deg in 0..=d {
            for l in 0..=deg {
                for m in 0..=(deg - l) {
                    let a = (deg - l - m) as i32;
                    if a == 0 {
                        out.push(Monomial::new(0, l, m));
                    } else {
                        out.push(Monomial::new(a, l, m));
                        out.push(Monomial::new(-a, l, m));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{} b^{} b*^{}", self.k, self.l, self.m)
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses the key form `"a^k b^l b*^m"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("bad monomial key {s:?}"));
        let mut parts = s.split_whitespace();
        let mut take =
            |prefix: &str| -> Result<&str, Error> { parts.next().and_then(|p| p.strip_prefix(prefix)).ok_or_else(bad) };
        let k = take("a^")?.parse().map_err(|_| bad())?;
        let l = take("b^")?.parse().map_err(|_| bad())?;
        let m = take("b*^")?.parse().map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Monomial { k, l, m })
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_form_round_trips() {
        let m = Monomial::new(-3, 2, 1);
        assert_eq!(m.to_string(), "a^-3 b^2 b*^1");
        assert_eq!("a^-3 b^2 b*^1".parse::<Monomial>().unwrap(), m);
        assert!("a^1 b^2".parse::<Monomial>().is_err());
    }

    #[test]
    fn enumeration_counts() {
        // Σ_{t=0}^{d} (t+1)(2(d−t)+1)
        assert_eq!(Monomial::up_to_degree(0).len(), 1);
        assert_eq!(Monomial::up_to_degree(1).len(), 5);
        assert_eq!(Monomial::up_to_degree(4).len(), 55);
        assert_eq!(Monomial::up_to_degree(6).len(), 140);
    }

    #[test]
    fn generator_weights() {
        assert_eq!(Monomial::ALPHA.weights2(), (-1, -1));
        assert_eq!(Monomial::BETA.weights2(), (1, -1));
        assert_eq!(Monomial::BETA_STAR.weights2(), (-1, 1));
        assert_eq!(Monomial::ALPHA_STAR.weights2(), (1, 1));
    }
}
