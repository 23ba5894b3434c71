use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label `e^n_{i,j}` with doubled half-integers `n2 = 2n`, `i2 = 2i`, `j2 = 2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i32; 3]", try_from = "[i32; 3]")]
pub struct PWIndex {
    pub n2: u32,
    pub i2: i32,
    pub j2: i32,
}

impl PWIndex {
    pub fn new(n2: u32, i2: i32, j2: i32) -> Result<Self> {
        let n = n2 as i32;
        if i2.abs() > n || j2.abs() > n || (n - i2) % 2 != 0 || (n - j2) % 2 != 0 {
            return Err(Error::Parse(format!("invalid Peter-Weyl index ({n2}, {i2}, {j2})")));
        }
        Ok(PWIndex { n2, i2, j2 })
    }

    pub fn n(&self) -> f64 {
        self.n2 as f64 / 2.0
    }

    /// Eigenvalue of `D`: `2n+1` on `i = n`, `−(2n+1)` otherwise.
    pub fn dirac(&self) -> i64 {
        let v = self.n2 as i64 + 1;
        if self.i2 == self.n2 as i32 {
            v
        } else {
            -v
        }
    }

    /// Exponent `e` with `R e = q^e e`, i.e. `−2i − 2j`.
    pub fn twist_exponent(&self) -> i32 {
        -self.i2 - self.j2
    }

    pub fn is_positive(&self) -> bool {
        self.i2 == self.n2 as i32
    }

    /// `s = n + j` and `d = n − j` on the positive subspace.
    pub fn sector_step(&self) -> (u32, u32) {
        let s = (self.n2 as i32 + self.j2) / 2;
        let d = (self.n2 as i32 - self.j2) / 2;
        (s as u32, d as u32)
    }

    /// All labels with `n2 ≤ n2max`, ordered by `(n2, i2, j2)`.
    pub fn enumerate(n2max: u32) -> Vec<PWIndex> {
        let mut out = Vec::new();
        for n2 in 0..=n2max {
            let n = n2 as i32;
            for i2 in (-n..=n).step_by(2) {
                for j2 in (-n..=n).step_by(2) {
                    out.push(PWIndex { n2, i2, j2 });
                }
            }
        }
        out
    }
}

impl From<PWIndex> for [i32; 3] {
    fn from(p: PWIndex) -> Self {
        [p.n2 as i32, p.i2, p.j2]
    }
}

impl TryFrom<[i32; 3]> for PWIndex {
    type Error = Error;
    fn try_from(a: [i32; 3]) -> Result<Self> {
        if a[0] < 0 {
            return Err(Error::Parse(format!("negative n2 in {a:?}")));
        }
        PWIndex::new(a[0] as u32, a[1], a[2])
    }
}

impl fmt::Display for PWIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let half = |v: i32| if v % 2 == 0 { format!("{}", v / 2) } else { format!("{v}/2") };
        write!(f, "e^{}_({},{})", half(self.n2 as i32), half(self.i2), half(self.j2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PWIndex::new(1, 1, -1).is_ok());
        assert!(PWIndex::new(1, 0, 1).is_err());
        assert!(PWIndex::new(2, 3, 1).is_err());
    }

    #[test]
    fn dimension_is_sum_of_squares() {
        for n2max in 0..6u32 {
            let expect: u32 = (0..=n2max).map(|n2| (n2 + 1) * (n2 + 1)).sum();
            assert_eq!(PWIndex::enumerate(n2max).len() as u32, expect);
        }
    }

    #[test]
    fn dirac_signs() {
        assert_eq!(PWIndex::new(0, 0, 0).unwrap().dirac(), 1);
        assert_eq!(PWIndex::new(1, 1, 1).unwrap().dirac(), 2);
        assert_eq!(PWIndex::new(1, -1, 1).unwrap().dirac(), -2);
    }

    #[test]
    fn serde_as_triple() {
        let p = PWIndex::new(3, 1, -3).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[3,1,-3]");
        assert_eq!(serde_json::from_str::<PWIndex>(&s).unwrap(), p);
        assert!(serde_json::from_str::<PWIndex>("[1,0,0]").is_err());
    }
}
