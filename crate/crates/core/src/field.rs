//! Arithmetic in the prime field `F_p` for an odd prime `p`.

use serde::Serialize;

use crate::error::{Error, Result};

/// An odd prime together with the constants derived from it.
///
/// Residues are always stored as least non-negative representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FieldConfig {
    p: u32,
    h: u32,
    h_factorial: u32,
}

impl FieldConfig {
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidInput(format!(
                "p must be an odd prime, got {p}"
            )));
        }
        if p > 65521 {
            return Err(Error::InvalidInput(format!("p = {p} is too large")));
        }
        let h = (p - 1) / 2;
        let h_factorial = (1..=h as u64).fold(1u64, |acc, i| acc * i % p as u64) as u32;
        Ok(FieldConfig { p, h, h_factorial })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// `h = (p - 1) / 2`.
    #[inline]
    pub fn h(&self) -> u32 {
        self.h
    }

    /// `h! mod p`.
    #[inline]
    pub fn h_factorial(&self) -> u32 {
        self.h_factorial
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, (self.p - 2) as u64))
        }
    }

    /// The residue of `(-1)^e`.
    #[inline]
    pub fn sign(&self, e: u64) -> u32 {
        if e % 2 == 0 {
            1
        } else {
            self.p - 1
        }
    }

    /// Integer power `p^e` as a plain integer.
    pub fn p_pow(&self, e: u32) -> u64 {
        (self.p as u64).pow(e)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_and_composite() {
        assert!(FieldConfig::new(2).is_err());
        assert!(FieldConfig::new(9).is_err());
        assert!(FieldConfig::new(1).is_err());
    }

    #[test]
    fn derived_constants() {
        for p in [3u32, 5, 7, 11, 13] {
            let f = FieldConfig::new(p).unwrap();
            assert_eq!(2 * f.h() + 1, p);
            assert!(f.inv(f.h_factorial()).is_some());
        }
        let f5 = FieldConfig::new(5).unwrap();
        assert_eq!(f5.h_factorial(), 2);
        let f7 = FieldConfig::new(7).unwrap();
        assert_eq!(f7.h_factorial(), 6);
    }

    #[test]
    fn inverse_and_sign() {
        let f = FieldConfig::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.sign(3), 6);
        assert_eq!(f.sign(4), 1);
        assert_eq!(f.reduce(-1), 6);
    }
}
