//! Integer backends for residues modulo an odd prime.
//!
//! Everything above the field layer is generic over [`Residue`]. Two backends
//! ship with the crate: `u64` (moduli below 2^32, so products never overflow)
//! and [`BigUint`] (any size).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

/// Machine or arbitrary-precision integer used to hold residues mod `p`.
///
/// All arguments of the `*_mod` methods are already reduced.
pub trait Residue:
    Clone + Debug + Display + Eq + Ord + Hash + Send + Sync + 'static + Zero + One + Integer + FromPrimitive
{
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self;
    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self;
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self;

    /// Number of significant bits.
    fn bits(&self) -> u64;
    fn bit(&self, i: u64) -> bool;

    fn to_biguint(&self) -> BigUint;
    fn from_biguint(v: &BigUint) -> Option<Self>;

    /// Whether this backend can do arithmetic modulo `p`.
    fn supports_modulus(p: &BigUint) -> bool;

    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        let mut acc = Self::one();
        let nbits = exp.bits();
        for i in (0..nbits).rev() {
            acc = acc.mul_mod(&acc, m);
            if exp.bit(i) {
                acc = acc.mul_mod(self, m);
            }
        }
        acc
    }
}

impl Residue for u64 {
    #[inline]
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        let s = self + rhs;
        if s >= *m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self - rhs
        } else {
            self + m - rhs
        }
    }

    #[inline]
    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self * rhs) % m
    }

    fn bits(&self) -> u64 {
        u64::from(64 - self.leading_zeros())
    }

    fn bit(&self, i: u64) -> bool {
        i < 64 && (self >> i) & 1 == 1
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        v.to_u64()
    }

    fn supports_modulus(p: &BigUint) -> bool {
        p.bits() <= 32
    }
}

impl Residue for BigUint {
    fn add_mod(&self, rhs: &Self, m: &Self) -> Self {
        let s = self + rhs;
        if &s >= m {
            s - m
        } else {
            s
        }
    }

    fn sub_mod(&self, rhs: &Self, m: &Self) -> Self {
        if self >= rhs {
            self - rhs
        } else {
            self + m - rhs
        }
    }

    fn mul_mod(&self, rhs: &Self, m: &Self) -> Self {
        (self * rhs) % m
    }

    fn bits(&self) -> u64 {
        BigUint::bits(self)
    }

    fn bit(&self, i: u64) -> bool {
        BigUint::bit(self, i)
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }

    fn from_biguint(v: &BigUint) -> Option<Self> {
        Some(v.clone())
    }

    fn supports_modulus(_p: &BigUint) -> bool {
        true
    }

    fn pow_mod(&self, exp: &Self, m: &Self) -> Self {
        self.modpow(exp, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree_on_pow() {
        let m = 1_000_003u64;
        for (b, e) in [(2u64, 10u64), (12345, 999_999), (0, 5), (7, 0)] {
            let small = b.pow_mod(&e, &m);
            let big = BigUint::from(b).pow_mod(&BigUint::from(e), &BigUint::from(m));
            assert_eq!(BigUint::from(small), big);
        }
    }

    #[test]
    fn u64_sub_wraps() {
        assert_eq!(3u64.sub_mod(&5, &7), 5);
        assert_eq!(6u64.add_mod(&5, &7), 4);
    }
}
