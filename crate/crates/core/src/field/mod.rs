//! Arithmetic in `F_p` and `F_{p^2} = F_p[t]/(t^2 - n)`.
//!
//! `n` is always the smallest positive integer that is a non-residue mod `p`,
//! so the representation of `F_{p^2}` is fixed by `p` alone. Elements are
//! `a + b*t` with both coordinates reduced. The canonical encoding
//! `a + p*b` gives the total order used wherever roots have to be ordered;
//! [`Fp2::sqrt`] returns the root that is smaller in that order.

mod residue;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigUint;
use num_prime::nt_funcs::is_prime;
use thiserror::Error;

pub use residue::Residue;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("characteristic {0} is not supported (need an odd prime >= 5)")]
    SmallCharacteristic(BigUint),
    #[error("modulus {0} is too large for this residue backend")]
    BackendTooSmall(BigUint),
    #[error("division by zero")]
    DivisionByZero,
    #[error("byte string has length {got}, expected {expected}")]
    BadEncodingLength { expected: usize, got: usize },
    #[error("coordinate out of range")]
    NotReduced,
}

/// Primality test shared by everything that accepts a user supplied prime.
pub fn is_probable_prime(n: &BigUint) -> bool {
    is_prime(n, None).probably()
}

/// Parameters of `F_{p^2}`; shared behind an [`Arc`] by every element.
#[derive(Debug)]
pub struct FieldContext<U: Residue> {
    p: U,
    n: U,
    p_big: BigUint,
    byte_width: usize,
    legendre_exp: U,
    inv_exp: U,
    two_adicity: u32,
    /// `(q - 1) / 2` for `p - 1 = 2^s q`.
    half_odd: U,
    sylow_gen: U,
    inv_two: U,
}

impl<U: Residue> FieldContext<U> {
    /// Builds the context for an odd prime `p >= 5`.
    ///
    /// `p = 5` is accepted for splitting-level computations only; invariant
    /// computations reject characteristic 5 on their own.
    pub fn new(p: U) -> Result<Arc<Self>, FieldError> {
        let p_big = p.to_biguint();
        if p_big < BigUint::from(5u32) {
            return Err(FieldError::SmallCharacteristic(p_big));
        }
        if !U::supports_modulus(&p_big) {
            return Err(FieldError::BackendTooSmall(p_big));
        }
        if !is_probable_prime(&p_big) {
            return Err(FieldError::NotPrime(p_big));
        }
        let one = U::one();
        let two = U::from_u8(2).expect("2 fits");
        let p_minus_1 = p.clone() - one.clone();
        let legendre_exp = p_minus_1.clone() / two.clone();
        let inv_exp = p.clone() - two.clone();

        let mut odd_part = p_minus_1.clone();
        let mut two_adicity = 0u32;
        while odd_part.is_even() {
            odd_part = odd_part / two.clone();
            two_adicity += 1;
        }
        let half_odd = (odd_part.clone() - one.clone()) / two.clone();

        let mut n = two.clone();
        loop {
            if n.pow_mod(&legendre_exp, &p) == p_minus_1 {
                break;
            }
            n = n + one.clone();
        }
        let sylow_gen = n.pow_mod(&odd_part, &p);
        let inv_two = (p.clone() + one.clone()) / two;
        let byte_width = p_big.bits().div_ceil(8) as usize;

        Ok(Arc::new(Self {
            p,
            n,
            p_big,
            byte_width,
            legendre_exp,
            inv_exp,
            two_adicity,
            half_odd,
            sylow_gen,
            inv_two,
        }))
    }

    pub fn p(&self) -> &U {
        &self.p
    }

    pub fn p_big(&self) -> &BigUint {
        &self.p_big
    }

    /// The non-residue `n` with `t^2 = n`.
    pub fn non_residue(&self) -> &U {
        &self.n
    }

    /// Width in bytes of one serialized coordinate.
    pub fn byte_width(&self) -> usize {
        self.byte_width
    }

    /// `p` reduced to a machine word when it fits (small primes only).
    pub fn p_u64(&self) -> Option<u64> {
        num_traits::ToPrimitive::to_u64(&self.p_big)
    }

    // --- prime field helpers -------------------------------------------------

    fn fp_reduce_u64(&self, v: u64) -> U {
        let v = U::from_u64(v).unwrap_or_else(|| {
            U::from_biguint(&(BigUint::from(v) % &self.p_big)).expect("reduced value fits")
        });
        v.mod_floor(&self.p)
    }

    fn fp_mul(&self, x: &U, y: &U) -> U {
        x.mul_mod(y, &self.p)
    }

    fn fp_add(&self, x: &U, y: &U) -> U {
        x.add_mod(y, &self.p)
    }

    fn fp_sub(&self, x: &U, y: &U) -> U {
        x.sub_mod(y, &self.p)
    }

    fn fp_neg(&self, x: &U) -> U {
        if x.is_zero() {
            U::zero()
        } else {
            self.p.clone() - x.clone()
        }
    }

    fn fp_inv(&self, x: &U) -> Option<U> {
        if x.is_zero() {
            None
        } else {
            Some(x.pow_mod(&self.inv_exp, &self.p))
        }
    }

    /// Euler criterion; zero counts as a square.
    fn fp_is_square(&self, x: &U) -> bool {
        x.is_zero() || x.pow_mod(&self.legendre_exp, &self.p).is_one()
    }

    /// Tonelli-Shanks in `F_p`. Caller guarantees `x` is a square.
    fn fp_sqrt(&self, x: &U) -> U {
        if x.is_zero() {
            return U::zero();
        }
        let p = &self.p;
        let mut m = self.two_adicity;
        let mut c = self.sylow_gen.clone();
        let w = x.pow_mod(&self.half_odd, p);
        let mut r = x.mul_mod(&w, p);
        let mut t = r.mul_mod(&w, p);
        while !t.is_one() {
            let mut i = 0u32;
            let mut tt = t.clone();
            while !tt.is_one() {
                tt = tt.mul_mod(&tt, p);
                i += 1;
                debug_assert!(i < m, "fp_sqrt called on a non-residue");
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.mul_mod(&b, p);
            }
            m = i;
            c = b.mul_mod(&b, p);
            t = t.mul_mod(&c, p);
            r = r.mul_mod(&b, p);
        }
        r
    }
}

/// Constructors hang off the shared handle so elements can keep a reference.
pub trait FieldHandle<U: Residue> {
    fn zero(&self) -> Fp2<U>;
    fn one(&self) -> Fp2<U>;
    /// The generator `t` with `t^2 = n`.
    fn gen(&self) -> Fp2<U>;
    fn from_u64(&self, v: u64) -> Fp2<U>;
    fn from_i64(&self, v: i64) -> Fp2<U>;
    /// `num / den` as a field element.
    fn ratio(&self, num: i64, den: i64) -> Result<Fp2<U>, FieldError>;
    /// Builds `a + b*t` from already reduced coordinates.
    fn element(&self, a: U, b: U) -> Result<Fp2<U>, FieldError>;
    /// Inverse of [`Fp2::canonical_encode`].
    fn decode(&self, code: &BigUint) -> Result<Fp2<U>, FieldError>;
    fn from_bytes(&self, bytes: &[u8]) -> Result<Fp2<U>, FieldError>;
    /// Every element of `F_{p^2}` in canonical order. Intended for small `p`.
    fn elements(&self) -> Box<dyn Iterator<Item = Fp2<U>> + '_>;
}

impl<U: Residue> FieldHandle<U> for Arc<FieldContext<U>> {
    fn zero(&self) -> Fp2<U> {
        Fp2::raw(U::zero(), U::zero(), self.clone())
    }

    fn one(&self) -> Fp2<U> {
        Fp2::raw(U::one(), U::zero(), self.clone())
    }

    fn gen(&self) -> Fp2<U> {
        Fp2::raw(U::zero(), U::one(), self.clone())
    }

    fn from_u64(&self, v: u64) -> Fp2<U> {
        Fp2::raw(self.fp_reduce_u64(v), U::zero(), self.clone())
    }

    fn from_i64(&self, v: i64) -> Fp2<U> {
        let mag = self.fp_reduce_u64(v.unsigned_abs());
        let a = if v < 0 { self.fp_neg(&mag) } else { mag };
        Fp2::raw(a, U::zero(), self.clone())
    }

    fn ratio(&self, num: i64, den: i64) -> Result<Fp2<U>, FieldError> {
        self.from_i64(num).checked_div(&self.from_i64(den))
    }

    fn element(&self, a: U, b: U) -> Result<Fp2<U>, FieldError> {
        if a >= self.p || b >= self.p {
            return Err(FieldError::NotReduced);
        }
        Ok(Fp2::raw(a, b, self.clone()))
    }

    fn decode(&self, code: &BigUint) -> Result<Fp2<U>, FieldError> {
        let (b, a) = num_integer::Integer::div_rem(code, &self.p_big);
        if b >= self.p_big {
            return Err(FieldError::NotReduced);
        }
        let a = U::from_biguint(&a).ok_or(FieldError::NotReduced)?;
        let b = U::from_biguint(&b).ok_or(FieldError::NotReduced)?;
        self.element(a, b)
    }

    fn from_bytes(&self, bytes: &[u8]) -> Result<Fp2<U>, FieldError> {
        let w = self.byte_width;
        if bytes.len() != 2 * w {
            return Err(FieldError::BadEncodingLength { expected: 2 * w, got: bytes.len() });
        }
        let a = BigUint::from_bytes_le(&bytes[..w]);
        let b = BigUint::from_bytes_le(&bytes[w..]);
        let a = U::from_biguint(&a).ok_or(FieldError::NotReduced)?;
        let b = U::from_biguint(&b).ok_or(FieldError::NotReduced)?;
        self.element(a, b)
    }

    fn elements(&self) -> Box<dyn Iterator<Item = Fp2<U>> + '_> {
        let p = self.p_u64().expect("element enumeration needs a small prime");
        Box::new((0..p).flat_map(move |b| {
            (0..p).map(move |a| Fp2::raw(self.fp_reduce_u64(a), self.fp_reduce_u64(b), self.clone()))
        }))
    }
}

/// An element `a + b*t` of `F_{p^2}`.
#[derive(Clone)]
pub struct Fp2<U: Residue> {
    a: U,
    b: U,
    field: Arc<FieldContext<U>>,
}

impl<U: Residue> Fp2<U> {
    fn raw(a: U, b: U, field: Arc<FieldContext<U>>) -> Self {
        Self { a, b, field }
    }

    fn with(&self, a: U, b: U) -> Self {
        Self::raw(a, b, self.field.clone())
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        &self.field
    }

    /// Coordinate on `1`.
    pub fn a(&self) -> &U {
        &self.a
    }

    /// Coordinate on `t`.
    pub fn b(&self) -> &U {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    /// True when the element lies in the prime field.
    pub fn is_in_base_field(&self) -> bool {
        self.b.is_zero()
    }

    /// `a + p*b`; injective, and the order every root ordering uses.
    pub fn canonical_encode(&self) -> BigUint {
        self.a.to_biguint() + self.field.p_big() * self.b.to_biguint()
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Norm `a^2 - n b^2` down to `F_p`.
    pub fn norm(&self) -> U {
        let f = &self.field;
        let aa = f.fp_mul(&self.a, &self.a);
        let bb = f.fp_mul(&self.b, &self.b);
        f.fp_sub(&aa, &f.fp_mul(&f.n, &bb))
    }

    /// Conjugate `a - b*t`, which is also the Frobenius `x^p`.
    pub fn frobenius(&self) -> Self {
        self.with(self.a.clone(), self.field.fp_neg(&self.b))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        let f = &self.field;
        let ninv = f.fp_inv(&self.norm()).ok_or(FieldError::DivisionByZero)?;
        Ok(self.with(f.fp_mul(&self.a, &ninv), f.fp_mul(&f.fp_neg(&self.b), &ninv)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, exp: &BigUint) -> Self {
        let mut acc = self.field.one();
        for i in (0..exp.bits()).rev() {
            acc = acc.square();
            if exp.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    pub fn pow_u64(&self, exp: u64) -> Self {
        self.pow(&BigUint::from(exp))
    }

    /// Zero and the nonzero elements of square norm.
    pub fn is_square(&self) -> bool {
        self.is_zero() || self.field.fp_is_square(&self.norm())
    }

    /// Square root with the smaller canonical encoding, or `None` for
    /// non-squares.
    pub fn sqrt(&self) -> Option<Self> {
        let f = &self.field;
        if self.is_zero() {
            return Some(self.clone());
        }
        let root = if self.b.is_zero() {
            if f.fp_is_square(&self.a) {
                self.with(f.fp_sqrt(&self.a), U::zero())
            } else {
                // a / n is a square; sqrt(a) = sqrt(a/n) * t
                let a_over_n = f.fp_mul(&self.a, &f.fp_inv(&f.n).expect("n != 0"));
                self.with(U::zero(), f.fp_sqrt(&a_over_n))
            }
        } else {
            let norm = self.norm();
            if !f.fp_is_square(&norm) {
                return None;
            }
            let c = f.fp_sqrt(&norm);
            // exactly one of (a +- c)/2 is a square, and neither is zero
            let mut alpha = f.fp_mul(&f.fp_add(&self.a, &c), &f.inv_two);
            if !f.fp_is_square(&alpha) {
                alpha = f.fp_mul(&f.fp_sub(&self.a, &c), &f.inv_two);
            }
            let s = f.fp_sqrt(&alpha);
            let two_s_inv = f.fp_inv(&f.fp_add(&s, &s)).expect("alpha != 0");
            self.with(s, f.fp_mul(&self.b, &two_s_inv))
        };
        debug_assert!(root.square() == *self);
        let neg = -&root;
        Some(if neg < root { neg } else { root })
    }

    /// `a` then `b`, each little-endian in [`FieldContext::byte_width`] bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let w = self.field.byte_width;
        let mut out = Vec::with_capacity(2 * w);
        for coord in [&self.a, &self.b] {
            let mut bytes = coord.to_biguint().to_bytes_le();
            bytes.resize(w, 0);
            out.extend_from_slice(&bytes);
        }
        out
    }
}

impl<U: Residue> PartialEq for Fp2<U> {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(Arc::ptr_eq(&self.field, &other.field) || self.field.p == other.field.p);
        self.a == other.a && self.b == other.b
    }
}

impl<U: Residue> Eq for Fp2<U> {}

impl<U: Residue> Hash for Fp2<U> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

impl<U: Residue> Ord for Fp2<U> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.b.cmp(&other.b).then_with(|| self.a.cmp(&other.a))
    }
}

impl<U: Residue> PartialOrd for Fp2<U> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<U: Residue> fmt::Debug for Fp2<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<U: Residue> fmt::Display for Fp2<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*t", self.b)
        } else {
            write!(f, "{}+{}*t", self.a, self.b)
        }
    }
}

impl<'a, U: Residue> Add<&'a Fp2<U>> for &'a Fp2<U> {
    type Output = Fp2<U>;
    fn add(self, rhs: &'a Fp2<U>) -> Fp2<U> {
        let f = &self.field;
        self.with(f.fp_add(&self.a, &rhs.a), f.fp_add(&self.b, &rhs.b))
    }
}

impl<'a, U: Residue> Sub<&'a Fp2<U>> for &'a Fp2<U> {
    type Output = Fp2<U>;
    fn sub(self, rhs: &'a Fp2<U>) -> Fp2<U> {
        let f = &self.field;
        self.with(f.fp_sub(&self.a, &rhs.a), f.fp_sub(&self.b, &rhs.b))
    }
}

impl<'a, U: Residue> Mul<&'a Fp2<U>> for &'a Fp2<U> {
    type Output = Fp2<U>;
    fn mul(self, rhs: &'a Fp2<U>) -> Fp2<U> {
        let f = &self.field;
        let aa = f.fp_mul(&self.a, &rhs.a);
        let bb = f.fp_mul(&self.b, &rhs.b);
        let ab = f.fp_mul(&self.a, &rhs.b);
        let ba = f.fp_mul(&self.b, &rhs.a);
        self.with(f.fp_add(&aa, &f.fp_mul(&f.n, &bb)), f.fp_add(&ab, &ba))
    }
}

impl<U: Residue> Neg for &Fp2<U> {
    type Output = Fp2<U>;
    fn neg(self) -> Fp2<U> {
        let f = &self.field;
        self.with(f.fp_neg(&self.a), f.fp_neg(&self.b))
    }
}

impl<U: Residue> Neg for Fp2<U> {
    type Output = Fp2<U>;
    fn neg(self) -> Fp2<U> {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident, $tr_assign:ident, $method_assign:ident) => {
        impl<U: Residue> $tr<Fp2<U>> for Fp2<U> {
            type Output = Fp2<U>;
            fn $method(self, rhs: Fp2<U>) -> Fp2<U> {
                (&self).$method(&rhs)
            }
        }
        impl<'a, U: Residue> $tr<&'a Fp2<U>> for Fp2<U> {
            type Output = Fp2<U>;
            fn $method(self, rhs: &'a Fp2<U>) -> Fp2<U> {
                (&self).$method(rhs)
            }
        }
        impl<'a, U: Residue> $tr<Fp2<U>> for &'a Fp2<U> {
            type Output = Fp2<U>;
            fn $method(self, rhs: Fp2<U>) -> Fp2<U> {
                self.$method(&rhs)
            }
        }
        impl<'a, U: Residue> $tr_assign<&'a Fp2<U>> for Fp2<U> {
            fn $method_assign(&mut self, rhs: &'a Fp2<U>) {
                *self = (&*self).$method(rhs);
            }
        }
        impl<U: Residue> $tr_assign<Fp2<U>> for Fp2<U> {
            fn $method_assign(&mut self, rhs: Fp2<U>) {
                *self = (&*self).$method(&rhs);
            }
        }
    };
}

forward_owned_binop!(Add, add, AddAssign, add_assign);
forward_owned_binop!(Sub, sub, SubAssign, sub_assign);
forward_owned_binop!(Mul, mul, MulAssign, mul_assign);
