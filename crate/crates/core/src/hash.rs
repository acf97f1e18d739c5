//! The genus-2 hash: a non-backtracking walk of Richelot steps from a fixed
//! superspecial curve, one step per octal digit of the (padded) message.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{is_probable_prime, FieldContext, FieldError, FieldHandle, Residue};
use crate::invariants::{cardona_quer_of, InvariantError, InvariantTriple};
use crate::richelot::{richelot_step_with, FactorList, RichelotError, StepOutcome, StepStats};

/// The message integer is multiplied by `2^PADDING_BITS` (ten zero digits).
pub const PADDING_BITS: u32 = 30;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HashError {
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("digit {0} out of range 0..8")]
    BadDigit(u8),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Richelot(#[from] RichelotError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Smallest prime `p > 2^ceil(2 lambda / 3)` with `p = 5 mod 6`.
pub fn prime_for_security(lambda: u32) -> BigUint {
    let bits = (2 * lambda).div_ceil(3);
    let mut p = (BigUint::from(1u32) << bits) + 1u32;
    let six = BigUint::from(6u32);
    // step to the next value that is 5 mod 6
    while (&p % &six) != BigUint::from(5u32) {
        p += 1u32;
    }
    while !is_probable_prime(&p) {
        p += &six;
    }
    p
}

/// Digits of `m * 2^30` in base 8, least significant first. Zero gives no
/// digits at all.
pub fn integer_digits(m: &BigUint) -> Vec<u8> {
    let mut m = m << PADDING_BITS;
    let mut out = Vec::new();
    let eight = BigUint::from(8u32);
    while !m.is_zero() {
        let (q, r) = m.div_rem(&eight);
        out.push(r.to_u8().expect("r < 8"));
        m = q;
    }
    out
}

/// Digits fed to the walk for a byte string: a `0x01` byte is prepended so
/// that leading zero bytes change the result.
pub fn message_digits(msg: &[u8]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(msg.len() + 1);
    bytes.push(1u8);
    bytes.extend_from_slice(msg);
    integer_digits(&BigUint::from_bytes_be(&bytes))
}

/// Canonical bytes of the final invariant triple.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digest(Vec<u8>);

impl Digest {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Either a value or the walk reaching a product of elliptic curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Value(T),
    /// The step with this 0-based index had `delta = 0`.
    Bottom { step: usize },
}

impl<T> Outcome<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Outcome::Value(v) => Some(v),
            Outcome::Bottom { .. } => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Outcome::Bottom { .. })
    }

    pub fn map<V>(self, f: impl FnOnce(T) -> V) -> Outcome<V> {
        match self {
            Outcome::Value(v) => Outcome::Value(f(v)),
            Outcome::Bottom { step } => Outcome::Bottom { step },
        }
    }
}

/// Every factor list visited by a walk, starting with the initial one.
#[derive(Clone, Debug)]
pub struct Trace<U: Residue> {
    pub lists: Vec<FactorList<U>>,
    pub bottom_at: Option<usize>,
    pub sqrt_calls: u64,
}

/// Parameters of the hash: the field and the starting curve with its
/// initial splitting `(L1 L2, L3 L4, L5 L6)`.
#[derive(Clone, Debug)]
pub struct HashContext<U: Residue> {
    lambda: u32,
    field: Arc<FieldContext<U>>,
    start: FactorList<U>,
}

impl<U: Residue> HashContext<U> {
    /// Context for `lambda` bits of classical security.
    pub fn for_security(lambda: u32) -> Result<Self, HashError> {
        if lambda < 8 {
            return Err(HashError::Parameters(format!("security parameter {lambda} is below 8")));
        }
        let p = prime_for_security(lambda);
        let p = U::from_biguint(&p)
            .filter(|_| U::supports_modulus(&p))
            .ok_or_else(|| HashError::Parameters(format!("prime {p} is too large for this backend")))?;
        let mut ctx = Self::with_prime(p)?;
        ctx.lambda = lambda;
        Ok(ctx)
    }

    /// Context for an explicit prime `p = 5 mod 6`, ignoring the size rule.
    pub fn with_prime(p: U) -> Result<Self, HashError> {
        let pb = p.to_biguint();
        if &pb % 6u32 != BigUint::from(5u32) || pb <= BigUint::from(5u32) {
            return Err(HashError::Parameters(format!("p = {pb} must be a prime > 5 with p = 5 mod 6")));
        }
        let field = FieldContext::new(p)?;
        let start = c0_start(&field)?;
        Ok(Self { lambda: 0, field, start })
    }

    /// Context with a caller-chosen starting list; no congruence condition.
    pub fn with_start(field: Arc<FieldContext<U>>, start: FactorList<U>) -> Self {
        Self { lambda: 0, field, start }
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        &self.field
    }

    pub fn start(&self) -> &FactorList<U> {
        &self.start
    }

    /// Zero unless built by [`HashContext::for_security`].
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    /// `p=<p> n=<n> lambda=<lambda>`.
    pub fn descriptor(&self) -> String {
        format!("p={} n={} lambda={}", self.field.p(), self.field.non_residue(), self.lambda)
    }

    /// Byte length of a digest.
    pub fn digest_len(&self) -> usize {
        6 * self.field.byte_width()
    }

    /// Runs the walk and records every intermediate factor list.
    pub fn trace(&self, digits: &[u8], parallel: bool) -> Result<Trace<U>, HashError> {
        let mut lists = vec![self.start.clone()];
        let mut sqrt_calls = 0u64;
        for (k, &d) in digits.iter().enumerate() {
            if d > 7 {
                return Err(HashError::BadDigit(d));
            }
            let (out, StepStats { sqrt_calls: s }) = richelot_step_with(lists.last().expect("nonempty"), d, parallel)?;
            sqrt_calls += u64::from(s);
            match out {
                StepOutcome::Jacobian(next) => lists.push(next),
                StepOutcome::Split => return Ok(Trace { lists, bottom_at: Some(k), sqrt_calls }),
            }
        }
        Ok(Trace { lists, bottom_at: None, sqrt_calls })
    }

    /// Walks the digits (used as given, no padding) and returns the invariants
    /// of the final curve.
    pub fn hash_digits(&self, digits: &[u8]) -> Result<Outcome<InvariantTriple<U>>, HashError> {
        self.hash_digits_with(digits, false)
    }

    pub fn hash_digits_with(&self, digits: &[u8], parallel: bool) -> Result<Outcome<InvariantTriple<U>>, HashError> {
        let t = self.trace(digits, parallel)?;
        if let Some(step) = t.bottom_at {
            return Ok(Outcome::Bottom { step });
        }
        let last = t.lists.last().expect("nonempty");
        Ok(Outcome::Value(cardona_quer_of(last.factors(), &self.field)?))
    }

    /// Hash of a natural number as in the reference loop: `m * 2^30` in octal.
    pub fn hash_integer(&self, m: &BigUint) -> Result<Outcome<InvariantTriple<U>>, HashError> {
        self.hash_digits(&integer_digits(m))
    }

    pub fn hash_bytes(&self, msg: &[u8]) -> Result<Outcome<Digest>, HashError> {
        self.hash_bytes_with(msg, false)
    }

    pub fn hash_bytes_with(&self, msg: &[u8], parallel: bool) -> Result<Outcome<Digest>, HashError> {
        Ok(self
            .hash_digits_with(&message_digits(msg), parallel)?
            .map(|t| Digest(t.to_bytes())))
    }
}

/// `y^2 = x (x-1)(x+1)(x-2)(x-1/2)` as `(x-1, x+1, x, x-2, x-1/2, 1)`.
pub fn c0_start<U: Residue>(field: &Arc<FieldContext<U>>) -> Result<FactorList<U>, HashError> {
    Ok(FactorList::from_roots([
        Some(field.from_i64(1)),
        Some(field.from_i64(-1)),
        Some(field.zero()),
        Some(field.from_i64(2)),
        Some(field.ratio(1, 2)?),
        None,
    ])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn security_primes() {
        let p = prime_for_security(128);
        assert!(p > BigUint::from(1u32) << 86u32);
        assert_eq!(&p % 6u32, BigUint::from(5u32));
        assert!(p < (BigUint::from(1u32) << 86u32) + 1000u32);
        assert_eq!(prime_for_security(256).bits(), 172);
        assert_eq!(prime_for_security(8), BigUint::from(71u32));
    }

    #[test]
    fn digits_of_small_integers() {
        assert!(integer_digits(&BigUint::zero()).is_empty());
        let d = integer_digits(&BigUint::from(5u32));
        assert_eq!(d, [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 5]);
        // 0x01 0x00: 256 * 2^30 = 2^38, octal 1 followed by 12 zeros + 2 = digit 4 at position 12
        let d = message_digits(&[0]);
        assert_eq!(d.len(), 13);
        assert_eq!(d[12], 4);
        assert_ne!(message_digits(&[0]), message_digits(&[0, 0]));
    }

    #[test]
    fn explicit_prime_rules() {
        assert!(HashContext::with_prime(11u64).is_ok());
        assert!(HashContext::with_prime(13u64).is_err());
        assert!(HashContext::with_prime(35u64).is_err());
        assert!(HashContext::<u64>::for_security(4).is_err());
        assert!(HashContext::<u64>::for_security(128).is_err());
        assert_eq!(HashContext::with_prime(11u64).unwrap().descriptor(), "p=11 n=2 lambda=0");
    }

    #[test]
    fn empty_walk_is_c0() {
        let ctx = HashContext::with_prime(1019u64).unwrap();
        let t = ctx.hash_digits(&[]).unwrap().value().unwrap();
        assert_eq!(t, cardona_quer_of(ctx.start().factors(), ctx.field()).unwrap());
    }
}
