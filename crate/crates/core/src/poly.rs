//! Dense univariate polynomials over `F_{p^2}`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::field::{FieldContext, FieldError, FieldHandle, Fp2, Residue};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("degenerate splitting: factor has degree {0:?}")]
    Degenerate(Option<usize>),
    #[error("quadratic does not split over F_p^2 (input is not superspecial)")]
    Irreducible,
    #[error("expected degree {expected}, got {got:?}")]
    WrongDegree { expected: usize, got: Option<usize> },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Coefficients lowest degree first, no trailing zeros.
#[derive(Clone)]
pub struct Poly<U: Residue> {
    coeffs: Vec<Fp2<U>>,
    field: Arc<FieldContext<U>>,
}

impl<U: Residue> PartialEq for Poly<U> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<U: Residue> Eq for Poly<U> {}

impl<U: Residue> std::hash::Hash for Poly<U> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<U: Residue> Poly<U> {
    pub fn new(field: &Arc<FieldContext<U>>, mut coeffs: Vec<Fp2<U>>) -> Self {
        while coeffs.last().is_some_and(Fp2::is_zero) {
            coeffs.pop();
        }
        Self { coeffs, field: field.clone() }
    }

    pub fn zero(field: &Arc<FieldContext<U>>) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Arc<FieldContext<U>>) -> Self {
        Self::constant(field.one())
    }

    pub fn constant(c: Fp2<U>) -> Self {
        let field = c.field().clone();
        Self::new(&field, vec![c])
    }

    /// `x`.
    pub fn x(field: &Arc<FieldContext<U>>) -> Self {
        Self::new(field, vec![field.zero(), field.one()])
    }

    /// `x - r`.
    pub fn linear(r: &Fp2<U>) -> Self {
        Self::new(r.field(), vec![-r, r.field().one()])
    }

    /// Small integer coefficients, lowest degree first.
    pub fn from_i64s(field: &Arc<FieldContext<U>>, cs: &[i64]) -> Self {
        Self::new(field, cs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fp2<U>] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Fp2<U> {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Fp2<U> {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new(&self.field, (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(&self.field, out)
    }

    pub fn scale(&self, c: &Fp2<U>) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * &self.field.from_u64(i as u64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Fp2<U>) -> Fp2<U> {
        self.coeffs.iter().rev().fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn monic(&self) -> Result<Self, PolyError> {
        Ok(self.scale(&self.leading().inv()?))
    }

    pub fn divrem(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        let dd = d.degree().ok_or(FieldError::DivisionByZero)?;
        let lead_inv = d.leading().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(&self.field), self.clone()));
        }
        let mut quot = vec![self.field.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(&self.field, quot), Self::new(&self.field, rem)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, PolyError> {
        Ok(self.divrem(d)?.1)
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, rhs: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), rhs.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic().expect("a is nonzero")
        }
    }

    /// `self^e mod m`.
    pub fn powmod(&self, e: &BigUint, m: &Self) -> Result<Self, PolyError> {
        let base = self.rem(m)?;
        let mut acc = Self::one(&self.field).rem(m)?;
        for i in (0..e.bits()).rev() {
            acc = acc.mul(&acc).rem(m)?;
            if e.bit(i) {
                acc = acc.mul(&base).rem(m)?;
            }
        }
        Ok(acc)
    }

    /// Distinct roots in `F_{p^2}`, sorted by canonical encoding.
    ///
    /// Splits `gcd(f, x^{p^2} - x)` by Cantor-Zassenhaus with a fixed sequence
    /// of shifts, so the output does not depend on any randomness.
    pub fn roots(&self) -> Result<Vec<Fp2<U>>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Degenerate(None));
        }
        let f = self.monic()?;
        let q = self.field.p_big() * self.field.p_big();
        let x = Self::x(&self.field);
        let frob = x.powmod(&q, &f)?;
        let g = f.gcd(&frob.sub(&x));
        let mut out = Vec::new();
        let half = (&q - 1u32) / 2u32;
        let mut shift_code = self.field.p_big().clone();
        let mut stack = vec![g];
        while let Some(h) = stack.pop() {
            match h.degree() {
                Some(0) | None => continue,
                Some(1) => {
                    out.push(-&h.coeff(0));
                    continue;
                }
                _ => {}
            }
            loop {
                let a = self.field.decode(&shift_code)?;
                shift_code += 1u32;
                let shifted = Self::new(&self.field, vec![a, self.field.one()]);
                let w = shifted.powmod(&half, &h)?.sub(&Self::one(&self.field));
                let d = h.gcd(&w);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && Some(dd) < h.degree() {
                    let (other, _) = h.divrem(&d)?;
                    stack.push(d);
                    stack.push(other.monic()?);
                    break;
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

impl<U: Residue> fmt::Debug for Poly<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<U: Residue> fmt::Display for Poly<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A monic linear factor `x - r`, or the constant `1` standing in for a root
/// at infinity. Roots order canonically and come before `One`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinearFactor<U: Residue> {
    Root(Fp2<U>),
    One,
}

impl<U: Residue> LinearFactor<U> {
    pub fn to_poly(&self, field: &Arc<FieldContext<U>>) -> Poly<U> {
        match self {
            LinearFactor::Root(r) => Poly::linear(r),
            LinearFactor::One => Poly::one(field),
        }
    }

    pub fn root(&self) -> Option<&Fp2<U>> {
        match self {
            LinearFactor::Root(r) => Some(r),
            LinearFactor::One => None,
        }
    }
}

/// Splits a polynomial of degree 1 or 2 into monic linear factors.
///
/// Quadratic roots come out ordered by canonical encoding; a linear input
/// yields `(x - r, 1)`. The leading coefficient is dropped.
pub fn factor_deg_le2<U: Residue>(h: &Poly<U>) -> Result<(LinearFactor<U>, LinearFactor<U>), PolyError> {
    match h.degree() {
        Some(1) => {
            let r = -&h.coeff(0).checked_div(&h.coeff(1))?;
            Ok((LinearFactor::Root(r), LinearFactor::One))
        }
        Some(2) => {
            let (b, a) = (h.coeff(1), h.coeff(2));
            let s = disc2(h)?.sqrt().ok_or(PolyError::Irreducible)?;
            let two_a_inv = (&a + &a).inv()?;
            let r1 = &(&s - &b) * &two_a_inv;
            let r2 = &(-&s - &b) * &two_a_inv;
            debug_assert!(h.eval(&r1).is_zero());
            let (r1, r2) = if r2 < r1 { (r2, r1) } else { (r1, r2) };
            Ok((LinearFactor::Root(r1), LinearFactor::Root(r2)))
        }
        d => Err(PolyError::Degenerate(d)),
    }
}

/// `b^2 - 4ac` of a quadratic.
pub fn disc2<U: Residue>(h: &Poly<U>) -> Result<Fp2<U>, PolyError> {
    if h.degree() != Some(2) {
        return Err(PolyError::WrongDegree { expected: 2, got: h.degree() });
    }
    let four = h.field().from_u64(4);
    Ok(h.coeff(1).square() - &four * &(&h.coeff(2) * &h.coeff(0)))
}

/// Discriminant of the monic cubic with the given roots, `prod (r_i - r_j)^2`.
pub fn disc3<U: Residue>(roots: &[Fp2<U>; 3]) -> Fp2<U> {
    let d = &(&(&roots[0] - &roots[1]) * &(&roots[0] - &roots[2])) * &(&roots[1] - &roots[2]);
    d.square()
}
