//! Isomorphism invariants of genus-2 and elliptic curves.
//!
//! Genus-2 invariants are computed from the binary sextic form
//! `F(x, z) = z^6 f(x/z)` through Clebsch transvectants, so quintic models need
//! no special handling: a missing top coefficient is just a root at infinity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldContext, FieldError, FieldHandle, Fp2, Residue};
use crate::poly::{LinearFactor, Poly, PolyError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InvariantError {
    #[error("singular curve (discriminant zero)")]
    Singular,
    #[error("invariants are not defined in characteristic {0}")]
    UnsupportedCharacteristic(BigUint),
    #[error("model must have degree 5 or 6, got {0:?}")]
    BadDegree(Option<usize>),
    #[error("elliptic roots are not pairwise distinct")]
    RepeatedRoots,
    #[error("curve is not defined over F_p")]
    NotOverPrimeField,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// `y^2 = f(x)` with `f` squarefree of degree 5 or 6.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Genus2Curve<U: Residue> {
    f: Poly<U>,
}

impl<U: Residue> Genus2Curve<U> {
    pub fn new(f: Poly<U>) -> Result<Self, InvariantError> {
        match f.degree() {
            Some(5) | Some(6) => {}
            d => return Err(InvariantError::BadDegree(d)),
        }
        if f.gcd(&f.derivative()).degree() != Some(0) {
            return Err(InvariantError::Singular);
        }
        Ok(Self { f })
    }

    /// `y^2 = prod L_j`.
    pub fn from_factors(factors: &[LinearFactor<U>], field: &Arc<FieldContext<U>>) -> Result<Self, InvariantError> {
        let f = factors.iter().fold(Poly::one(field), |acc, l| acc.mul(&l.to_poly(field)));
        Self::new(f)
    }

    pub fn f(&self) -> &Poly<U> {
        &self.f
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        self.f.field()
    }

    /// The sextic binary form, coefficient `i` on `x^i z^{6-i}`.
    fn sextic(&self) -> BinaryForm<U> {
        BinaryForm { coeffs: (0..=6).map(|i| self.f.coeff(i)).collect() }
    }

    /// The model `u * (c x + d)^6 f((a x + b)/(c x + d))`.
    ///
    /// Isomorphic over the algebraic closure to `self` whenever `ad - bc != 0`
    /// and `u != 0`. The result may be a quintic.
    pub fn transform(&self, m: [&Fp2<U>; 4], u: &Fp2<U>) -> Result<Self, InvariantError> {
        let [a, b, c, d] = m;
        let field = self.field();
        let num = Poly::new(field, vec![b.clone(), a.clone()]);
        let den = Poly::new(field, vec![d.clone(), c.clone()]);
        let mut out = Poly::zero(field);
        for i in 0..=6 {
            let ci = self.f.coeff(i);
            if ci.is_zero() {
                continue;
            }
            let mut term = Poly::constant(ci);
            for _ in 0..i {
                term = term.mul(&num);
            }
            for _ in i..6 {
                term = term.mul(&den);
            }
            out = out.add(&term);
        }
        Self::new(out.scale(u))
    }

    /// Igusa-Clebsch invariants `(I2, I4, I6, I10)`.
    pub fn igusa_clebsch(&self) -> Result<[Fp2<U>; 4], InvariantError> {
        check_characteristic(self.field())?;
        let f = self.sextic();
        let i = f.transvectant(&f, 4);
        let delta = i.transvectant(&i, 2);
        let y1 = f.transvectant(&i, 4);
        let y2 = i.transvectant(&y1, 2);
        let y3 = i.transvectant(&y2, 2);
        let a = f.transvectant(&f, 6).scalar();
        let b = i.transvectant(&i, 4).scalar();
        let c = i.transvectant(&delta, 4).scalar();
        let d = y3.transvectant(&y1, 2).scalar();

        let fld = self.field();
        let k = |v: i64| fld.from_i64(v);
        let a2 = a.square();
        let a3 = &a2 * &a;
        let i2 = &k(-120) * &a;
        let i4 = &k(-720) * &a2 + &k(6750) * &b;
        let i6 = &k(8640) * &a3 - &k(108000) * &(&a * &b) + &k(202500) * &c;
        let i10 = &k(-62208) * &(&a3 * &a2) + &k(972000) * &(&a3 * &b) + &k(1620000) * &(&a2 * &c)
            - &k(3037500) * &(&a * &b.square())
            - &k(6075000) * &(&b * &c)
            - &k(4556250) * &d;
        if i10.is_zero() {
            return Err(InvariantError::Singular);
        }
        Ok([i2, i4, i6, i10])
    }

    /// Igusa invariants `(J2, J4, J6, J10)`.
    pub fn igusa(&self) -> Result<[Fp2<U>; 4], InvariantError> {
        let [i2, i4, i6, i10] = self.igusa_clebsch()?;
        let fld = self.field();
        let k = |v: i64| fld.from_i64(v);
        let j2 = i2.checked_div(&k(8))?;
        let j4 = (&k(4) * &j2.square() - &i4).checked_div(&k(96))?;
        let j6 = (&k(8) * &j2.pow_u64(3) - &k(160) * &(&j2 * &j4) - &i6).checked_div(&k(576))?;
        let j10 = i10.checked_div(&k(4096))?;
        Ok([j2, j4, j6, j10])
    }

    /// Cardona-Quer absolute invariants.
    ///
    /// * `J2 != 0`: `(J2^5/J10, J2^3 J4/J10, J2^2 J6/J10)`
    /// * `J2 = 0, J4 != 0`: `(0, J4^5/J10^2, J4 J6/J10)`
    /// * `J2 = J4 = 0`: `(0, 0, J6^5/J10^3)`
    pub fn cardona_quer(&self) -> Result<InvariantTriple<U>, InvariantError> {
        let [j2, j4, j6, j10] = self.igusa()?;
        let zero = self.field().zero();
        let triple = if !j2.is_zero() {
            [
                j2.pow_u64(5).checked_div(&j10)?,
                (&j2.pow_u64(3) * &j4).checked_div(&j10)?,
                (&j2.square() * &j6).checked_div(&j10)?,
            ]
        } else if !j4.is_zero() {
            [zero, j4.pow_u64(5).checked_div(&j10.square())?, (&j4 * &j6).checked_div(&j10)?]
        } else {
            [zero.clone(), zero, j6.pow_u64(5).checked_div(&j10.pow_u64(3))?]
        };
        Ok(InvariantTriple(triple))
    }

    /// Cartier-Manin test: the coefficients of `x^{p-1}, x^{p-2}, x^{2p-1},
    /// x^{2p-2}` in `f^{(p-1)/2}` all vanish.
    ///
    /// Only meaningful for models with coefficients in `F_p`; cost grows
    /// linearly with `p`.
    pub fn is_superspecial(&self) -> Result<bool, InvariantError> {
        if !self.f.coeffs().iter().all(Fp2::is_in_base_field) {
            return Err(InvariantError::NotOverPrimeField);
        }
        let p = self.field().p_u64().ok_or_else(|| {
            InvariantError::UnsupportedCharacteristic(self.field().p_big().clone())
        })? as usize;
        let mut e = (p - 1) / 2;
        let mut base = self.f.clone();
        let mut acc = Poly::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok([p - 1, p - 2, 2 * p - 1, 2 * p - 2].iter().all(|&k| acc.coeff(k).is_zero()))
    }
}

/// Shorthand for [`Genus2Curve::cardona_quer`] on a factored model.
pub fn cardona_quer_of<U: Residue>(
    factors: &[LinearFactor<U>],
    field: &Arc<FieldContext<U>>,
) -> Result<InvariantTriple<U>, InvariantError> {
    Genus2Curve::from_factors(factors, field)?.cardona_quer()
}

/// True for `y^2 = f(x)` when `f` has `F_p` coefficients and zero Cartier-Manin
/// matrix.
pub fn is_superspecial_g2<U: Residue>(c: &Genus2Curve<U>) -> Result<bool, InvariantError> {
    c.is_superspecial()
}

fn check_characteristic<U: Residue>(field: &FieldContext<U>) -> Result<(), InvariantError> {
    if field.p_big() <= &BigUint::from(5u32) {
        return Err(InvariantError::UnsupportedCharacteristic(field.p_big().clone()));
    }
    Ok(())
}

/// `(j1, j2, j3)`; equal triples mean isomorphic curves.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantTriple<U: Residue>(pub [Fp2<U>; 3]);

impl<U: Residue> InvariantTriple<U> {
    /// The three coordinate serializations concatenated.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(Fp2::to_bytes).collect()
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_bytes(field: &Arc<FieldContext<U>>, bytes: &[u8]) -> Result<Self, FieldError> {
        let w = 2 * field.byte_width();
        if bytes.len() != 3 * w {
            return Err(FieldError::BadEncodingLength { expected: 3 * w, got: bytes.len() });
        }
        Ok(Self([
            field.from_bytes(&bytes[..w])?,
            field.from_bytes(&bytes[w..2 * w])?,
            field.from_bytes(&bytes[2 * w..])?,
        ]))
    }
}

impl<U: Residue> fmt::Debug for InvariantTriple<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl<U: Residue> fmt::Display for InvariantTriple<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Canonical text form of a triple, used by graph export.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleCodes(pub [String; 3]);

impl<U: Residue> From<&InvariantTriple<U>> for TripleCodes {
    fn from(t: &InvariantTriple<U>) -> Self {
        TripleCodes([0, 1, 2].map(|i| t.0[i].canonical_encode().to_string()))
    }
}

/// `y^2 = (x - a1)(x - a2)(x - a3)` with distinct roots, in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EllipticRootsForm<U: Residue> {
    roots: [Fp2<U>; 3],
}

impl<U: Residue> EllipticRootsForm<U> {
    pub fn new(roots: [Fp2<U>; 3]) -> Result<Self, InvariantError> {
        if roots[0] == roots[1] || roots[0] == roots[2] || roots[1] == roots[2] {
            return Err(InvariantError::RepeatedRoots);
        }
        Ok(Self { roots })
    }

    pub fn roots(&self) -> &[Fp2<U>; 3] {
        &self.roots
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        self.roots[0].field()
    }

    /// `256 (e1^2 + e2^2 + e3^2 - e1 e2 - e1 e3 - e2 e3)^3 / ((e1-e2)(e1-e3)(e2-e3))^2`.
    pub fn j_invariant(&self) -> Fp2<U> {
        let [a, b, c] = &self.roots;
        let num = &(&(&a.square() + &b.square()) + &c.square()) - &(&(&(a * b) + &(a * c)) + &(b * c));
        let den = &(&(a - b) * &(a - c)) * &(b - c);
        let f = self.field();
        (&f.from_u64(256) * &num.pow_u64(3))
            .checked_div(&den.square())
            .expect("roots are distinct")
    }
}

/// All supersingular j-invariants in characteristic `p`, sorted.
pub fn enumerate_ss_j<U: Residue>(field: &Arc<FieldContext<U>>) -> Result<BTreeSet<Fp2<U>>, InvariantError> {
    Ok(supersingular_models(field)?.keys().cloned().collect())
}

/// One Legendre model `(0, 1, l)` per supersingular j-invariant, keyed by j.
///
/// The `l` are the roots of the Deuring polynomial
/// `H(l) = sum_i C(m, i)^2 l^i`, `m = (p - 1)/2`; the smallest root wins.
pub fn supersingular_models<U: Residue>(
    field: &Arc<FieldContext<U>>,
) -> Result<BTreeMap<Fp2<U>, EllipticRootsForm<U>>, InvariantError> {
    let m = field
        .p_big()
        .to_u64()
        .ok_or_else(|| InvariantError::UnsupportedCharacteristic(field.p_big().clone()))?
        / 2;
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    let mut binom = field.one();
    for i in 0..=m {
        coeffs.push(binom.square());
        if i < m {
            binom = (&binom * &field.from_u64(m - i)).checked_div(&field.from_u64(i + 1))?;
        }
    }
    let h = Poly::new(field, coeffs);
    let mut out = BTreeMap::new();
    for l in h.roots()? {
        let e = EllipticRootsForm::new([field.zero(), field.one(), l])?;
        out.entry(e.j_invariant()).or_insert(e);
    }
    Ok(out)
}

/// Binary form of degree `len - 1`; coefficient `i` on `x^i z^{d-i}`.
#[derive(Clone, Debug)]
struct BinaryForm<U: Residue> {
    coeffs: Vec<Fp2<U>>,
}

fn falling(n: usize, k: usize) -> u64 {
    if k > n {
        0
    } else {
        ((n - k + 1)..=n).map(|v| v as u64).product()
    }
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn binomial(n: usize, k: usize) -> u64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

impl<U: Residue> BinaryForm<U> {
    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn field(&self) -> &Arc<FieldContext<U>> {
        self.coeffs[0].field()
    }

    fn scalar(&self) -> Fp2<U> {
        debug_assert_eq!(self.degree(), 0);
        self.coeffs[0].clone()
    }

    /// `d^k F / dx^a dz^(k-a)`.
    fn partial(&self, ax: usize, az: usize) -> Vec<Fp2<U>> {
        let d = self.degree();
        let out_deg = d - ax - az;
        let fld = self.field();
        (0..=out_deg)
            .map(|i| {
                let src = i + ax;
                let mult = falling(src, ax) * falling(d - src, az);
                &self.coeffs[src] * &fld.from_u64(mult)
            })
            .collect()
    }

    /// Clebsch transvectant `(F, G)_k`.
    fn transvectant(&self, g: &Self, k: usize) -> Self {
        let (n, m) = (self.degree(), g.degree());
        let fld = self.field().clone();
        let mut out = vec![fld.zero(); n + m - 2 * k + 1];
        for j in 0..=k {
            let df = self.partial(k - j, j);
            let dg = g.partial(j, k - j);
            let mut c = fld.from_u64(binomial(k, j));
            if j % 2 == 1 {
                c = -c;
            }
            for (a, fa) in df.iter().enumerate() {
                if fa.is_zero() {
                    continue;
                }
                let fac = fa * &c;
                for (b, gb) in dg.iter().enumerate() {
                    out[a + b] += &fac * gb;
                }
            }
        }
        let num = fld.from_u64(factorial(n - k) * factorial(m - k));
        let den = fld.from_u64(factorial(n) * factorial(m));
        let scale = num.checked_div(&den).expect("p > 5");
        Self { coeffs: out.iter().map(|c| c * &scale).collect() }
    }
}
