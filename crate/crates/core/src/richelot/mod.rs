//! Richelot isogenies and their degenerate cases.
//!
//! A jacobian is carried around as a [`FactorList`]: six monic linear factors
//! (one of which may be the constant `1`, i.e. a Weierstrass point at
//! infinity). A kernel is a [`QuadraticSplitting`], a pairing of those six
//! factors into three quadratics.

mod extension;
mod product;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldContext, FieldError, Fp2, Residue};
use crate::invariants::InvariantError;
use crate::poly::{factor_deg_le2, LinearFactor, Poly, PolyError};

pub use extension::{classify_extension, product_kernels, ExtensionClass, Kernel, PairPartition, PERMUTATIONS};
pub use product::{
    glue_product, product_step, split_codomain, two_isogeny, GlueOutcome, GluingConstants, GluingData,
    SplitCodomain,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RichelotError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(&'static str),
    #[error("digit {0} out of range 0..8")]
    BadDigit(u8),
    #[error("kernels live on different vertex types")]
    MismatchedKernels,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Index patterns selecting the quadratics `L_a L_b` for each digit.
///
/// No pattern pairs slots `{0,1}`, `{2,3}` or `{4,5}`: those are the factors of
/// the previous step's `H_1, H_2, H_3`, and pairing them would walk backwards.
pub const SPLIT_TABLE: [[(usize, usize); 3]; 8] = [
    [(0, 2), (1, 4), (3, 5)],
    [(0, 2), (1, 5), (3, 4)],
    [(0, 3), (1, 4), (2, 5)],
    [(0, 3), (1, 5), (2, 4)],
    [(0, 4), (1, 2), (3, 5)],
    [(0, 4), (1, 3), (2, 5)],
    [(0, 5), (1, 2), (3, 4)],
    [(0, 5), (1, 3), (2, 4)],
];

/// All 15 ways to pair up six slots, in lexicographic order.
pub const PAIRINGS: [[(usize, usize); 3]; 15] = {
    let mut out = [[(0, 0); 3]; 15];
    let mut k = 0;
    let mut b = 1;
    while b < 6 {
        // remaining four slots after pairing 0 with b
        let mut rest = [0usize; 4];
        let mut r = 0;
        let mut s = 1;
        while s < 6 {
            if s != b {
                rest[r] = s;
                r += 1;
            }
            s += 1;
        }
        out[k] = [(0, b), (rest[0], rest[1]), (rest[2], rest[3])];
        out[k + 1] = [(0, b), (rest[0], rest[2]), (rest[1], rest[3])];
        out[k + 2] = [(0, b), (rest[0], rest[3]), (rest[1], rest[2])];
        k += 3;
        b += 1;
    }
    out
};

/// Six linear factors `L_1 ... L_6` of a genus-2 model `y^2 = prod L_j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FactorList<U: Residue>(pub [LinearFactor<U>; 6]);

impl<U: Residue> FactorList<U> {
    /// Checks that the roots are distinct and at most one factor is `1`.
    pub fn new(factors: [LinearFactor<U>; 6]) -> Result<Self, RichelotError> {
        let ones = factors.iter().filter(|l| matches!(l, LinearFactor::One)).count();
        if ones > 1 {
            return Err(RichelotError::Degenerate("more than one constant factor"));
        }
        for i in 0..6 {
            for j in i + 1..6 {
                if factors[i].root().is_some() && factors[i] == factors[j] {
                    return Err(RichelotError::Degenerate("repeated root"));
                }
            }
        }
        Ok(Self(factors))
    }

    /// Factors from roots; `None` stands for the point at infinity.
    pub fn from_roots(roots: [Option<Fp2<U>>; 6]) -> Result<Self, RichelotError> {
        Self::new(roots.map(|r| r.map_or(LinearFactor::One, LinearFactor::Root)))
    }

    pub fn factors(&self) -> &[LinearFactor<U>; 6] {
        &self.0
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        self.0
            .iter()
            .find_map(LinearFactor::root)
            .expect("at least five finite roots")
            .field()
    }

    /// `prod L_j`.
    pub fn polynomial(&self) -> Poly<U> {
        let field = self.field();
        self.0.iter().fold(Poly::one(field), |acc, l| acc.mul(&l.to_poly(field)))
    }

    /// The splitting `{L1 L2, L3 L4, L5 L6}`: after a step, the kernel of the
    /// dual isogeny.
    pub fn incoming_splitting(&self) -> QuadraticSplitting<U> {
        QuadraticSplitting::from_pattern(self, &[(0, 1), (2, 3), (4, 5)])
    }

    /// Same factors, roots in canonical order, the constant factor last.
    pub fn sorted(&self) -> Self {
        let mut f = self.0.clone();
        f.sort();
        Self(f)
    }
}

impl<U: Residue> fmt::Debug for FactorList<U> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| match l {
                LinearFactor::Root(r) => format!("x-({r})"),
                LinearFactor::One => "1".to_string(),
            })
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Ordered triple `(G_1, G_2, G_3)` of pairwise coprime factors of degree <= 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticSplitting<U: Residue> {
    pairs: [[LinearFactor<U>; 2]; 3],
    g: [Poly<U>; 3],
}

impl<U: Residue> QuadraticSplitting<U> {
    pub fn from_pattern(l: &FactorList<U>, pattern: &[(usize, usize); 3]) -> Self {
        let field = l.field().clone();
        let pairs = pattern.map(|(a, b)| [l.0[a].clone(), l.0[b].clone()]);
        let g = pairs.clone().map(|[a, b]| a.to_poly(&field).mul(&b.to_poly(&field)));
        Self { pairs, g }
    }

    /// Builds a splitting from three polynomials of degree 1 or 2, each of
    /// which must split over `F_{p^2}`. Leading coefficients are kept in the
    /// `G_i` but not in the factor pairs.
    pub fn from_polys(g: [Poly<U>; 3]) -> Result<Self, RichelotError> {
        let mut pairs = Vec::with_capacity(3);
        for gi in &g {
            let (a, b) = factor_deg_le2(gi)?;
            pairs.push([a, b]);
        }
        let pairs: [[LinearFactor<U>; 2]; 3] = pairs.try_into().expect("three pairs");
        let all: Vec<_> = pairs.iter().flatten().cloned().collect();
        FactorList::new(all.try_into().expect("six factors"))?;
        Ok(Self { pairs, g })
    }

    pub fn g(&self) -> &[Poly<U>; 3] {
        &self.g
    }

    pub fn pairs(&self) -> &[[LinearFactor<U>; 2]; 3] {
        &self.pairs
    }

    pub fn field(&self) -> &Arc<FieldContext<U>> {
        self.g[0].field()
    }

    /// The six factors in splitting order, `G_i = L_{2i-1} L_{2i}`.
    pub fn factor_list(&self) -> FactorList<U> {
        let all: Vec<_> = self.pairs.iter().flatten().cloned().collect();
        FactorList(all.try_into().expect("six factors"))
    }

    /// Order-independent identity of the kernel.
    pub fn partition(&self) -> PairPartition<U> {
        PairPartition::new(self.pairs.clone())
    }

    /// Determinant of the coefficient matrix, rows `G_i`, columns by
    /// descending degree. Only its vanishing is meaningful.
    pub fn delta(&self) -> Fp2<U> {
        let m: Vec<[Fp2<U>; 3]> = self.g.iter().map(|g| [g.coeff(2), g.coeff(1), g.coeff(0)]).collect();
        det3(&m)
    }

    /// `H_1 = G_2' G_3 - G_2 G_3'` and cyclically.
    pub fn h_polys(&self) -> [Poly<U>; 3] {
        let d = self.g.clone().map(|g| g.derivative());
        let h = |i: usize, j: usize| d[i].mul(&self.g[j]).sub(&self.g[i].mul(&d[j]));
        [h(1, 2), h(2, 0), h(0, 1)]
    }
}

fn det3<U: Residue>(m: &[[Fp2<U>; 3]]) -> Fp2<U> {
    let minor = |r: usize, a: usize, b: usize| &(&m[r][a] * &m[r + 1][b]) - &(&m[r][b] * &m[r + 1][a]);
    &(&(&m[0][0] * &minor(1, 1, 2)) - &(&m[0][1] * &minor(1, 0, 2))) + &(&m[0][2] * &minor(1, 0, 1))
}

/// Result of one Richelot step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome<U: Residue> {
    /// Codomain is the jacobian of `y^2 = prod L_j`; the new list's pairs
    /// `(L1 L2, L3 L4, L5 L6)` factor `H_1, H_2, H_3`.
    Jacobian(FactorList<U>),
    /// `delta = 0`: the codomain is a product of elliptic curves.
    Split,
}

/// Work done by one step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub sqrt_calls: u32,
}

/// Codomain of the Richelot isogeny with kernel `s`.
///
/// With `parallel` set the three factorizations run on the rayon pool; the
/// result is identical either way.
pub fn richelot_image<U: Residue>(
    s: &QuadraticSplitting<U>,
    parallel: bool,
) -> Result<(StepOutcome<U>, StepStats), RichelotError> {
    let h = s.h_polys();
    let c1 = [h[0].coeff(0), h[0].coeff(1), h[0].coeff(2)];
    let c2 = [h[1].coeff(0), h[1].coeff(1), h[1].coeff(2)];
    let minors_vanish = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .all(|&(i, j)| (&c1[i] * &c2[j]) == (&c1[j] * &c2[i]));
    if minors_vanish {
        if h[0].is_zero() && h[1].is_zero() {
            return Err(RichelotError::Degenerate("H1 and H2 both vanish"));
        }
        return Ok((StepOutcome::Split, StepStats::default()));
    }
    if h.iter().any(|hi| hi.degree().unwrap_or(0) == 0) {
        return Err(RichelotError::Degenerate("constant H polynomial"));
    }
    let factor = |hi: &Poly<U>| factor_deg_le2(hi);
    let (r1, r2, r3) = if parallel {
        let (r1, (r2, r3)) = rayon::join(|| factor(&h[0]), || rayon::join(|| factor(&h[1]), || factor(&h[2])));
        (r1, r2, r3)
    } else {
        (factor(&h[0]), factor(&h[1]), factor(&h[2]))
    };
    let (a, b, c) = (r1?, r2?, r3?);
    let sqrt_calls = h.iter().filter(|hi| hi.degree() == Some(2)).count() as u32;
    let list = FactorList::new([a.0, a.1, b.0, b.1, c.0, c.1])
        .map_err(|_| RichelotError::InvariantViolation("codomain is not squarefree"))?;
    Ok((StepOutcome::Jacobian(list), StepStats { sqrt_calls }))
}

/// One step of the hash walk: split by `SPLIT_TABLE[digit]` and take the image.
pub fn richelot_step<U: Residue>(l: &FactorList<U>, digit: u8) -> Result<StepOutcome<U>, RichelotError> {
    Ok(richelot_step_with(l, digit, false)?.0)
}

pub fn richelot_step_with<U: Residue>(
    l: &FactorList<U>,
    digit: u8,
    parallel: bool,
) -> Result<(StepOutcome<U>, StepStats), RichelotError> {
    let pattern = SPLIT_TABLE.get(digit as usize).ok_or(RichelotError::BadDigit(digit))?;
    richelot_image(&QuadraticSplitting::from_pattern(l, pattern), parallel)
}

/// The 15 splittings of a curve: roots in canonical order (a constant factor
/// last), then the pairings of [`PAIRINGS`].
pub fn all_splittings<U: Residue>(l: &FactorList<U>) -> Vec<QuadraticSplitting<U>> {
    let sorted = l.sorted();
    PAIRINGS.iter().map(|pat| QuadraticSplitting::from_pattern(&sorted, pat)).collect()
}

/// The 8 good extensions after a step that produced `l`, in table order.
pub fn good_splittings_after<U: Residue>(l: &FactorList<U>) -> Vec<QuadraticSplitting<U>> {
    SPLIT_TABLE.iter().map(|pat| QuadraticSplitting::from_pattern(l, pat)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldHandle;
    use std::collections::BTreeSet;

    #[test]
    fn tables_are_consistent() {
        for pat in SPLIT_TABLE {
            for (a, b) in pat {
                assert!(!(a / 2 == b / 2), "pattern pairs a previous H");
            }
            assert!(PAIRINGS.contains(&pat));
        }
        let distinct: BTreeSet<_> = PAIRINGS.iter().collect();
        assert_eq!(distinct.len(), 15);
        assert_eq!(PAIRINGS[0], [(0, 1), (2, 3), (4, 5)]);
    }

    fn c0(p: u64) -> FactorList<u64> {
        let f = FieldContext::new(p).unwrap();
        FactorList::from_roots([
            Some(f.from_i64(1)),
            Some(f.from_i64(-1)),
            Some(f.zero()),
            Some(f.from_i64(2)),
            Some(f.ratio(1, 2).unwrap()),
            None,
        ])
        .unwrap()
    }

    #[test]
    fn x5_minus_x_deltas() {
        let f = FieldContext::new(13u64).unwrap();
        let i = f.from_i64(-1).sqrt().unwrap();
        let x = |cs: [Fp2<u64>; 3]| Poly::new(&f, cs.to_vec());
        let one = f.one();
        let zero = f.zero();
        let ip1 = &i + &one;
        let s = QuadraticSplitting::from_polys([
            x([zero.clone(), one.clone(), zero.clone()]),
            x([one.clone(), zero.clone(), one.clone()]),
            x([-one.clone(), zero.clone(), one.clone()]),
        ])
        .unwrap();
        let d = s.delta();
        assert!(d == f.from_i64(2) || d == f.from_i64(-2));
        let s = QuadraticSplitting::from_polys([
            x([zero.clone(), one.clone(), zero.clone()]),
            x([i.clone(), -ip1.clone(), one.clone()]),
            x([i.clone(), ip1.clone(), one.clone()]),
        ])
        .unwrap();
        assert!(s.delta().is_zero());
        let s = QuadraticSplitting::from_polys([
            x([-one.clone(), one.clone(), zero.clone()]),
            x([zero.clone(), -i.clone(), one.clone()]),
            x([i.clone(), ip1.clone(), one.clone()]),
        ])
        .unwrap();
        let want = &(&f.from_i64(3) * &i) + &one;
        assert!(s.delta() == want || s.delta() == -want);
    }

    #[test]
    fn first_step_from_c0() {
        let l = c0(11);
        let (out, stats) = richelot_image(&good_splittings_after(&l)[0], false).unwrap();
        assert!(matches!(out, StepOutcome::Jacobian(_)));
        assert_eq!(stats.sqrt_calls, 3);
        let (par, _) = richelot_image(&good_splittings_after(&l)[0], true).unwrap();
        assert_eq!(out, par);
    }

    #[test]
    fn rank_test_matches_delta_on_c0() {
        for p in [11u64, 17, 23, 29] {
            for s in all_splittings(&c0(p)) {
                let (out, _) = richelot_image(&s, false).unwrap();
                assert_eq!(matches!(out, StepOutcome::Split), s.delta().is_zero(), "p={p}");
            }
        }
    }

    #[test]
    fn bad_digit() {
        assert_eq!(richelot_step(&c0(11), 8), Err(RichelotError::BadDigit(8)));
    }
}
