//! Isogenies touching products of elliptic curves.

use crate::field::{FieldHandle, Fp2, Residue};
use crate::invariants::EllipticRootsForm;
use crate::poly::{disc2, disc3, factor_deg_le2, Poly};

use super::{FactorList, QuadraticSplitting, RichelotError};

/// `G_i = a_{i,1} l_1^2 + a_{i,2} l_2^2` with `l_k = x - s_k`, or `l_k = 1`
/// when `s_k` is infinite (`None`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingData<U: Residue> {
    pub s: [Option<Fp2<U>>; 2],
    pub a: [[Fp2<U>; 2]; 3],
}

/// Codomain of a splitting with `delta = 0`.
///
/// `e1` has roots `-a_{i,2}/a_{i,1}` and `e2` roots `-a_{i,1}/a_{i,2}`, both
/// in the order of `G_1, G_2, G_3`; with these labels the image of the domain
/// 2-torsion is the diagonal `{(P_k, Q_k)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCodomain<U: Residue> {
    pub gluing: GluingData<U>,
    pub e1: EllipticRootsForm<U>,
    pub e2: EllipticRootsForm<U>,
}

/// Coefficients `(c0, c1, c2)` of `l^2`.
fn square_coeffs<U: Residue>(s: &Option<Fp2<U>>, one: &Fp2<U>) -> [Fp2<U>; 3] {
    match s {
        Some(s) => [s.square(), -&(s + s), one.clone()],
        None => [one.clone(), one.field().zero(), one.field().zero()],
    }
}

/// Finds the two perfect squares in the pencil spanned by `G_1, G_2` and
/// reads off the two elliptic quotients.
pub fn split_codomain<U: Residue>(s: &QuadraticSplitting<U>) -> Result<SplitCodomain<U>, RichelotError> {
    if !s.delta().is_zero() {
        return Err(RichelotError::Degenerate("delta is nonzero"));
    }
    let field = s.field().clone();
    let g = s.g();
    let co = |p: &Poly<U>| [p.coeff(0), p.coeff(1), p.coeff(2)];
    let [c1, b1, a1] = co(&g[0]);
    let [c2, b2, a2] = co(&g[1]);
    let four = field.from_u64(4);
    // disc(l G1 + G2) = q2 l^2 + q1 l + q0
    let q2 = &b1.square() - &(&four * &(&a1 * &c1));
    let q1 = &(&field.from_u64(2) * &(&b1 * &b2)) - &(&four * &(&(&a1 * &c2) + &(&a2 * &c1)));
    let q0 = &b2.square() - &(&four * &(&a2 * &c2));
    if q2.is_zero() {
        return Err(RichelotError::Degenerate("G1 is a square"));
    }
    let pencil = Poly::new(&field, vec![q0, q1, q2]);
    if disc2(&pencil)?.is_zero() {
        return Err(RichelotError::Degenerate("pencil has a single square"));
    }
    let (l1, l2) = factor_deg_le2(&pencil)?;
    let mut sk = Vec::with_capacity(2);
    for lam in [l1, l2] {
        let lam = lam.root().expect("quadratic roots").clone();
        let a = &(&lam * &a1) + &a2;
        let b = &(&lam * &b1) + &b2;
        sk.push(if a.is_zero() {
            None
        } else {
            Some(-&b.checked_div(&(&a + &a))?)
        });
    }
    let one = field.one();
    let e = [square_coeffs(&sk[0], &one), square_coeffs(&sk[1], &one)];
    // pick two coordinates where (e0, e1) are independent
    let (r, t) = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .find(|&(r, t)| &e[0][r] * &e[1][t] != &e[0][t] * &e[1][r])
        .ok_or(RichelotError::Degenerate("coincident squares"))?;
    let det = &(&e[0][r] * &e[1][t]) - &(&e[0][t] * &e[1][r]);
    let mut a = Vec::with_capacity(3);
    for gi in g {
        let gc = co(gi);
        let u = (&(&gc[r] * &e[1][t]) - &(&gc[t] * &e[1][r])).checked_div(&det)?;
        let v = (&(&e[0][r] * &gc[t]) - &(&e[0][t] * &gc[r])).checked_div(&det)?;
        for k in 0..3 {
            if &(&u * &e[0][k]) + &(&v * &e[1][k]) != gc[k] {
                return Err(RichelotError::InvariantViolation("G_i outside the pencil"));
            }
        }
        if u.is_zero() || v.is_zero() {
            return Err(RichelotError::InvariantViolation("G_i is a square"));
        }
        a.push([u, v]);
    }
    let a: [[Fp2<U>; 2]; 3] = a.try_into().expect("three rows");
    let r1 = [0, 1, 2].map(|i| -&a[i][1].checked_div(&a[i][0]).expect("nonzero"));
    let r2 = [0, 1, 2].map(|i| -&a[i][0].checked_div(&a[i][1]).expect("nonzero"));
    Ok(SplitCodomain {
        gluing: GluingData { s: [sk[0].clone(), sk[1].clone()], a },
        e1: EllipticRootsForm::new(r1)?,
        e2: EllipticRootsForm::new(r2)?,
    })
}

/// Constants of the gluing formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingConstants<U: Residue> {
    pub delta_alpha: Fp2<U>,
    pub delta_beta: Fp2<U>,
    pub a1: Fp2<U>,
    pub b1: Fp2<U>,
    pub a2: Fp2<U>,
    pub b2: Fp2<U>,
    pub big_a: Fp2<U>,
    pub big_b: Fp2<U>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GlueOutcome<U: Residue> {
    /// The kernel is the graph of an isomorphism; the isogeny is an
    /// endomorphism of `E_1 x E_2`.
    SelfIsogeny,
    /// Codomain `y^2 = -H_1 H_2 H_3`. `factors` pairs up as `(H_1, H_2, H_3)`,
    /// the kernel of the dual isogeny.
    Jacobian { h: [Poly<U>; 3], constants: GluingConstants<U>, factors: FactorList<U> },
}

/// The (2,2)-isogeny from `E_1 x E_2` with kernel `{(P_i, Q_sigma(i))}`.
pub fn glue_product<U: Residue>(
    e1: &EllipticRootsForm<U>,
    e2: &EllipticRootsForm<U>,
    sigma: [usize; 3],
) -> Result<GlueOutcome<U>, RichelotError> {
    let al = e1.roots();
    let be = sigma.map(|k| e2.roots()[k].clone());
    // graph of an isomorphism: some affine map sends alpha_i to beta_i
    let graph = &(&be[1] - &be[0]) * &(&al[2] - &al[0]) == &(&be[2] - &be[0]) * &(&al[1] - &al[0]);
    if graph {
        return Ok(GlueOutcome::SelfIsogeny);
    }
    let da = |i: usize, j: usize| &al[i] - &al[j];
    let db = |i: usize, j: usize| &be[i] - &be[j];
    let cyc = [(2, 1), (1, 0), (0, 2)];
    let mut a1 = e1.field().zero();
    let mut b1 = e1.field().zero();
    for (i, j) in cyc {
        a1 += da(i, j).square().checked_div(&db(i, j))?;
        b1 += db(i, j).square().checked_div(&da(i, j))?;
    }
    let a2 = &(&(&al[0] * &db(2, 1)) + &(&al[1] * &db(0, 2))) + &(&al[2] * &db(1, 0));
    let b2 = &(&(&be[0] * &da(2, 1)) + &(&be[1] * &da(0, 2))) + &(&be[2] * &da(1, 0));
    let delta_alpha = disc3(al);
    let delta_beta = disc3(&be);
    let nonzero = [&delta_alpha, &delta_beta, &a1, &b1, &a2, &b2];
    if nonzero.iter().any(|c| c.is_zero()) {
        return Err(RichelotError::InvariantViolation("gluing constant vanishes"));
    }
    let big_a = (&delta_beta * &a1).checked_div(&a2)?;
    let big_b = (&delta_alpha * &b1).checked_div(&b2)?;
    let field = e1.field();
    let quad = |i: usize, j: usize, k: usize| {
        // A (a_j - a_i)(a_i - a_k) x^2 + B (b_j - b_i)(b_i - b_k)
        let x2 = &big_a * &(&da(j, i) * &da(i, k));
        let x0 = &big_b * &(&db(j, i) * &db(i, k));
        Poly::new(field, vec![x0, field.zero(), x2])
    };
    let h = [quad(0, 1, 2), quad(1, 2, 0), quad(2, 0, 1)];
    let mut factors = Vec::with_capacity(6);
    for hi in &h {
        let (x, y) = factor_deg_le2(hi)?;
        factors.push(x);
        factors.push(y);
    }
    let factors = FactorList::new(factors.try_into().expect("six factors"))
        .map_err(|_| RichelotError::InvariantViolation("glued curve is singular"))?;
    Ok(GlueOutcome::Jacobian {
        h,
        constants: GluingConstants { delta_alpha, delta_beta, a1, b1, a2, b2, big_a, big_b },
        factors,
    })
}

/// The 2-isogeny with kernel `(roots[i], 0)`.
///
/// The codomain roots are `0` (the kernel of the dual, index 0) followed by
/// `A +- 2 sqrt(B)` in canonical order, where the domain is translated to
/// `y^2 = x (x^2 + A x + B)`.
pub fn two_isogeny<U: Residue>(e: &EllipticRootsForm<U>, i: usize) -> Result<EllipticRootsForm<U>, RichelotError> {
    let r = &e.roots()[i];
    let others: Vec<Fp2<U>> = (0..3).filter(|&k| k != i).map(|k| &e.roots()[k] - r).collect();
    let a = -&(&others[0] + &others[1]);
    let b = &others[0] * &others[1];
    let sb = b.sqrt().ok_or(RichelotError::InvariantViolation("2-torsion of the codomain is not rational"))?;
    let two_sb = &sb + &sb;
    let (x, y) = (&a + &two_sb, &a - &two_sb);
    let (x, y) = if y < x { (y, x) } else { (x, y) };
    Ok(EllipticRootsForm::new([e.field().zero(), x, y])?)
}

/// Product of the 2-isogenies with kernels `P_i` and `Q_j`.
///
/// In the codomain the image of the domain 2-torsion is `<P'_0, Q'_0>`.
pub fn product_step<U: Residue>(
    e1: &EllipticRootsForm<U>,
    e2: &EllipticRootsForm<U>,
    kernel: (usize, usize),
) -> Result<(EllipticRootsForm<U>, EllipticRootsForm<U>), RichelotError> {
    Ok((two_isogeny(e1, kernel.0)?, two_isogeny(e2, kernel.1)?))
}

#[cfg(test)]
mod tests {
    use super::super::all_splittings;
    use super::*;
    use crate::field::FieldContext;
    use crate::invariants::{cardona_quer_of, enumerate_ss_j};

    fn x5_minus_x(p: u64) -> FactorList<u64> {
        let f = FieldContext::new(p).unwrap();
        let i = f.from_i64(-1).sqrt().unwrap();
        FactorList::from_roots([Some(f.zero()), Some(f.one()), Some(-f.one()), Some(i.clone()), Some(-i), None])
            .unwrap()
    }

    #[test]
    fn split_codomains_are_supersingular_and_glue_back() {
        let l = x5_minus_x(13);
        let f = l.field().clone();
        let ss = enumerate_ss_j(&f).unwrap();
        let home = cardona_quer_of(l.factors(), &f).unwrap();
        let mut singular = 0;
        for s in all_splittings(&l) {
            if !s.delta().is_zero() {
                continue;
            }
            singular += 1;
            let sc = split_codomain(&s).unwrap();
            assert!(ss.contains(&sc.e1.j_invariant()));
            assert!(ss.contains(&sc.e2.j_invariant()));
            match glue_product(&sc.e1, &sc.e2, [0, 1, 2]).unwrap() {
                GlueOutcome::Jacobian { factors, .. } => {
                    assert_eq!(cardona_quer_of(factors.factors(), &f).unwrap(), home);
                }
                GlueOutcome::SelfIsogeny => panic!("dual of a split is a gluing"),
            }
        }
        assert_eq!(singular, 6);
    }

    #[test]
    fn glue_dual_splitting_has_delta_zero() {
        let f = FieldContext::new(13u64).unwrap();
        let ss = enumerate_ss_j(&f).unwrap();
        let j = ss.iter().next().unwrap().clone();
        // E: y^2 = x(x-1)(x-l) with the right j
        let lam = f
            .elements()
            .find(|l| {
                !l.is_zero()
                    && !l.is_one()
                    && EllipticRootsForm::new([f.zero(), f.one(), l.clone()]).unwrap().j_invariant() == j
            })
            .unwrap();
        let e = EllipticRootsForm::new([f.zero(), f.one(), lam]).unwrap();
        let mut glued = 0;
        for sigma in super::super::extension::PERMUTATIONS {
            match glue_product(&e, &e, sigma).unwrap() {
                GlueOutcome::SelfIsogeny => {}
                GlueOutcome::Jacobian { factors, constants, .. } => {
                    glued += 1;
                    assert!(!constants.big_a.is_zero() && !constants.big_b.is_zero());
                    let dual = factors.incoming_splitting();
                    assert!(dual.delta().is_zero());
                    let back = split_codomain(&dual).unwrap();
                    let mut js = [back.e1.j_invariant(), back.e2.j_invariant()];
                    js.sort();
                    assert_eq!(js, [j.clone(), j.clone()]);
                }
            }
        }
        assert_eq!(glued, 5);
    }

    #[test]
    fn two_isogeny_dual_returns() {
        let f = FieldContext::new(23u64).unwrap();
        let ss = enumerate_ss_j(&f).unwrap();
        let i = f.from_i64(-1).sqrt().unwrap();
        let e = EllipticRootsForm::new([f.zero(), i.clone(), -i]).unwrap();
        for k in 0..3 {
            let e2 = two_isogeny(&e, k).unwrap();
            assert!(ss.contains(&e2.j_invariant()));
            let back = two_isogeny(&e2, 0).unwrap();
            assert_eq!(back.j_invariant(), e.j_invariant());
        }
    }
}
