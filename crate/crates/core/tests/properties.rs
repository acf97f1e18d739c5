use proptest::prelude::*;

use g2hash::graph::{curve_normal_form, state_key};
use g2hash::hash::{integer_digits, message_digits};
use g2hash::richelot::{
    all_splittings, classify_extension, richelot_image, ExtensionClass, Kernel, StepOutcome, SPLIT_TABLE,
};
use g2hash::{FactorList, FieldContext, FieldHandle, Fp2, Genus2Curve, HashContext, LinearFactor};
use num_bigint::BigUint;

const P: u64 = 1019;

fn el(a: u64, b: u64) -> Fp2<u64> {
    FieldContext::new(P).unwrap().element(a % P, b % P).unwrap()
}

fn element() -> impl Strategy<Value = Fp2<u64>> {
    (0..P, 0..P).prop_map(|(a, b)| el(a, b))
}

fn nonzero() -> impl Strategy<Value = Fp2<u64>> {
    element().prop_filter("nonzero", |x| !x.is_zero())
}

/// Six distinct roots, the last possibly at infinity.
fn factor_list() -> impl Strategy<Value = FactorList<u64>> {
    (prop::collection::btree_set((0..P, 0..P), 6), any::<bool>()).prop_map(|(set, inf)| {
        let mut roots: Vec<Option<Fp2<u64>>> = set.into_iter().map(|(a, b)| Some(el(a, b))).collect();
        if inf {
            roots[5] = None;
        }
        FactorList::from_roots(roots.try_into().unwrap()).unwrap()
    })
}

/// Superspecial curves: the end points of short walks from the start curve.
fn superspecial() -> impl Strategy<Value = FactorList<u64>> {
    prop::collection::vec(0u8..8, 0..10).prop_map(|digits| {
        let ctx = HashContext::with_prime(P).unwrap();
        let mut l = ctx.start().clone();
        for d in digits {
            if let StepOutcome::Jacobian(next) = g2hash::richelot::richelot_step(&l, d).unwrap() {
                l = next;
            }
        }
        l
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(a in element(), b in element(), c in element()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
        prop_assert_eq!(a.frobenius().frobenius(), a.clone());
        prop_assert_eq!(a.pow_u64(P * P), a);
    }

    #[test]
    fn square_roots(a in element()) {
        let s = a.square().sqrt().unwrap();
        prop_assert_eq!(s.square(), a.square());
        prop_assert!(s <= -&s);
        // every element of F_p2 is a square exactly when its norm is
        prop_assert_eq!(a.sqrt().is_some(), a.is_square());
    }

    #[test]
    fn bytes_round_trip(a in element()) {
        let f = a.field().clone();
        prop_assert_eq!(f.from_bytes(&a.to_bytes()).unwrap(), a.clone());
        prop_assert_eq!(f.decode(&a.canonical_encode()).unwrap(), a);
    }

    #[test]
    fn invariants_survive_remodelling(
        l in factor_list(),
        m in prop::array::uniform4(element()),
        u in nonzero(),
    ) {
        let [a, b, c, d] = &m;
        prop_assume!(!(&(a * d) - &(b * c)).is_zero());
        let curve = Genus2Curve::from_factors(l.factors(), l.field()).unwrap();
        let other = curve.transform([a, b, c, d], &u).unwrap();
        prop_assert_eq!(other.cardona_quer().unwrap(), curve.cardona_quer().unwrap());
    }

    #[test]
    fn invariants_ignore_factor_order(l in factor_list(), seed in any::<u64>()) {
        let mut f = l.factors().clone();
        let k = (seed % 6) as usize;
        f.swap(k, (k + 1 + (seed / 6 % 5) as usize) % 6);
        let shuffled = FactorList::new(f).unwrap();
        let field = l.field();
        prop_assert_eq!(
            g2hash::cardona_quer_of(l.factors(), field).unwrap(),
            g2hash::cardona_quer_of(shuffled.factors(), field).unwrap()
        );
        prop_assert_eq!(curve_normal_form(&l), curve_normal_form(&shuffled));
    }

    #[test]
    fn state_key_ignores_pair_order(l in factor_list(), flip in 0u8..8, rot in 0usize..3) {
        let f = l.factors();
        let mut pairs: Vec<[LinearFactor<u64>; 2]> = (0..3)
            .map(|q| {
                let (x, y) = (f[2 * q].clone(), f[2 * q + 1].clone());
                if flip >> q & 1 == 1 { [y, x] } else { [x, y] }
            })
            .collect();
        pairs.rotate_left(rot);
        let moved = FactorList::new(pairs.concat().try_into().unwrap()).unwrap();
        prop_assert_eq!(state_key(&moved), state_key(&l));
    }

    #[test]
    fn extension_classes_count(l in factor_list()) {
        let prev = Kernel::Jacobian(l.incoming_splitting().partition());
        let mut counts = [0; 3];
        for s in all_splittings(&l) {
            counts[classify_extension(&prev, &Kernel::Jacobian(s.partition())).unwrap() as usize] += 1;
        }
        prop_assert_eq!(counts, [1, 6, 8]);
        for pat in SPLIT_TABLE {
            let s = g2hash::QuadraticSplitting::from_pattern(&l, &pat);
            prop_assert_eq!(classify_extension(&prev, &Kernel::Jacobian(s.partition())).unwrap(), ExtensionClass::Good);
        }
    }

    #[test]
    fn step_images_are_curves_whose_dual_returns(l in superspecial(), k in 0usize..15) {
        let s = &all_splittings(&l)[k];
        if let StepOutcome::Jacobian(next) = richelot_image(s, false).unwrap().0 {
            let back = richelot_image(&next.incoming_splitting(), false).unwrap().0;
            let StepOutcome::Jacobian(back) = back else {
                return Err(TestCaseError::fail("dual step split"));
            };
            let field = l.field();
            prop_assert_eq!(
                g2hash::cardona_quer_of(back.factors(), field).unwrap(),
                g2hash::cardona_quer_of(l.factors(), field).unwrap()
            );
        } else {
            prop_assert!(s.delta().is_zero());
        }
    }

    #[test]
    fn parallel_steps_match(msg in prop::collection::vec(any::<u8>(), 0..6)) {
        let ctx = HashContext::with_prime(P).unwrap();
        prop_assert_eq!(ctx.hash_bytes_with(&msg, true).unwrap(), ctx.hash_bytes(&msg).unwrap());
    }

    #[test]
    fn digits_are_octal_expansion(m in any::<u64>()) {
        let d = integer_digits(&BigUint::from(m));
        let back = d.iter().rev().fold(BigUint::from(0u32), |acc, &x| acc * 8u32 + x);
        prop_assert_eq!(back, BigUint::from(m) << 30u32);
        if m > 0 {
            prop_assert!(d[..10].iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn leading_zero_bytes_matter(msg in prop::collection::vec(any::<u8>(), 0..8)) {
        let mut longer = vec![0u8];
        longer.extend_from_slice(&msg);
        prop_assert_ne!(message_digits(&msg), message_digits(&longer));
    }
}
