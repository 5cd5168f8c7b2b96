use intersective_core::intersective::{check_intersective, hensel_roots};
use intersective_core::{AuxFamily, IntPoly, IntersectivityVerdict};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-20i64..=20, 2..6)
        .prop_filter("nonconstant", |c| c[1..].iter().any(|&x| x != 0))
        .prop_map(IntPoly::from_coeffs)
}

fn families() -> Vec<AuxFamily> {
    [vec![0i64, 0, 1], vec![-1, 0, 1], vec![0, 0, 0, 1], vec![0, -2, 1, 1]]
        .into_iter()
        .map(|c| AuxFamily::new(IntPoly::from_coeffs(c), 1000).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn identity_shift(h in poly()) {
        let one = BigInt::one();
        prop_assert_eq!(h.shift_scale_divide(&BigInt::zero(), &one, &one).unwrap(), h);
    }

    #[test]
    fn shift_composition(h in poly(), r1 in -9i64..9, d1 in 1i64..9, r2 in -9i64..9, d2 in 1i64..9) {
        let one = BigInt::one();
        let nested = h
            .shift_scale_divide(&r1.into(), &d1.into(), &one).unwrap()
            .shift_scale_divide(&r2.into(), &d2.into(), &one).unwrap();
        let direct = h.shift_scale_divide(&(r1 + d1 * r2).into(), &(d1 * d2).into(), &one).unwrap();
        prop_assert_eq!(nested, direct);
    }

    #[test]
    fn shifted_leading(h in poly(), r in -50i64..50, d in 1i64..50) {
        let k = h.degree().unwrap();
        let s = h.shift_scale_divide(&r.into(), &d.into(), &BigInt::one()).unwrap();
        let expect = h.leading().unwrap() * num_traits::pow(BigInt::from(d), k);
        prop_assert_eq!(s.coeff_stats().unwrap().leading, expect);
    }

    #[test]
    fn second_difference(h in poly(), x in -100i64..100) {
        // h(x + y) = sum c_i y^i, so h(x+1) - 2h(x) + h(x-1) = 2 sum_{i even >= 2} c_i
        let taylor = h.shift_scale_divide(&x.into(), &BigInt::one(), &BigInt::one()).unwrap();
        let even: BigInt = taylor.coeffs().iter().enumerate().skip(2).step_by(2).map(|(_, c)| c.clone()).sum();
        let lhs = h.eval_i64(x + 1) - 2 * h.eval_i64(x) + h.eval_i64(x - 1);
        prop_assert_eq!(lhs, 2 * even);
    }

    #[test]
    fn modular_eval(h in poly(), x in -1000i64..1000, m in 1u64..5000) {
        let exact = h.eval_i64(x).mod_floor(&BigInt::from(m));
        prop_assert_eq!(BigInt::from(h.reduce_mod(m).eval_i64(x)), exact);
    }

    #[test]
    fn intersectivity_witness_is_sound(h in poly()) {
        if let Ok(IntersectivityVerdict::NotIntersective { witness_q }) = check_intersective(&h, 30) {
            let m = h.reduce_mod(witness_q);
            prop_assert!((0..witness_q).all(|n| m.eval(n) != 0));
        }
    }

    #[test]
    fn hensel_residues_are_roots(h in poly(), pi in 0usize..5, prec in 1u32..8) {
        let p = [2u64, 3, 5, 7, 11][pi];
        let modulus = num_traits::pow(BigInt::from(p), prec as usize);
        for z in hensel_roots(&h, p, prec).unwrap() {
            prop_assert!(h.evaluate(&z.residue).mod_floor(&modulus).is_zero());
            prop_assert!(z.multiplicity >= 1);
        }
    }

    #[test]
    fn lambda_completely_multiplicative(d in 1u64..300, e in 1u64..300) {
        for fam in families() {
            prop_assert_eq!(fam.lambda_of(d * e).unwrap(), fam.lambda_of(d).unwrap() * fam.lambda_of(e).unwrap());
        }
    }
}

#[test]
fn simple_roots_mod_p_all_lift() {
    // x^3 - 2 is squarefree; for p not dividing 6 * 27 * 4, roots mod p lift uniquely
    let h = IntPoly::from_coeffs([-2i64, 0, 0, 1]);
    for p in [5u64, 7, 11, 13, 31, 43] {
        let modp = h.reduce_mod(p);
        let count = (0..p).filter(|&x| modp.eval(x) == 0).count();
        assert_eq!(hensel_roots(&h, p, 6).unwrap().len(), count, "p = {p}");
    }
}

#[test]
fn family_invariants() {
    for fam in families() {
        let k = fam.degree();
        let ak = fam.h().leading().unwrap().clone();
        let c: BigInt = fam
            .h()
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, a)| a.abs() << j)
            .sum();
        for d in 1..=1000u64 {
            let e = fam.aux(d).unwrap();
            let db = BigInt::from(d);
            assert!(e.r > -db.clone() && !e.r.is_positive());
            assert!((&e.lambda % &db).is_zero());
            assert!((num_traits::pow(db.clone(), k) % &e.lambda).is_zero());
            assert_eq!(&e.leading * &e.lambda, &ak * num_traits::pow(db.clone(), k));
            // J_d <= (sum |a_j| 2^j / a_k) b_d
            assert!(&e.abs_sum * &ak <= &c * &e.leading, "d = {d}");
            for x in -3i64..=3 {
                let xb = BigInt::from(x);
                assert_eq!(e.poly.evaluate(&xb) * &e.lambda, fam.h().evaluate(&(&e.r + &db * &xb)));
            }
        }
    }
}

#[test]
fn nesting_up_to_200() {
    for fam in families() {
        for d in 1..=200u64 {
            for q in 1..=200 / d {
                let r = fam.verify_nesting(d, q, 20).unwrap();
                assert!(r.s > -BigInt::from(q) && !r.s.is_positive());
            }
        }
    }
}

#[test]
fn content_is_stable() {
    for c in [vec![0i64, 0, 1], vec![-1, 0, 1], vec![0, 0, 0, 1], vec![0, -2, 1, 1]] {
        let fam = AuxFamily::new(IntPoly::from_coeffs(c), 3000).unwrap();
        let content = |d| fam.aux_poly(d).unwrap().content().unwrap();
        let upto = |n: u64| (1..=n).map(content).max().unwrap();
        assert_eq!(upto(300), upto(3000));
    }
}
