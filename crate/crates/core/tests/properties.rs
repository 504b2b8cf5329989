//! Property tests for the exact-arithmetic kernels.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use dilog_units_core::cyclotomic::CycPoly;
use dilog_units_core::ff::LocalContext;
use dilog_units_core::nahm::{recognize_rational, BigReal};

fn rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12)
        .prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn cyc(n: u64) -> impl Strategy<Value = CycPoly> {
    prop::collection::vec(rational(), 1..=n as usize)
        .prop_map(move |coeffs| CycPoly::new(n, coeffs))
}

proptest! {
    #[test]
    fn cyc_mul_commutes_with_reduction(x in cyc(5), y in cyc(5)) {
        let ctx = LocalContext::build(19, 5).unwrap();
        let admissible = |p: &CycPoly| p.reduce_to_local(&ctx).is_ok();
        prop_assume!(admissible(&x) && admissible(&y));
        let lhs = x.mul(&y).reduce_to_local(&ctx).unwrap();
        let rhs = ctx.mul2(
            &x.reduce_to_local(&ctx).unwrap(),
            &y.reduce_to_local(&ctx).unwrap(),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cyc_inverse_roundtrip(x in cyc(7)) {
        prop_assume!(!x.is_zero());
        let inv = x.inv().unwrap();
        prop_assert_eq!(x.mul(&inv), CycPoly::one(7));
    }

    #[test]
    fn galois_conjugation_composes(x in cyc(35), k in 1u64..35, l in 1u64..35) {
        prop_assume!(num_integer::gcd(k, 35) == 1 && num_integer::gcd(l, 35) == 1);
        let a = x.galois_conjugate(k).unwrap().galois_conjugate(l).unwrap();
        let b = x.galois_conjugate(k * l % 35).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn embed_respects_ring_ops(x in cyc(5), y in cyc(5)) {
        let p = 160u32;
        let k = dilog_units_core::cyclotomic::EmbeddingIndex(2);
        let lhs = x.mul(&y).complex_embed(k, p);
        let rhs = x.complex_embed(k, p).mul(&y.complex_embed(k, p));
        let err = lhs.sub(&rhs).abs();
        // Inputs are bounded, so the products stay well-conditioned.
        prop_assert!(err.exponent().unwrap_or(i64::MIN) < -(p as i64 - 40));
    }

    #[test]
    fn log_zeta_is_multiplicative(a in 0u64..19, b in 0u64..19, c in 0u64..19, d in 0u64..19) {
        let ctx = LocalContext::build(19, 5).unwrap();
        let u = ctx.fq2(a, b);
        let v = ctx.fq2(c, d);
        prop_assume!(!u.is_zero() && !v.is_zero());
        let lhs = ctx.log_zeta(&ctx.mul2(&u, &v)).unwrap();
        let rhs = ctx.class_add(ctx.log_zeta(&u).unwrap(), ctx.log_zeta(&v).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn recognized_rationals_roundtrip(p in -200i64..200, q in 1i64..100) {
        let prec = 160usize;
        let r = BigRational::new(BigInt::from(p), BigInt::from(q));
        let v = BigReal::from_ratio(&r, prec);
        let tol = BigReal::parse_dec("1e-30", prec).unwrap();
        let got = recognize_rational(&v, 100, &tol);
        prop_assert_eq!(got, Some(r));
    }
}
