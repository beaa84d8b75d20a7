use hyperdeck::numerics::rational::{format_q, isqrt_floor_q, parse_q, sqrt_bounds};
use hyperdeck::numerics::{FastInterval, SurdScalar, Q};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::cmp::Ordering;

fn rat() -> impl Strategy<Value = Q> {
    (-1_000_000i64..=1_000_000, 1i64..=10_000).prop_map(|(p, q)| Q::new(BigInt::from(p), BigInt::from(q)))
}

fn nonneg() -> impl Strategy<Value = Q> {
    (0i64..=1_000_000_000, 1i64..=10_000).prop_map(|(p, q)| Q::new(BigInt::from(p), BigInt::from(q)))
}

#[test]
fn format_always_has_denominator() {
    assert_eq!(format_q(&Q::from_integer(BigInt::from(1))), "1/1");
    assert_eq!(format_q(&Q::new(BigInt::from(-6), BigInt::from(4))), "-3/2");
    assert!(parse_q("1/0").is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_parse_round_trip(x in rat()) {
        prop_assert_eq!(parse_q(&format_q(&x)), Some(x));
    }

    #[test]
    fn isqrt_floor_is_tight(x in nonneg()) {
        let r = Q::from_integer(isqrt_floor_q(&x));
        let r1 = &r + Q::from_integer(BigInt::from(1));
        prop_assert!(&r * &r <= x && &r1 * &r1 > x);
    }

    #[test]
    fn sqrt_bounds_bracket(x in nonneg(), bits in 8u32..=80) {
        let (lo, hi) = sqrt_bounds(&x, bits);
        prop_assert!(lo <= hi);
        prop_assert!(&lo * &lo <= x && &hi * &hi >= x);
    }

    #[test]
    fn fast_interval_encloses(a in rat(), b in rat()) {
        let (fa, fb) = (FastInterval::from_q(&a), FastInterval::from_q(&b));
        let inside = |i: FastInterval, v: &Q| {
            let lo = Q::from_float(i.lo).unwrap();
            let hi = Q::from_float(i.hi).unwrap();
            lo <= *v && *v <= hi
        };
        prop_assert!(inside(fa, &a));
        prop_assert!(inside(fa.add(fb), &(&a + &b)));
        prop_assert!(inside(fa.sub(fb), &(&a - &b)));
        prop_assert!(inside(fa.mul(fb), &(&a * &b)));
        prop_assert!(inside(fa.square(), &(&a * &a)));
    }

    #[test]
    fn surd_sign_matches_float(u in rat(), v in rat(), s in 1i64..=50) {
        let x = SurdScalar::new(u.clone(), v.clone(), Q::from_integer(BigInt::from(s)));
        let f = x.to_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(x.sign(), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
        }
        prop_assert_eq!(x.sub(&x).sign(), Ordering::Equal);
        prop_assert!(x.abs().sign() != Ordering::Less);
    }
}
