use hyperdeck::numerics::Q;
use hyperdeck::pulse::{build_f0, build_fk, check_pulse_properties, fk_exact_check, lp_peak_polynomial, CertOptions, PulseForm, PulsePolynomial};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn qi(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

fn zeros_of(f: &PulsePolynomial) -> Vec<u64> {
    match &f.form {
        PulseForm::Zeros { zeros } => zeros.clone(),
        other => panic!("expected zeros form, got {other:?}"),
    }
}

#[test]
fn fk_peak_dominates_grid_by_hand() {
    let f = build_fk(40).unwrap();
    assert_eq!(f.eval_q(&Q::zero()), qi(1));
    let total: Q = (1..=40).map(|i| f.eval_q(&qi(i)).abs()).sum();
    assert!(total < qi(1));
    assert!(fk_exact_check(&zeros_of(&f), 40).passed);
}

#[test]
fn f0_certifies() {
    let f = build_f0(&qi(50), &qi(10)).unwrap();
    assert_eq!(f.eval_q(&Q::zero()), qi(10));
    let r = check_pulse_properties(&f, &CertOptions { random_reals: 50, offsets: 4, seed: 1, points: None });
    assert!(r.passed, "{:?}", r.checks);
}

#[test]
fn lp_pulse_on_points() {
    let pts: Vec<Q> = [-3, -1, 2, 5, 8].into_iter().map(qi).collect();
    let slack = Q::new(BigInt::from(1), BigInt::from(2));
    let f = lp_peak_polynomial(&pts, 12, &slack).unwrap();
    let total: Q = pts.iter().map(|x| f.eval_q(x).abs()).sum();
    assert!(total < slack * f.eval_q(&Q::zero()));
}

#[test]
fn pulse_serde_round_trip() {
    for f in [build_fk(25).unwrap(), build_f0(&qi(30), &qi(4)).unwrap()] {
        let back: PulsePolynomial = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        for x in [-2, 0, 3, 17] {
            assert_eq!(back.eval_q(&qi(x)), f.eval_q(&qi(x)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fk_passes_exact_check(n in 1u64..=400) {
        let f = build_fk(n).unwrap();
        prop_assert!(fk_exact_check(&zeros_of(&f), n).passed);
        let total: Q = (1..=n as i64).map(|i| f.eval_q(&qi(i)).abs()).sum();
        prop_assert!(total < f.eval_q(&Q::zero()));
    }
}
