use hyperdeck::hypermatrix::{
    member_count, sum_deck_direct, sum_deck_via_beta, sum_deck_via_gamma, DeckMode, Hypermatrix, SumDeck,
};
use hyperdeck::numerics::Q;
use hyperdeck::oracle::{beta_product_poly, moment_sum, refinement_check};
use num_bigint::BigInt;
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize, usize)> {
    prop_oneof![(Just(1usize), 1..=9usize), (Just(2usize), 1..=4usize), (Just(3usize), 1..=3usize)]
        .prop_flat_map(|(d, n)| (Just(d), Just(n), 1..=n))
}

fn matrix() -> impl Strategy<Value = (Hypermatrix, usize)> {
    shape().prop_flat_map(|(d, n, k)| {
        proptest::collection::vec(0u8..=1, n.pow(d as u32)).prop_map(move |bits| (Hypermatrix::new(d, n, bits).unwrap(), k))
    })
}

#[test]
fn line_of_three_two_deck() {
    let a = Hypermatrix::new(1, 3, vec![1, 0, 0]).unwrap();
    let s = sum_deck_direct(&a, 2, DeckMode::Full).unwrap();
    assert_eq!(s.entries, vec![BigInt::from(2), BigInt::from(0)]);
}

#[test]
fn sum_deck_json_round_trip() {
    let a = Hypermatrix::new(2, 3, vec![1, 0, 1, 0, 1, 0, 0, 1, 1]).unwrap();
    let s = sum_deck_direct(&a, 2, DeckMode::Principal).unwrap();
    assert_eq!(SumDeck::from_json(&s.to_json()).unwrap(), s);
}

#[test]
fn text_format_round_trip() {
    let a = Hypermatrix::new(3, 2, vec![1, 0, 0, 1, 1, 1, 0, 0]).unwrap();
    assert_eq!(Hypermatrix::parse(&a.to_text()).unwrap(), a);
    assert!(Hypermatrix::parse("2 2\n101\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basis_formulas_match_direct((a, k) in matrix()) {
        prop_assert_eq!(sum_deck_via_beta(&a, k).unwrap(), sum_deck_direct(&a, k, DeckMode::Full).unwrap());
        prop_assert_eq!(sum_deck_via_gamma(&a, k).unwrap(), sum_deck_direct(&a, k, DeckMode::Principal).unwrap());
    }

    #[test]
    fn entries_bounded_by_member_count((a, k) in matrix()) {
        for mode in [DeckMode::Full, DeckMode::Principal] {
            let s = sum_deck_direct(&a, k, mode).unwrap();
            let cap = BigInt::from(member_count(a.n, a.d, k, mode));
            prop_assert!(s.entries.iter().all(|e| *e >= BigInt::from(0) && *e <= cap));
        }
    }

    #[test]
    fn sum_deck_entries_are_beta_moments((a, k) in matrix()) {
        let s = sum_deck_direct(&a, k, DeckMode::Full).unwrap();
        let u: Vec<usize> = vec![1; a.d];
        let p = beta_product_poly(&u, a.n, k);
        prop_assert_eq!(moment_sum(&a, &p), Q::from_integer(s.get(&u).clone()));
    }

    #[test]
    fn refinement_holds((a, l) in matrix(), pick in 0usize..8) {
        let k = 1 + pick % l;
        prop_assert!(refinement_check(&a, k, l, DeckMode::Full).unwrap());
        prop_assert!(refinement_check(&a, k, l, DeckMode::Principal).unwrap());
    }
}
