use hyperdeck::lattice::PointSet;
use hyperdeck::peak::{construct_peak_d, degree_bound, degree_report, slice_sums, verify_peak, PeakOptions, PeakParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(n: i64, size: usize, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = std::collections::BTreeSet::new();
    while pts.len() < size {
        pts.insert(vec![rng.gen_range(1..=n), rng.gen_range(1..=n), rng.gen_range(1..=n)]);
    }
    PointSet::new(3, n as u64, pts.into_iter().collect()).unwrap()
}

#[test]
fn pipeline_certifies_in_three_dimensions() {
    let h = random_set(4096, 40, 3);
    let b = construct_peak_d(&h, &PeakOptions { seed: 3, ..PeakOptions::default() }).unwrap();
    assert!(b.report.passed(), "{:?}", b.report.checks);
    assert!(h.points.contains(&b.product.h));
    assert!(verify_peak(&b.product, &h.points).unwrap().certified());
    assert!((degree_report(&b.product).degree as f64) < degree_bound(3, 4096));
    assert!(!slice_sums(&b.product, &h.points).slices.is_empty());
}

#[test]
fn same_seed_same_product() {
    let h = random_set(4096, 15, 9);
    let opts = PeakOptions { seed: 11, ..PeakOptions::default() };
    let a = construct_peak_d(&h, &opts).unwrap();
    let b = construct_peak_d(&h, &opts).unwrap();
    assert_eq!(a.product, b.product);
}

#[test]
fn singleton_is_trivial() {
    let h = PointSet::new(3, 4096, vec![vec![7, 8, 9]]).unwrap();
    let b = construct_peak_d(&h, &PeakOptions::default()).unwrap();
    assert_eq!(b.product.params, PeakParams::Trivial);
    assert!(verify_peak(&b.product, &h.points).unwrap().certified());
}

#[test]
fn small_lambda_rejected() {
    let h = random_set(64, 10, 1);
    let e = construct_peak_d(&h, &PeakOptions::default()).unwrap_err();
    assert_eq!(e.code(), "CONSTRUCTION");
}
