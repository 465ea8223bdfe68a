mod common;

use lorenz_entropy::{
    count_words, critical_itineraries, entropy_estimate_wordcount, estimate_entropy, hs_member, itinerary,
    parry_reference, spectral_radius, AdmissiblePair, LorenzMapSpec, Membership,
};
use proptest::prelude::*;

use common::{orientation, pair_from_unit, sqrt_map, GOLDEN_LOG};

#[test]
fn word_growth_tracks_parry_for_larger_slopes() {
    // the finite-length count overshoots by roughly c/n, which is only
    // below 0.08 at 22 symbols once a is around 1.45 or more
    for i in 0..10 {
        let a = 1.5 + 0.05 * f64::from(i);
        let pair = AdmissiblePair::new(a, 0.5).unwrap();
        let crit = critical_itineraries(&pair, 40).unwrap();
        let est = entropy_estimate_wordcount(&crit, 22).unwrap();
        let h = parry_reference(&pair);
        assert!((est - h).abs() <= 0.08, "a = {a}: {est} vs {h}");
    }
}

#[test]
fn word_counts_do_not_shrink() {
    for spec in [sqrt_map(), LorenzMapSpec::uniform(AdmissiblePair::new(1.3, 0.5).unwrap())] {
        let crit = critical_itineraries(&spec, 30).unwrap();
        let counts: Vec<u64> = (1..=16).map(|n| count_words(&crit, n).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
        assert_eq!(counts[0], 2);
    }
}

#[test]
fn markov_and_bisection_agree_on_sqrt_map() {
    let r = estimate_entropy(&sqrt_map(), 1e-6, 1000).unwrap();
    assert!(r.contains_log(GOLDEN_LOG));
    assert!((r.log_estimate - GOLDEN_LOG).abs() < 1e-6);
}

#[test]
fn permutation_matrices_have_radius_one() {
    let perm =
        vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0]];
    assert!((spectral_radius(&perm, 1e-12).unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn parry_reference_increases_with_slope() {
    let values: Vec<f64> =
        (1..100).map(|i| parry_reference(&AdmissiblePair::new(1.0 + f64::from(i) / 100.0, 0.5).unwrap())).collect();
    assert!(values.windows(2).all(|w| w[0] < w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn realized_itineraries_are_never_rejected(ua in 0.0..1.0f64, up in 0.0..1.0f64, x in 0.0..1.0f64, upper: bool) {
        let pair = pair_from_unit(ua, up, 1.05, 1.95);
        let o = orientation(upper);
        let spec = LorenzMapSpec::uniform(pair).with_orientation(o);
        let crit = critical_itineraries(&spec, 40).unwrap();
        let word = itinerary(&pair, o, x, 14).unwrap();
        prop_assert_ne!(hs_member(&word, &crit, o), Membership::Rejected);
    }

    #[test]
    fn bisection_brackets_uniform_entropy(ua in 0.0..1.0f64, up in 0.0..1.0f64) {
        let pair = pair_from_unit(ua, up, 1.1, 1.95);
        let spec = LorenzMapSpec::uniform(pair);
        let r = estimate_entropy(&spec, 1e-4, 1000).unwrap();
        prop_assert!(r.undetermined_total > 0 || r.contains_log(parry_reference(&pair)),
            "a = {}, p = {}: [{}, {}]", pair.a(), pair.p(), r.log_lo, r.log_hi);
    }
}
