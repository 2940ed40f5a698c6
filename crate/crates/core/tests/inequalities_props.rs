use dampwave_core::inequalities::*;
use dampwave_core::weights::WeightParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // On the line K(λ) > 0 needs λ > 1/2, outside the weight range.
    #[test]
    fn hardy_holds(seed in 0u64..1_000_000, dim in 2usize..=3, frac in 0.0..1.0f64, lt in -1.0..3.0f64, t0 in 1.0..10.0f64) {
        let lambda = frac * dim as f64 / 2.0;
        let params = WeightParams::new(dim, 0.0, t0).unwrap();
        let ratio = hardy_check(&TestFunctionSpec::random(seed, dim), lambda, 10f64.powf(lt), &params);
        prop_assert!(ratio.is_ok(), "{ratio:?}");
    }

    #[test]
    fn ibp_holds(seed in 0u64..1_000_000, dim in 1usize..=3, frac in 0.05..0.95f64, lt in -1.0..3.0f64) {
        let lambda = frac * dim as f64 / 2.0;
        let params = WeightParams::new(dim, lambda, 1.0).unwrap();
        let spec = TestFunctionSpec::random(seed, dim);
        let r = ibp_check(&spec, params.beta, params.delta, 10f64.powf(lt), &params);
        prop_assert!(r.is_ok(), "{r:?}");
    }

    #[test]
    fn gn_ratio_is_dilation_invariant(seed in 0u64..1_000_000, dim in 1usize..=3, p in 1.5..3.0f64, mu in 0.5..2.0f64) {
        let spec = TestFunctionSpec::random(seed, dim);
        if let (Some(a), Some(b)) = (gn_ratio_dilated(&spec, p, 1.0), gn_ratio_dilated(&spec, p, mu)) {
            prop_assert!((a - b).abs() <= GN_DILATION_TOL * a, "{a} vs {b}");
        }
    }
}

#[test]
fn suites_are_deterministic() {
    let params = WeightParams::new(3, 1.0, 1.0).unwrap();
    let a = hardy_suite(3, 1.0, 2.0, &params, 40, 11).unwrap();
    let b = hardy_suite(3, 1.0, 2.0, &params, 40, 11).unwrap();
    assert_eq!(a.extras["max_ratio"].to_bits(), b.extras["max_ratio"].to_bits());
    let c = estimate_c_gn(2, 3.0, 40, 11).unwrap();
    let d = estimate_c_gn(2, 3.0, 40, 11).unwrap();
    assert_eq!(c.value.to_bits(), d.value.to_bits());
}

#[test]
fn gn_estimate_never_drops_with_more_trials() {
    for dim in 1..=3 {
        let mut last = 0.0;
        for trials in [5, 10, 20, 40, 80] {
            let est = estimate_c_gn(dim, 3.0, trials, 7).unwrap();
            assert!(est.value >= last, "N={dim}: {} < {last} at {trials} trials", est.value);
            last = est.value;
        }
    }
}

#[test]
fn out_of_range_exponent_is_rejected() {
    assert!(estimate_c_gn(3, 5.5, 10, 0).is_err());
    assert!(estimate_c_gn(1, 1.0, 10, 0).is_err());
    assert!(estimate_c_gn(2, 3.0, 0, 0).is_err());
}
