use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use dampwave_core::weights::*;
use proptest::prelude::*;

fn params(dim: usize, t0: f64) -> WeightParams {
    WeightParams::new(dim, 0.0, t0).unwrap()
}

/// `(dim, β)` pairs with `β < N/2`.
fn family() -> impl Strategy<Value = (usize, f64)> {
    (1usize..=3).prop_flat_map(|dim| (Just(dim), 0.0..(0.999 * dim as f64 / 2.0)))
}

fn certified(dim: usize, beta: f64) -> WeightBounds {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), WeightBounds>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    *cache
        .lock()
        .unwrap()
        .entry((dim, beta.to_bits()))
        .or_insert_with(|| certify_bounds(beta, &params(dim, 1.0), &BoundSampler::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn self_similarity((dim, beta) in family(), r in 0.0..100.0f64, t in 0.0..100.0f64, t0 in 1.0..10.0f64, s in 0.1..10.0f64) {
        let big_t = t0 + t;
        let base = big_t.powf(beta) * phi_beta_radial(r, t, beta, &params(dim, t0)).unwrap();
        // Same T split differently between t₀ and t.
        let split = phi_beta_radial(r, big_t - 1.0, beta, &params(dim, 1.0)).unwrap() * big_t.powf(beta);
        // Parabolic rescaling (x, T) → (s x, s² T).
        let t2 = s * s * big_t - t0;
        prop_assume!(t2 >= 0.0);
        let scaled = (s * s * big_t).powf(beta) * phi_beta_radial(s * r, t2, beta, &params(dim, t0)).unwrap();
        prop_assert!((split - base).abs() <= 1e-12 * base.abs());
        prop_assert!((scaled - base).abs() <= 1e-12 * base.abs(), "{scaled} vs {base}");
    }

    #[test]
    fn heat_residual((dim, beta) in family(), lr in -2.0..3.0f64, lt in -2.0..3.0f64, t0 in 1.0..10.0f64) {
        let (r, t) = (10f64.powf(lr), 10f64.powf(lt));
        let p = params(dim, t0);
        let phi = phi_beta_radial(r, t, beta, &p).unwrap();
        let (dt, lap, _) = phi_beta_derivatives_radial(r, t, beta, &p).unwrap();
        prop_assert!((dt - lap).abs() <= 1e-8 * phi.abs(), "{dt} vs {lap}");
    }

    #[test]
    fn two_sided_bound(dim in 1usize..=3, k in 0usize..4, lr in -2.0..4.0f64, lt in -2.0..4.0f64, t0 in prop::sample::select(vec![1.0, 10.0])) {
        let beta = [0.0, 0.3, 0.6, 0.9][k] * dim as f64 / 2.0;
        let b = certified(dim, beta);
        let (r, t) = (10f64.powf(lr), 10f64.powf(lt));
        let p = params(dim, t0);
        let v = phi_beta_radial(r, t, beta, &p).unwrap() * psi_radial(r, t, &p).powf(beta);
        prop_assert!(b.c_hat > 0.0);
        // The sampler reaches |x|, t = 1e4 on a log grid; values in between
        // may dip below the sampled minimum only by interpolation error.
        prop_assert!(v >= b.c_hat * (1.0 - 1e-6) && v <= b.C_hat * (1.0 + 1e-6), "{} <= {v} <= {}", b.c_hat, b.C_hat);
    }

    #[test]
    fn modified_line_weight(lambda in 0.0..0.49f64, x in -200.0..200.0f64, lt in -3.0..3.0f64, t0 in 1.0..5.0f64) {
        let p = WeightParams::new(1, lambda, t0).unwrap();
        let t = 10f64.powf(lt);
        let phi = phi_beta(&[x], t, p.beta, &p).unwrap();
        let tilde = phi_tilde_1d(&[x], t, &p).unwrap();
        prop_assert!(tilde >= phi && tilde <= 2.0 * phi);
        let m = phi_tilde_margins(&[x], t, &p).unwrap();
        prop_assert!(m.half_t0_plus_t >= -1e-9 * phi, "{m:?}");
    }
}

#[test]
fn modified_line_weight_fails_with_full_denominator() {
    // With 1/(1+t)² in place of 1/(2(t₀+t)²) the inequality is off by
    // exactly Φ_β(1/(t₀+t)² − (2 − 1/(t₀+t))/(1+t)²) < 0 at t₀ = 1, t > 0.
    let p = WeightParams::new(1, 0.3, 1.0).unwrap();
    for t in [0.1, 1.0, 10.0, 100.0] {
        let m = phi_tilde_margins(&[3.0], t, &p).unwrap();
        assert!(m.one_plus_t < 0.0 && m.t0_plus_t < 0.0 && m.half_t0_plus_t >= 0.0, "{m:?}");
    }
}
