use dampwave_core::experiments::*;
use dampwave_core::functionals::EnergyReport;
use proptest::prelude::*;

fn series(amplitude: f64, slope: f64, times: impl Iterator<Item = f64>) -> Vec<EnergyReport> {
    times
        .map(|t| EnergyReport {
            t,
            l2: amplitude * (1.0 + t).powf(slope),
            ..Default::default()
        })
        .collect()
}

fn scan(verdicts: Vec<ScanVerdict>) -> DichotomyScan {
    let n = verdicts.len();
    DichotomyScan {
        dim: 2,
        lambda: 0.5,
        epsilon: 0.1,
        p_values: (0..n).map(|i| 1.2 + 0.1 * i as f64).collect(),
        verdicts,
        max_m_lambda: vec![1.0; n],
        initial_m_lambda: vec![1.0; n],
        t_blowup: vec![f64::INFINITY; n],
        p_c: 2.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn exact_power_law_is_recovered(amp in 1e-6..1e6f64, slope in -3.0..1.0f64, lo in 0.0..50.0f64, span in 20.0..500.0f64) {
        let s = series(amp, slope, (0..400).map(|k| k as f64 * 2.0));
        let fit = fit_decay(&s, "l2", (lo, lo + span)).unwrap();
        prop_assert!((fit.slope - slope).abs() <= 1e-6, "{} vs {slope}", fit.slope);
        prop_assert!((fit.intercept - amp.ln()).abs() <= 1e-6);
        prop_assert!(fit.r_squared >= 1.0 - 1e-9);
    }

    #[test]
    fn blowups_then_survivals_is_monotone(k in 0usize..=8, n in 8usize..12) {
        let v = (0..n).map(|i| if i < k { ScanVerdict::BlewUp } else { ScanVerdict::Survived }).collect();
        prop_assert!(scan(v).is_monotone());
    }

    #[test]
    fn survival_before_blowup_is_not(i in 0usize..10) {
        let mut v = vec![ScanVerdict::BlewUp; 11];
        v[i] = ScanVerdict::Survived;
        let mut s = scan(v);
        prop_assert!(!s.is_monotone());
        // Listing the exponents in reverse order must not change the answer.
        s.p_values.reverse();
        s.verdicts.reverse();
        prop_assert!(!s.is_monotone());
    }

    #[test]
    fn lifespan_exponent_matches_threshold(dim in 1usize..=3, frac in 0.0..0.95f64, p_off in 0.01..0.9f64) {
        // Below p_c the predicted slope is negative and blows up at p_c.
        let lambda = frac * dim as f64 / 2.0;
        let pc = critical_exponent(dim, lambda);
        let p = 1.0 + (pc - 1.0) * (1.0 - p_off);
        prop_assert!(lifespan_exponent(dim, lambda, p) < 0.0);
        prop_assert!(lifespan_exponent(dim, lambda, pc).abs() > 1e12 || (1.0 / lifespan_exponent(dim, lambda, pc)).abs() < 1e-12);
    }
}

#[test]
fn short_window_is_rejected() {
    let s = series(1.0, -1.0, (0..100).map(f64::from));
    assert!(matches!(fit_decay(&s, "l2", (10.0, 15.0)), Err(ExperimentError::InsufficientData(_))));
    assert!(fit_decay(&s, "no_such_quantity", (0.0, 99.0)).is_err());
}
