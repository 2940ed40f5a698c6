use dampwave_core::experiments::{standard_config, Discretization};
use dampwave_core::solver::*;
use dampwave_core::weights::WeightParams;
use proptest::prelude::*;

fn bump(dim: usize, radius: f64, epsilon: f64, nonlinearity: NonlinearitySpec, h: f64, t_max: f64) -> SimConfig {
    let center = if dim == 1 { 0.0 } else { radius + 2.0 };
    let data = InitialData {
        profile: InitialProfile::Bump { center, radius },
        epsilon,
        u1_factor: 0.0,
    };
    let disc = Discretization {
        h,
        tau: h / 2.0,
        t_max,
        report_every: 1.0,
    };
    standard_config(dim, WeightParams::new(dim, 0.0, 1.0).unwrap(), nonlinearity, data, disc).unwrap()
}

fn blowup_time(config: &SimConfig) -> f64 {
    let options = RunOptions {
        reports: false,
        refine_on_blowup: false,
        ..RunOptions::default()
    };
    run_with(config, options).unwrap().1.t_blowup
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn even_data_stay_even(radius in 1.0..4.0f64, eps in 0.1..1.5f64, p in 1.5..5.0f64, u1 in -1.0..1.0f64) {
        let mut c = bump(1, radius, eps, NonlinearitySpec::new(NonlinearityKind::OddPower, p), 0.05, 10.0);
        c.initial_data.u1_factor = u1;
        let mut solver = Solver::new(c.clone()).unwrap();
        let mut state = solver.initial_state();
        let n = solver.grid().len();
        for _ in 0..400 {
            if solver.advance(&mut state).is_err() {
                break;
            }
            for i in 0..n / 2 {
                let (a, b) = (state.u[i], state.u[n - 1 - i]);
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "t = {} x = {}", state.t, solver.grid().x[i]);
            }
        }
    }

    #[test]
    fn larger_amplitude_blows_up_sooner(dim in 1usize..=3, eps in 0.8..1.5f64, ratio in 1.1..2.0f64) {
        let p = if dim == 3 { 3.0 } else { 2.5 };
        let nl = NonlinearitySpec::new(NonlinearityKind::AbsolutePower, p);
        let small = blowup_time(&bump(dim, 2.0, eps, nl, 0.1, 40.0));
        let large = blowup_time(&bump(dim, 2.0, ratio * eps, nl, 0.1, 40.0));
        prop_assert!(small.is_finite(), "no blowup at ε = {eps}");
        prop_assert!(large <= small, "T({}) = {large} > T({eps}) = {small}", ratio * eps);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn nothing_outruns_the_light_cone(dim in 1usize..=3, radius in 10.0..14.0f64, t_max in 2.0..5.0f64) {
        let c = bump(dim, radius, 1.0, NonlinearitySpec::zero(), 0.02, t_max);
        let leak = propagation_leak(&c, 2.0 * c.domain.h).unwrap();
        prop_assert!(leak <= 1e-13, "leak {leak:e}");
    }
}

#[test]
fn zero_data_stay_zero() {
    let c = bump(2, 2.0, 0.0, NonlinearitySpec::new(NonlinearityKind::AbsolutePower, 2.0), 0.1, 5.0);
    let mut sim = Simulation::new(c, RunOptions::default()).unwrap();
    sim.advance_to(5.0).unwrap();
    assert!(sim.state().u.iter().all(|&v| v == 0.0));
}
