use dampwave_core::experiments::{standard_config, Discretization};
use dampwave_core::functionals::{compute_report, EnergyReport, Snapshot};
use dampwave_core::grid::Geometry;
use dampwave_core::solver::*;
use dampwave_core::weights::WeightParams;
use proptest::prelude::*;

fn config(dim: usize, lambda: f64, p: f64, t0: f64, t_max: f64) -> SimConfig {
    let center = if dim == 1 { 0.0 } else { 4.0 };
    let data = InitialData {
        profile: InitialProfile::Bump { center, radius: 2.0 },
        epsilon: 0.3,
        u1_factor: -0.5,
    };
    let disc = Discretization {
        h: 0.05,
        tau: 0.025,
        t_max,
        report_every: 0.25,
    };
    let weight = WeightParams::new(dim, lambda, t0).unwrap();
    standard_config(dim, weight, NonlinearitySpec::new(NonlinearityKind::OddPower, p), data, disc).unwrap()
}

fn reports(config: &SimConfig) -> Vec<EnergyReport> {
    run(config).unwrap().0
}

fn lambda_for(dim: usize, frac: f64) -> f64 {
    frac * dim as f64 / 2.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn time_integrals_grow_and_split(dim in 1usize..=3, frac in 0.0..0.95f64, t0 in 1.0..4.0f64) {
        let c = config(dim, lambda_for(dim, frac), 3.0, t0, 8.0);
        let whole = reports(&c);
        for w in whole.windows(2) {
            prop_assert!(w[1].y_lambda >= w[0].y_lambda);
            prop_assert!(w[1].z_lambda >= w[0].z_lambda);
        }
        let mut sim = Simulation::new(c.clone(), RunOptions::default()).unwrap();
        sim.advance_to(4.0).unwrap();
        sim.advance_to(8.0).unwrap();
        let split = sim.reports();
        prop_assert_eq!(split.len(), whole.len());
        for (a, b) in split.iter().zip(&whole) {
            for q in ["y_lambda", "z_lambda", "m_lambda"] {
                let (x, y) = (a.quantity(q).unwrap(), b.quantity(q).unwrap());
                prop_assert!((x - y).abs() <= 1e-10 * y.abs().max(1e-300), "{q} at t = {}", a.t);
            }
        }
    }

    #[test]
    fn unweighted_reduction(dim in 1usize..=3, t0 in 1.0..4.0f64) {
        for r in reports(&config(dim, 0.0, 3.0, t0, 4.0)) {
            let big_t = t0 + r.t;
            prop_assert!((r.e_lambda - big_t * r.energy).abs() <= 1e-12 * r.e_lambda);
            prop_assert!((r.m_lambda - (r.e_lambda + r.l2)).abs() <= 1e-12 * r.m_lambda);
            prop_assert!((r.u2_psi - r.l2).abs() <= 1e-12 * r.l2);
        }
    }

    #[test]
    fn theorem_weights_are_comparable(dim in 1usize..=3, frac in 0.0..0.95f64) {
        // At t₀ = 1, (1 + t + |x|²)/(1 + t + |x|²/4) lies in [1, 4].
        let lambda = lambda_for(dim, frac);
        let top = 4f64.powf(lambda) * (1.0 + 1e-12);
        for r in reports(&config(dim, lambda, 3.0, 1.0, 4.0)) {
            let mass = r.theorem_weights.mass / r.u2_psi;
            let grad = r.theorem_weights.grad / r.grad_psi;
            prop_assert!((1.0 - 1e-12..=top).contains(&mass), "mass ratio {mass}");
            prop_assert!((1.0 - 1e-12..=top).contains(&grad), "gradient ratio {grad}");
        }
    }
}

/// Report of `u = e^{−(r−3)²}`, `uₜ = (r−3)u` on `[1, 12]` at spacing `h`.
fn smooth_report(dim: usize, lambda: f64, h: f64) -> EnergyReport {
    let geometry = Geometry::RadialExterior { r_in: 1.0 };
    let mut c = config(dim, lambda, 3.0, 1.0, 1.0);
    c.domain = DomainSpec {
        dim,
        geometry,
        r_outer: 12.0,
        h,
    };
    let g = c.domain.grid();
    let u: Vec<f64> = g.x.iter().map(|r| (-(r - 3.0) * (r - 3.0)).exp()).collect();
    let ut: Vec<f64> = g.x.iter().zip(&u).map(|(r, v)| (r - 3.0) * v).collect();
    compute_report(&Snapshot { t: 0.5, u: &u, ut: &ut }, &g, &c, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn quadrature_is_second_order(dim in 2usize..=3, frac in 0.0..0.95f64) {
        // The integrands do not vanish at r = 1, so the trapezoid error is h².
        let lambda = lambda_for(dim, frac);
        let q: Vec<EnergyReport> = [0.1, 0.05, 0.025].iter().map(|&h| smooth_report(dim, lambda, h)).collect();
        for name in ["e_lambda", "u2_psi", "e_tilde", "theorem_energy"] {
            let v: Vec<f64> = q.iter().map(|r| r.quantity(name).unwrap()).collect();
            let ratio = (v[0] - v[1]) / (v[1] - v[2]);
            prop_assert!((3.5..=4.5).contains(&ratio), "{name}: ratio {ratio}");
        }
    }
}
