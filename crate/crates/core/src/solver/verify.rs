//! Scheme checks that need no exact solution: the linear energy identity
//! and finite propagation speed.

use super::{invalid, RunOptions, SimConfig, Simulation, Solver, SolverError};
use crate::experiments::linear_fit;
use crate::weights::WeightParams;

/// Relative defect of the linear energy identity
///
/// ```text
/// E(t) + 2∫₀ᵗ ∫|∂ₜu|² ds = E(0),   E = ∫(|∇u|² + |∂ₜu|²)
/// ```
///
/// maximized over all steps up to `config.t_max`. The nonlinearity is
/// dropped. Quadrature, centered `∂ₜu` and the trapezoid in time are all
/// second order, so the defect falls like `h²` with `τ ∝ h`.
pub fn energy_identity_defect(config: &SimConfig) -> Result<f64, SolverError> {
    let mut c = config.clone();
    c.nonlinearity = super::NonlinearitySpec::zero();
    c.weight = WeightParams::new(c.domain.dim, 0.0, c.weight.t0).map_err(|e| invalid(e.to_string()))?;
    c.output_stride = 1;
    let mut sim = Simulation::new(c.clone(), RunOptions::default())?;
    sim.advance_to(c.t_max)?;
    let reports = sim.reports();
    let e0 = reports.first().map(|r| r.energy).unwrap_or(0.0);
    if !(e0 > 0.0) {
        return Err(invalid("energy identity needs nonzero data"));
    }
    let tau = c.tau;
    let (mut dissipated, mut worst) = (0.0, 0.0_f64);
    for w in reports.windows(2) {
        dissipated += tau * (w[0].theorem_weights.ut + w[1].theorem_weights.ut);
        worst = worst.max((w[1].energy + dissipated - e0).abs());
    }
    Ok(worst / e0)
}

/// Least-squares slope of `log defect` against `log h` over `levels`
/// successive halvings of `(h, τ)`.
pub fn energy_identity_order(config: &SimConfig, levels: usize) -> Result<f64, SolverError> {
    if levels < 3 {
        return Err(invalid("convergence study needs at least 3 levels"));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in 0..levels {
        let mut c = config.clone();
        let scale = 0.5_f64.powi(k as i32);
        c.domain.h *= scale;
        c.tau *= scale;
        xs.push(c.domain.h.ln());
        ys.push(energy_identity_defect(&c)?.ln());
    }
    Ok(linear_fit(&xs, &ys).slope)
}

/// Largest `|u|` found more than `margin` beyond the cone
/// `|x| ≤ R + t` of the initial support, over all steps to `t_max`.
pub fn propagation_leak(config: &SimConfig, margin: f64) -> Result<f64, SolverError> {
    let mut solver = Solver::new(config.clone())?;
    let mut state = solver.initial_state();
    let r0 = config.initial_data.support_radius();
    let steps = (config.t_max / config.tau).round() as usize;
    let grid = solver.grid().clone();
    let mut worst = 0.0_f64;
    for _ in 0..steps {
        solver.advance(&mut state)?;
        let reach = r0 + state.t + margin;
        for (i, u) in state.u.iter().enumerate() {
            if grid.radius(i) > reach {
                worst = worst.max(u.abs());
            }
        }
    }
    Ok(worst)
}
