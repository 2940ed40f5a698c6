//! Manufactured-solution convergence study.
//!
//! The exact solution is `u = ε e^{−t} b(x)` with `b` the configured bump.
//! Since `∂ₜ²u + ∂ₜu = 0`, it solves the linear problem with forcing
//! `g = −ε e^{−t} Δb`.

use std::sync::Arc;

use super::{invalid, DampingScheme, InitialProfile, NonlinearitySpec, SimConfig, Solver, SolverError};
use crate::experiments::linear_fit;
use crate::grid::Geometry;

/// Max-norm error at one resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsLevel {
    pub h: f64,
    pub tau: f64,
    pub error: f64,
}

/// `exp(1 − 1/(1−s²))` and its first two derivatives in `s`.
fn bump_derivatives(s: f64) -> (f64, f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let q = 1.0 - s * s;
    let phi = (1.0 - 1.0 / q).exp();
    let d1 = -2.0 * s / (q * q) * phi;
    let d2 = phi * (4.0 * s * s / q.powi(4) - 2.0 / (q * q) - 8.0 * s * s / q.powi(3));
    (phi, d1, d2)
}

fn bump_laplacian(x: f64, center: f64, radius: f64, geometry: Geometry, dim: usize) -> f64 {
    let (_, d1, d2) = bump_derivatives((x - center) / radius);
    let (b1, b2) = (d1 / radius, d2 / (radius * radius));
    match geometry {
        Geometry::FullLine => b2,
        Geometry::RadialExterior { .. } => b2 + (dim as f64 - 1.0) / x * b1,
    }
}

/// Errors at `levels` successive halvings of `(h, τ)`, starting from the
/// configured resolution and ending at `config.t_max`.
pub fn mms_errors(config: &SimConfig, levels: usize, damping: DampingScheme) -> Result<Vec<MmsLevel>, SolverError> {
    let InitialProfile::Bump { center, radius } = config.initial_data.profile else {
        return Err(invalid("manufactured solution needs a bump profile"));
    };
    let eps = config.initial_data.epsilon;
    if eps == 0.0 {
        return Err(invalid("manufactured solution needs a nonzero amplitude"));
    }
    let (geometry, dim) = (config.domain.geometry, config.domain.dim);
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let mut c = config.clone();
        let scale = 0.5_f64.powi(k as i32);
        c.domain.h *= scale;
        c.tau *= scale;
        c.nonlinearity = NonlinearitySpec::zero();
        c.initial_data.u1_factor = -1.0;
        let forcing = Arc::new(move |x: f64, t: f64| -eps * (-t).exp() * bump_laplacian(x, center, radius, geometry, dim));
        let mut solver = Solver::new(c.clone())?.with_forcing(forcing).with_damping(damping);
        let mut state = solver.initial_state();
        let steps = (c.t_max / c.tau).round() as usize;
        for _ in 0..steps {
            solver.advance(&mut state)?;
        }
        let t = state.t;
        let grid = solver.grid();
        let error = grid
            .x
            .iter()
            .zip(&state.u)
            .map(|(&x, &u)| (u - eps * (-t).exp() * bump_derivatives((x - center) / radius).0).abs())
            .fold(0.0, f64::max);
        out.push(MmsLevel {
            h: c.domain.h,
            tau: c.tau,
            error,
        });
    }
    Ok(out)
}

/// Observed order: least-squares slope of `log error` against `log h`.
pub fn convergence_order(config: &SimConfig, levels: usize) -> Result<f64, SolverError> {
    convergence_order_with(config, levels, DampingScheme::Centered)
}

pub fn convergence_order_with(config: &SimConfig, levels: usize, damping: DampingScheme) -> Result<f64, SolverError> {
    if levels < 3 {
        return Err(invalid("convergence study needs at least 3 levels"));
    }
    let errs = mms_errors(config, levels, damping)?;
    let xs: Vec<f64> = errs.iter().map(|l| l.h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|l| l.error.ln()).collect();
    Ok(linear_fit(&xs, &ys).slope)
}
