use std::sync::Arc;

use super::{SimConfig, SolverError};
use crate::grid::Grid;

/// Source term `g(x, t)` added to the right-hand side.
pub type Forcing = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Discretization of the damping term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DampingScheme {
    /// `(uⁿ⁺¹ − uⁿ⁻¹)/(2τ)`, second order.
    #[default]
    Centered,
    /// `(uⁿ⁺¹ − uⁿ)/τ`, first order. Only kept to show that centering matters.
    Uncentered,
}

/// Two consecutive time levels of the discrete solution.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Time of `u`, always `step · tau`.
    pub t: f64,
    pub u: Vec<f64>,
    /// Level `t − τ`. At step 0 this is a ghost level chosen so that the
    /// centered update reproduces the Taylor start
    /// `u¹ = u₀ + τu₁ + τ²/2 (Δu₀ − u₁ + f(u₀) + g)`.
    pub u_prev: Vec<f64>,
    pub tau: f64,
    pub step: usize,
    /// Nodes outside `active.0..active.1` are exactly zero in both levels.
    pub active: (usize, usize),
}

impl FieldState {
    pub fn sup_norm(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Explicit stepper for one configuration.
pub struct Solver {
    config: SimConfig,
    grid: Grid,
    forcing: Option<Forcing>,
    damping: DampingScheme,
    rhs: Vec<f64>,
    spare: Vec<f64>,
}

impl Solver {
    pub fn new(config: SimConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let grid = config.domain.grid();
        let n = grid.len();
        Ok(Self {
            config,
            grid,
            forcing: None,
            damping: DampingScheme::Centered,
            rhs: vec![0.0; n],
            spare: vec![0.0; n],
        })
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_damping(mut self, damping: DampingScheme) -> Self {
        self.damping = damping;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    fn forcing_at(&self, i: usize, t: f64) -> f64 {
        match &self.forcing {
            Some(g) => g(self.grid.x[i], t),
            None => 0.0,
        }
    }

    /// Level 0 from the configured initial data.
    pub fn initial_state(&self) -> FieldState {
        let geom = self.grid.geometry;
        let data = &self.config.initial_data;
        let n = self.grid.len();
        let dim = self.config.domain.dim;
        let mut u0: Vec<f64> = self.grid.x.iter().map(|&x| data.u0(x, geom, dim)).collect();
        let mut u1: Vec<f64> = self.grid.x.iter().map(|&x| data.u1(x, geom, dim)).collect();
        for v in [&mut u0, &mut u1] {
            v[0] = 0.0;
            v[n - 1] = 0.0;
        }
        self.state_from(u0, u1)
    }

    /// Level 0 from explicit `(u₀, u₁)` grid functions.
    pub fn state_from(&self, u0: Vec<f64>, u1: Vec<f64>) -> FieldState {
        let n = self.grid.len();
        let tau = self.config.tau;
        let nl = &self.config.nonlinearity;
        let mut lap = vec![0.0; n];
        self.grid.laplacian(&u0, &mut lap);
        let mut ghost = vec![0.0; n];
        for i in 1..n - 1 {
            let accel = lap[i] - u1[i] + nl.f(u0[i]) + self.forcing_at(i, 0.0);
            ghost[i] = u0[i] - tau * u1[i] + 0.5 * tau * tau * accel;
        }
        let active = if self.forcing.is_some() {
            (1, n - 1)
        } else {
            let nz = |i: &usize| u0[*i] != 0.0 || ghost[*i] != 0.0;
            match ((0..n).find(nz), (0..n).rev().find(nz)) {
                (Some(lo), Some(hi)) => (lo.max(1), (hi + 1).min(n - 1)),
                _ => (1, 1),
            }
        };
        FieldState {
            t: 0.0,
            u: u0,
            u_prev: ghost,
            tau,
            step: 0,
            active,
        }
    }

    /// Advances `state` by one step in place.
    ///
    /// On blowup the state is left at the last good level.
    pub fn advance(&mut self, state: &mut FieldState) -> Result<(), SolverError> {
        let n = self.grid.len();
        let tau = self.config.tau;
        if state.step == 0 {
            self.spare.iter_mut().for_each(|v| *v = 0.0);
        }
        let (lo, hi) = if self.forcing.is_some() {
            (1, n - 1)
        } else {
            (state.active.0.saturating_sub(1).max(1), (state.active.1 + 1).min(n - 1))
        };
        if lo >= hi {
            // Identically zero solution.
            state.step += 1;
            state.t = state.step as f64 * tau;
            return Ok(());
        }
        self.grid.laplacian_range(&state.u, &mut self.rhs, lo, hi);
        let nl = self.config.nonlinearity;
        let t = state.t;
        let tau2 = tau * tau;
        let threshold = self.config.blowup_threshold;
        let mut worst = 0.0_f64;
        let mut finite = true;
        for i in lo..hi {
            let (u, up) = (state.u[i], state.u_prev[i]);
            let accel = self.rhs[i] + nl.f(u) + self.forcing_at(i, t);
            let next = match self.damping {
                DampingScheme::Centered => {
                    (2.0 * u - (1.0 - 0.5 * tau) * up + tau2 * accel) / (1.0 + 0.5 * tau)
                }
                DampingScheme::Uncentered => ((2.0 + tau) * u - up + tau2 * accel) / (1.0 + tau),
            };
            finite &= next.is_finite();
            worst = worst.max(next.abs());
            self.spare[i] = next;
        }
        let t_next = (state.step + 1) as f64 * tau;
        if !finite || worst > threshold {
            return Err(SolverError::BlowupDetected { t: t_next });
        }
        // (u_prev, u, spare) <- (u, new, u_prev)
        std::mem::swap(&mut state.u_prev, &mut self.spare);
        std::mem::swap(&mut state.u, &mut state.u_prev);
        state.step += 1;
        state.t = t_next;
        state.active = (lo, hi);
        Ok(())
    }

    /// Pure form of [`Solver::advance`].
    pub fn step(&mut self, state: &FieldState) -> Result<FieldState, SolverError> {
        let mut next = state.clone();
        // The spare buffer must be zero outside the active range.
        self.spare.copy_from_slice(&state.u_prev);
        self.advance(&mut next)?;
        Ok(next)
    }

    /// Level `t − 2τ`, valid right after [`Solver::advance`] returned `Ok`.
    ///
    /// Together with `state.u` it gives the centered time derivative
    /// `(uⁿ⁺¹ − uⁿ⁻¹)/(2τ)` at the time of `state.u_prev`.
    pub fn older_level(&self) -> &[f64] {
        &self.spare
    }
}
