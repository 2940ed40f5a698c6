use serde::{Deserialize, Deserializer, Serialize};

use super::{DampingScheme, FieldState, SimConfig, Solver, SolverError};
use crate::functionals::{compute_report, EnergyReport, Snapshot};

/// Blowup time of one run together with its resolution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifespanRecord {
    pub epsilon: f64,
    /// `+∞` (serialized as `null`) when the run reached its horizon.
    #[serde(deserialize_with = "null_as_infinity")]
    pub t_blowup: f64,
    pub h: f64,
    pub tau: f64,
    /// `|t − t_refined| / t_refined` from a rerun at `(h/2, τ/2)`.
    pub refined_agreement: Option<f64>,
}

fn null_as_infinity<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

impl LifespanRecord {
    pub fn blew_up(&self) -> bool {
        self.t_blowup.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub reports: bool,
    pub refine_on_blowup: bool,
    pub damping: DampingScheme,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            reports: true,
            refine_on_blowup: true,
            damping: DampingScheme::Centered,
        }
    }
}

/// A run that can be advanced in pieces.
///
/// The report for step `n` is emitted once step `n + 1` exists, so that
/// `∂ₜu` can be reconstructed as `(uⁿ⁺¹ − uⁿ⁻¹)/(2τ)`. Advancing to `T/2`
/// and then to `T` performs exactly the same arithmetic as advancing to `T`.
pub struct Simulation {
    solver: Solver,
    state: FieldState,
    reports: Vec<EnergyReport>,
    emit_reports: bool,
    blowup: Option<f64>,
    ut: Vec<f64>,
}

impl Simulation {
    pub fn new(config: SimConfig, options: RunOptions) -> Result<Self, SolverError> {
        let solver = Solver::new(config)?.with_damping(options.damping);
        let state = solver.initial_state();
        let n = state.u.len();
        Ok(Self {
            solver,
            state,
            reports: Vec::new(),
            emit_reports: options.reports,
            blowup: None,
            ut: vec![0.0; n],
        })
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    pub fn reports(&self) -> &[EnergyReport] {
        &self.reports
    }

    pub fn into_reports(self) -> Vec<EnergyReport> {
        self.reports
    }

    pub fn blowup_time(&self) -> Option<f64> {
        self.blowup
    }

    /// Steps until every report up to time `t_end` has been emitted.
    pub fn advance_to(&mut self, t_end: f64) -> Result<(), SolverError> {
        if let Some(t) = self.blowup {
            return Err(SolverError::BlowupDetected { t });
        }
        let tau = self.state.tau;
        let n_end = (t_end / tau * (1.0 + 1e-12)).floor() as usize;
        let stride = self.solver.config().output_stride;
        while self.state.step <= n_end {
            if let Err(e) = self.solver.advance(&mut self.state) {
                if let SolverError::BlowupDetected { t } = e {
                    self.blowup = Some(t);
                }
                return Err(e);
            }
            let n = self.state.step - 1;
            if self.emit_reports && n % stride == 0 {
                self.emit(n)?;
            }
        }
        Ok(())
    }

    fn emit(&mut self, n: usize) -> Result<(), SolverError> {
        let tau = self.state.tau;
        let older = self.solver.older_level();
        let (lo, hi) = self.state.active;
        self.ut.iter_mut().for_each(|v| *v = 0.0);
        for i in lo..hi {
            self.ut[i] = (self.state.u[i] - older[i]) / (2.0 * tau);
        }
        let snap = Snapshot {
            t: n as f64 * tau,
            u: &self.state.u_prev,
            ut: &self.ut,
        };
        let report = compute_report(&snap, self.solver.grid(), self.solver.config(), self.reports.last())?;
        self.reports.push(report);
        Ok(())
    }
}

/// [`run_with`] using default options.
pub fn run(config: &SimConfig) -> Result<(Vec<EnergyReport>, LifespanRecord), SolverError> {
    run_with(config, RunOptions::default())
}

/// Integrates to `t_max` or blowup.
///
/// On blowup the configuration is rerun once at `(h/2, τ/2)` without reports
/// and the relative difference of the two blowup times is recorded.
pub fn run_with(
    config: &SimConfig,
    options: RunOptions,
) -> Result<(Vec<EnergyReport>, LifespanRecord), SolverError> {
    let mut sim = Simulation::new(config.clone(), options)?;
    let mut record = LifespanRecord {
        epsilon: config.initial_data.epsilon,
        t_blowup: f64::INFINITY,
        h: config.domain.h,
        tau: config.tau,
        refined_agreement: None,
    };
    match sim.advance_to(config.t_max) {
        Ok(()) => {}
        Err(SolverError::BlowupDetected { t }) => {
            record.t_blowup = t;
            if options.refine_on_blowup {
                let fine = RunOptions {
                    reports: false,
                    refine_on_blowup: false,
                    ..options
                };
                let mut refined = Simulation::new(config.refined(), fine)?;
                let t_fine = match refined.advance_to(config.t_max) {
                    Ok(()) => f64::INFINITY,
                    Err(SolverError::BlowupDetected { t }) => t,
                    Err(e) => return Err(e),
                };
                record.refined_agreement = Some(if t_fine.is_finite() {
                    (t - t_fine).abs() / t_fine
                } else {
                    f64::INFINITY
                });
            }
        }
        Err(e) => return Err(e),
    }
    Ok((sim.into_reports(), record))
}
