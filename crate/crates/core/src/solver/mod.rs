//! Finite-difference integration of `∂ₜ²u − Δu + ∂ₜu = f(u)`.
//!
//! The scheme is the explicit three-level update
//!
//! ```text
//! (uⁿ⁺¹ − 2uⁿ + uⁿ⁻¹)/τ² − Δ_h uⁿ + (uⁿ⁺¹ − uⁿ⁻¹)/(2τ) = f(uⁿ) + gⁿ
//! ```
//!
//! with homogeneous Dirichlet rows at both ends of the grid. The outer
//! boundary is placed beyond the light cone of the data, so it never
//! influences the solution.

mod data;
mod mms;
mod run;
mod scheme;
mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Geometry, Grid};
use crate::weights::WeightParams;

pub use data::{smooth_step, InitialData, InitialProfile};
pub use mms::{convergence_order, convergence_order_with, mms_errors, MmsLevel};
pub use run::{run, run_with, LifespanRecord, RunOptions, Simulation};
pub use scheme::{DampingScheme, FieldState, Forcing, Solver};
pub use verify::{energy_identity_defect, energy_identity_order, propagation_leak};

/// Default sup-norm threshold used as the numerical blowup criterion.
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("blowup detected at t = {t}")]
    BlowupDetected { t: f64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Report(#[from] crate::functionals::ReportError),
}

fn invalid(msg: impl Into<String>) -> SolverError {
    SolverError::ConfigInvalid(msg.into())
}

/// Spatial domain and resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dim: usize,
    pub geometry: Geometry,
    /// Half-width on the line, outer radius otherwise.
    pub r_outer: f64,
    pub h: f64,
}

impl DomainSpec {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(invalid(format!("grid spacing h = {} must be positive", self.h)));
        }
        match self.geometry {
            Geometry::FullLine => {
                if self.dim != 1 {
                    return Err(invalid(format!("full_line requires dim = 1, got {}", self.dim)));
                }
                if !(self.r_outer > 10.0 * self.h) {
                    return Err(invalid("full_line half-width must exceed 10 h"));
                }
            }
            Geometry::RadialExterior { r_in } => {
                if self.dim == 0 {
                    return Err(invalid("dim must be at least 1"));
                }
                if !(r_in > 0.0) {
                    return Err(invalid(format!("radial_exterior requires r_in > 0, got {r_in}")));
                }
                if !(self.r_outer > r_in + 10.0 * self.h) {
                    return Err(invalid(format!(
                        "r_outer = {} must exceed r_in + 10 h = {}",
                        self.r_outer,
                        r_in + 10.0 * self.h
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.dim, self.geometry, self.r_outer, self.h)
    }

    /// Smallest `|x|` in the domain.
    pub fn inner_radius(&self) -> f64 {
        match self.geometry {
            Geometry::FullLine => 0.0,
            Geometry::RadialExterior { r_in } => r_in,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    /// `f(u) = |u|^{p−1} u`.
    OddPower,
    /// `f(u) = |u|^p`.
    AbsolutePower,
    Zero,
}

/// Power nonlinearity together with its primitive `F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub kind: NonlinearityKind,
    pub p: f64,
    /// Constant in `|f(ξ) − f(η)| ≤ C_f (|ξ| + |η|)^{p−1} |ξ − η|`; `p` works
    /// for both power kinds.
    pub c_f: f64,
}

impl NonlinearitySpec {
    pub fn new(kind: NonlinearityKind, p: f64) -> Self {
        Self { kind, p, c_f: p }
    }

    pub fn zero() -> Self {
        Self::new(NonlinearityKind::Zero, 2.0)
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::OddPower => u.abs().powf(self.p - 1.0) * u,
            NonlinearityKind::AbsolutePower => u.abs().powf(self.p),
            NonlinearityKind::Zero => 0.0,
        }
    }

    /// `F(ξ) = ∫₀^ξ f`.
    #[inline]
    pub fn primitive(&self, u: f64) -> f64 {
        let q = self.p + 1.0;
        match self.kind {
            NonlinearityKind::OddPower => u.abs().powf(q) / q,
            NonlinearityKind::AbsolutePower => u.signum() * u.abs().powf(q) / q,
            NonlinearityKind::Zero => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.kind == NonlinearityKind::Zero
    }
}

/// Everything needed for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub domain: DomainSpec,
    pub nonlinearity: NonlinearitySpec,
    pub weight: WeightParams,
    pub initial_data: InitialData,
    pub tau: f64,
    pub t_max: f64,
    pub blowup_threshold: f64,
    /// Steps between emitted reports.
    pub output_stride: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let d = &self.domain;
        d.validate()?;
        if self.weight.dim != d.dim {
            return Err(invalid(format!(
                "weight dim {} does not match domain dim {}",
                self.weight.dim, d.dim
            )));
        }
        if !(self.tau > 0.0) {
            return Err(invalid(format!("tau = {} must be positive", self.tau)));
        }
        if self.tau > 0.5 * d.h * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "CFL violated: tau = {} > 0.5 h = {}",
                self.tau,
                0.5 * d.h
            )));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(invalid(format!("t_max = {} must be positive", self.t_max)));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(invalid("blowup_threshold must be positive"));
        }
        if self.output_stride == 0 {
            return Err(invalid("output_stride must be at least 1"));
        }
        let nl = &self.nonlinearity;
        if !nl.is_zero() {
            if !(nl.p > 1.0) || !nl.p.is_finite() {
                return Err(invalid(format!("p = {} must exceed 1", nl.p)));
            }
            if d.dim >= 3 {
                let cap = d.dim as f64 / (d.dim as f64 - 2.0);
                if nl.p > cap * (1.0 + 1e-12) {
                    return Err(invalid(format!("p = {} exceeds N/(N-2) = {cap}", nl.p)));
                }
            }
        }
        self.initial_data.validate(d)?;
        let reach = self.initial_data.support_radius() + self.t_max + 5.0 * d.h;
        if d.r_outer < reach {
            return Err(invalid(format!(
                "truncation radius {} below support + t_max + 5h = {reach}",
                d.r_outer
            )));
        }
        Ok(())
    }

    /// Smallest admissible truncation radius for the given data and horizon.
    pub fn required_r_outer(data: &InitialData, t_max: f64, h: f64) -> f64 {
        data.support_radius() + t_max + 5.0 * h
    }

    /// Same configuration at half the grid spacing and time step.
    pub fn refined(&self) -> Self {
        let mut c = self.clone();
        c.domain.h *= 0.5;
        c.tau *= 0.5;
        c.output_stride *= 2;
        c
    }

    /// Report interval in time units.
    pub fn report_interval(&self) -> f64 {
        self.output_stride as f64 * self.tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line_config(p: f64) -> SimConfig {
        let data = InitialData {
            profile: InitialProfile::Bump { center: 0.0, radius: 2.0 },
            epsilon: 0.5,
            u1_factor: 0.0,
        };
        SimConfig {
            domain: DomainSpec {
                dim: 1,
                geometry: Geometry::FullLine,
                r_outer: 20.0,
                h: 0.05,
            },
            nonlinearity: NonlinearitySpec::new(NonlinearityKind::OddPower, p),
            weight: WeightParams::new(1, 0.0, 1.0).unwrap(),
            initial_data: data,
            tau: 0.025,
            t_max: 10.0,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            output_stride: 40,
        }
    }

    #[test]
    fn primitives() {
        let odd = NonlinearitySpec::new(NonlinearityKind::OddPower, 3.0);
        assert_eq!(odd.f(-2.0), -8.0);
        assert_eq!(odd.primitive(-2.0), 4.0);
        let abs = NonlinearitySpec::new(NonlinearityKind::AbsolutePower, 2.0);
        assert_eq!(abs.f(-2.0), 4.0);
        assert!((abs.primitive(-2.0) + 8.0 / 3.0).abs() < 1e-15);
        for nl in [odd, abs] {
            assert_eq!(nl.f(0.0), 0.0);
            // F' = f by centered differences
            let (u, e) = (0.7, 1e-6);
            let d = (nl.primitive(u + e) - nl.primitive(u - e)) / (2.0 * e);
            assert!((d - nl.f(u)).abs() < 1e-8);
        }
    }

    #[test]
    fn validation_rules() {
        let c = line_config(3.0);
        c.validate().unwrap();

        let mut bad = c.clone();
        bad.tau = bad.domain.h;
        assert!(matches!(bad.validate(), Err(SolverError::ConfigInvalid(m)) if m.contains("CFL")));

        let mut bad = c.clone();
        bad.domain.r_outer = 10.0;
        assert!(bad.validate().is_err());

        let mut bad = c.clone();
        bad.nonlinearity.p = 1.0;
        assert!(bad.validate().is_err());

        let mut bad = c.clone();
        bad.domain.geometry = Geometry::RadialExterior { r_in: 0.0 };
        assert!(bad.validate().is_err());

        let mut bad = c;
        bad.domain.dim = 3;
        bad.weight = WeightParams::new(3, 0.0, 1.0).unwrap();
        bad.domain.geometry = Geometry::RadialExterior { r_in: 1.0 };
        bad.initial_data.profile = InitialProfile::Bump { center: 4.0, radius: 2.0 };
        bad.nonlinearity.p = 3.5;
        assert!(bad.validate().is_err());
        bad.nonlinearity.p = 3.0;
        bad.validate().unwrap();
    }
}
