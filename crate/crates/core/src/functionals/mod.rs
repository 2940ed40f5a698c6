//! Weighted energy functionals and runtime monitors.
//!
//! With `T = t₀ + t` and `Ψ = T + |x|²/4`:
//!
//! ```text
//! E_λ = T ∫ (|∇u|² + |∂ₜu|²) Ψ^λ
//! Ẽ_λ = ∫ (2u∂ₜu + u²) Φ_β^{−1+2δ}
//! m_λ = E_λ + ∫ u² Ψ^λ
//! Y_λ = ∫₀ᵗ ∫ |∇u|² Ψ^λ,    Z_λ = ∫₀ᵗ (t₀+s) ∫ |∂ₜu|² Ψ^λ
//! ```
//!
//! All integrals are over the computational domain with trapezoid weights;
//! gradients live on cell midpoints.

mod monitors;

pub use monitors::{
    check_critical_interpolation, check_equivalence, check_lemma32, check_lemma33, check_lemma33_with,
    check_wee, critical_constant, equivalence_t0, proposition_nu, Lemma33Constants, MonitorError,
    MonitorVerdict, VerdictStatus,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::Grid;
use crate::solver::SimConfig;
use crate::weights::{phi_beta_radial, WeightError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error("non-finite integrand for {field} at t = {t}")]
    QuadratureOverflow { t: f64, field: String },
    #[error(transparent)]
    Weight(#[from] WeightError),
}

/// The four quantities of the main weighted estimate, with weight
/// `(1 + t + |x|²)^λ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TheoremWeights {
    /// `∫ (|∇u|² + |∂ₜu|²) w`
    pub energy: f64,
    /// `∫ u² w`
    pub mass: f64,
    pub grad: f64,
    pub ut: f64,
}

/// All functionals at one report time.
///
/// Missing fields deserialize as zero, so partial series (say `t` and one
/// quantity) can be read back for fitting.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyReport {
    /// Schema version.
    pub v: u32,
    pub t: f64,
    pub e_lambda: f64,
    pub e_tilde: f64,
    pub m_lambda: f64,
    pub y_lambda: f64,
    pub z_lambda: f64,
    /// `∫ F(u) Ψ^λ`
    pub f_term: f64,
    /// `∫ u f(u) Ψ^λ`
    pub uf_term: f64,
    pub l2: f64,
    pub h1: f64,
    pub theorem_weights: TheoremWeights,
    pub grad_psi: f64,
    pub ut_psi: f64,
    pub u2_psi: f64,
    pub abs_f_term: f64,
    pub abs_uf_term: f64,
    /// Unweighted `∫ (|∇u|² + |∂ₜu|²)`.
    pub energy: f64,
    pub sup_norm: f64,
    /// `∫₀ᵗ ∫ (|F(u)| + |u f(u)|) Ψ^λ`
    pub nl_history: f64,
    /// Ẽ_λ with the modified weight `(2 − 1/(t₀+t)) Φ_β`, line only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_tilde_1d: Option<f64>,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Field names accepted by [`EnergyReport::quantity`].
pub const QUANTITY_NAMES: &[&str] = &[
    "e_lambda",
    "e_tilde",
    "m_lambda",
    "y_lambda",
    "z_lambda",
    "f_term",
    "uf_term",
    "l2",
    "h1",
    "theorem_energy",
    "theorem_mass",
    "grad_psi",
    "ut_psi",
    "u2_psi",
    "energy",
    "sup_norm",
];

impl EnergyReport {
    /// Looks up a scalar field by name.
    pub fn quantity(&self, name: &str) -> Option<f64> {
        Some(match name {
            "t" => self.t,
            "e_lambda" => self.e_lambda,
            "e_tilde" => self.e_tilde,
            "m_lambda" => self.m_lambda,
            "y_lambda" => self.y_lambda,
            "z_lambda" => self.z_lambda,
            "f_term" => self.f_term,
            "uf_term" => self.uf_term,
            "l2" => self.l2,
            "h1" => self.h1,
            "theorem_energy" | "theorem_weights.energy" => self.theorem_weights.energy,
            "theorem_mass" | "theorem_weights.mass" => self.theorem_weights.mass,
            "theorem_grad" => self.theorem_weights.grad,
            "theorem_ut" => self.theorem_weights.ut,
            "grad_psi" => self.grad_psi,
            "ut_psi" => self.ut_psi,
            "u2_psi" => self.u2_psi,
            "abs_f_term" => self.abs_f_term,
            "abs_uf_term" => self.abs_uf_term,
            "energy" => self.energy,
            "sup_norm" => self.sup_norm,
            "nl_history" => self.nl_history,
            _ => return None,
        })
    }

    fn check_finite(&self) -> Result<(), ReportError> {
        let json = serde_json::to_value(self).expect("report serializes");
        fn walk(v: &serde_json::Value, path: &str) -> Option<String> {
            match v {
                serde_json::Value::Null => Some(path.to_string()),
                serde_json::Value::Object(m) => m.iter().find_map(|(k, v)| walk(v, k)),
                _ => None,
            }
        }
        match walk(&json, "") {
            Some(field) => Err(ReportError::QuadratureOverflow { t: self.t, field }),
            None => Ok(()),
        }
    }
}

/// Field and centered time derivative at one time level.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub t: f64,
    pub u: &'a [f64],
    pub ut: &'a [f64],
}

/// Computes every functional for `snap`.
///
/// `running` is the previous report of the same run; the time integrals
/// `Y_λ`, `Z_λ` and the nonlinear history are advanced from it by the
/// trapezoid rule.
pub fn compute_report(
    snap: &Snapshot,
    grid: &Grid,
    config: &SimConfig,
    running: Option<&EnergyReport>,
) -> Result<EnergyReport, ReportError> {
    let w = &config.weight;
    let nl = &config.nonlinearity;
    let (lambda, t) = (w.lambda, snap.t);
    let big_t = w.t0 + t;
    let exponent = -1.0 + 2.0 * w.delta;
    let line_factor = (w.dim == 1).then(|| 2.0 - 1.0 / big_t);

    let mut r = EnergyReport {
        v: REPORT_SCHEMA_VERSION,
        t,
        e_tilde_1d: line_factor.map(|_| 0.0),
        ..Default::default()
    };
    let mut ut_l2 = 0.0;
    let mut e_tilde_1d = 0.0;
    for i in 0..grid.len() {
        let (u, ut) = (snap.u[i], snap.ut[i]);
        if u == 0.0 && ut == 0.0 {
            continue;
        }
        let wi = grid.weight[i];
        let x = grid.radius(i);
        let psi_l = (big_t + x * x / 4.0).powf(lambda);
        let theorem_w = (1.0 + t + x * x).powf(lambda);
        let (u2, ut2) = (u * u, ut * ut);
        let (big_f, uf) = (nl.primitive(u), u * nl.f(u));
        r.ut_psi += wi * ut2 * psi_l;
        r.u2_psi += wi * u2 * psi_l;
        r.f_term += wi * big_f * psi_l;
        r.uf_term += wi * uf * psi_l;
        r.abs_f_term += wi * big_f.abs() * psi_l;
        r.abs_uf_term += wi * uf.abs() * psi_l;
        r.l2 += wi * u2;
        ut_l2 += wi * ut2;
        r.theorem_weights.ut += wi * ut2 * theorem_w;
        r.theorem_weights.mass += wi * u2 * theorem_w;
        r.sup_norm = r.sup_norm.max(u.abs());
        let phi = phi_beta_radial(x, t, w.beta, w)?;
        let integrand = 2.0 * u * ut + u2;
        r.e_tilde += wi * integrand * phi.powf(exponent);
        if let Some(k) = line_factor {
            e_tilde_1d += wi * integrand * (k * phi).powf(exponent);
        }
    }
    let mut grad_l2 = 0.0;
    for (j, (&xm, &mw)) in grid.mid.iter().zip(&grid.mid_weight).enumerate() {
        let du = (snap.u[j + 1] - snap.u[j]) / grid.h;
        if du == 0.0 {
            continue;
        }
        let x = xm.abs();
        let d2 = du * du;
        r.grad_psi += mw * d2 * (big_t + x * x / 4.0).powf(lambda);
        r.theorem_weights.grad += mw * d2 * (1.0 + t + x * x).powf(lambda);
        grad_l2 += mw * d2;
    }
    r.theorem_weights.energy = r.theorem_weights.grad + r.theorem_weights.ut;
    r.e_lambda = big_t * (r.grad_psi + r.ut_psi);
    r.m_lambda = r.e_lambda + r.u2_psi;
    r.h1 = grad_l2 + r.l2;
    r.energy = grad_l2 + ut_l2;
    if line_factor.is_some() {
        r.e_tilde_1d = Some(e_tilde_1d);
    }
    if let Some(prev) = running {
        let dt = t - prev.t;
        r.y_lambda = prev.y_lambda + 0.5 * dt * (prev.grad_psi + r.grad_psi);
        r.z_lambda = prev.z_lambda + 0.5 * dt * ((w.t0 + prev.t) * prev.ut_psi + big_t * r.ut_psi);
        r.nl_history = prev.nl_history
            + 0.5 * dt * (prev.abs_f_term + prev.abs_uf_term + r.abs_f_term + r.abs_uf_term);
    }
    r.check_finite()?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Geometry;
    use crate::solver::{
        DomainSpec, InitialData, InitialProfile, NonlinearityKind, NonlinearitySpec, DEFAULT_BLOWUP_THRESHOLD,
    };
    use crate::weights::WeightParams;

    fn config(lambda: f64) -> SimConfig {
        SimConfig {
            domain: DomainSpec {
                dim: 1,
                geometry: Geometry::FullLine,
                r_outer: 20.0,
                h: 0.01,
            },
            nonlinearity: NonlinearitySpec::new(NonlinearityKind::OddPower, 3.0),
            weight: WeightParams::new(1, lambda, 1.0).unwrap(),
            initial_data: InitialData {
                profile: InitialProfile::Bump { center: 0.0, radius: 2.0 },
                epsilon: 1.0,
                u1_factor: 0.0,
            },
            tau: 0.005,
            t_max: 1.0,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            output_stride: 1,
        }
    }

    #[test]
    fn zero_state_gives_zero_report() {
        let c = config(0.3);
        let g = c.domain.grid();
        let z = vec![0.0; g.len()];
        let r = compute_report(&Snapshot { t: 2.0, u: &z, ut: &z }, &g, &c, None).unwrap();
        assert_eq!(r.t, 2.0);
        assert_eq!(r.m_lambda, 0.0);
        assert_eq!(r.e_tilde, 0.0);
        assert_eq!(r.theorem_weights, TheoremWeights::default());
        assert_eq!(r.v, 1);
    }

    #[test]
    fn unweighted_limit() {
        let c = config(0.0);
        let g = c.domain.grid();
        let u: Vec<f64> = g.x.iter().map(|x| (-x * x).exp()).collect();
        let ut: Vec<f64> = g.x.iter().map(|x| x * (-x * x).exp()).collect();
        let r = compute_report(&Snapshot { t: 0.0, u: &u, ut: &ut }, &g, &c, None).unwrap();
        assert!((r.e_lambda - r.energy).abs() < 1e-13 * r.energy);
        assert!((r.m_lambda - (r.e_lambda + r.l2)).abs() < 1e-13 * r.m_lambda);
    }

    #[test]
    fn non_finite_field_is_rejected() {
        let c = config(0.3);
        let g = c.domain.grid();
        let mut u = vec![0.0; g.len()];
        u[100] = f64::NAN;
        let err = compute_report(&Snapshot { t: 0.0, u: &u, ut: &u }, &g, &c, None).unwrap_err();
        assert!(matches!(err, ReportError::QuadratureOverflow { .. }));
    }
}
