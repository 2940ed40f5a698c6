//! Runtime checks of the differential inequalities along a report series.
//!
//! Every check uses the additive tolerance `1e-3·max(|LHS|, |RHS|, 1)`.
//! The inequalities hold for the continuum solution, so a violation beyond
//! that scale points at a discretization or bookkeeping error.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EnergyReport, Snapshot};
use crate::grid::Grid;
use crate::inequalities::k_lambda;
use crate::solver::SimConfig;
use crate::weights::{certify_bounds, psi_radial, BoundSampler, WeightError, WeightParams};

const REL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonitorError {
    #[error("{name} violated at t = {t} (margin {margin})")]
    MonitorFailure { name: String, t: f64, margin: f64 },
    #[error("{0}")]
    InsufficientData(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    Pass,
    Skipped,
    Fail,
}

/// Outcome of one monitor or inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorVerdict {
    pub name: String,
    pub status: VerdictStatus,
    /// Smallest `RHS + tol − LHS` seen (or the check's own figure of merit).
    pub worst_margin: f64,
    pub worst_t: f64,
    pub checked: usize,
    pub extras: BTreeMap<String, f64>,
}

impl MonitorVerdict {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            status: VerdictStatus::Pass,
            worst_margin: f64::INFINITY,
            worst_t: f64::NAN,
            checked: 0,
            extras: BTreeMap::new(),
        }
    }

    pub fn skipped(name: &str, reason: &str) -> Self {
        let mut v = Self::new(name);
        v.status = VerdictStatus::Skipped;
        v.extras.insert(format!("skipped: {reason}"), 0.0);
        v
    }

    fn record(&mut self, t: f64, margin: f64) {
        self.checked += 1;
        if margin < self.worst_margin || self.worst_t.is_nan() {
            self.worst_margin = margin;
            self.worst_t = t;
        }
    }

    fn into_result(self) -> Result<Self, MonitorError> {
        if self.worst_margin < 0.0 {
            Err(MonitorError::MonitorFailure {
                name: self.name,
                t: self.worst_t,
                margin: self.worst_margin,
            })
        } else {
            Ok(self)
        }
    }
}

fn tolerance(lhs: f64, rhs: f64) -> f64 {
    REL_TOL * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Checks that reports are evenly spaced in time and returns the spacing.
fn uniform_spacing(series: &[EnergyReport]) -> Result<f64, MonitorError> {
    if series.len() < 3 {
        return Err(MonitorError::InsufficientData(format!(
            "need at least 3 reports, got {}",
            series.len()
        )));
    }
    let dt = series[1].t - series[0].t;
    for w in series.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1e-12) {
            return Err(MonitorError::InsufficientData("report times are not uniformly spaced".into()));
        }
    }
    Ok(dt)
}

/// Weighted energy inequality for `dE_λ/dt`:
///
/// ```text
/// dE_λ/dt ≤ (λ²+λ+1) ∫|∇u|²Ψ^λ + (λ+1−t₀−t) ∫|∂ₜu|²Ψ^λ
///           + d/dt[2(t₀+t) ∫F(u)Ψ^λ] + 2(λ+1) ∫F(u)Ψ^λ
/// ```
///
/// Both time derivatives are centered differences over the series.
pub fn check_lemma32(series: &[EnergyReport], config: &SimConfig) -> Result<MonitorVerdict, MonitorError> {
    let dt = uniform_spacing(series)?;
    let (lambda, t0) = (config.weight.lambda, config.weight.t0);
    let g = |r: &EnergyReport| 2.0 * (t0 + r.t) * r.f_term;
    let mut verdict = MonitorVerdict::new("lemma32");
    for k in 1..series.len() - 1 {
        let (a, r, b) = (&series[k - 1], &series[k], &series[k + 1]);
        let lhs = (b.e_lambda - a.e_lambda) / (2.0 * dt);
        let rhs = (lambda * lambda + lambda + 1.0) * r.grad_psi
            + (lambda + 1.0 - t0 - r.t) * r.ut_psi
            + (g(b) - g(a)) / (2.0 * dt)
            + 2.0 * (lambda + 1.0) * r.f_term;
        verdict.record(r.t, rhs + tolerance(lhs, rhs) - lhs);
    }
    verdict.into_result()
}

/// Certified constants entering the `dẼ_λ/dt` bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Lemma33Constants {
    /// Lower constant of `Φ_β Ψ^β`.
    pub c_beta: f64,
    /// Upper constant of `Φ_β Ψ^β`.
    pub C_beta: f64,
    /// Upper constant of `|Φ_{β+1}| Ψ^{β+1}`.
    pub C_beta_next: f64,
    /// Hardy constant `K(λ)`.
    pub k: f64,
}

impl Lemma33Constants {
    pub fn certify(params: &WeightParams, sampler: &BoundSampler) -> Result<Self, MonitorError> {
        let b = certify_bounds(params.beta, params, sampler)?;
        let next = certify_bounds(params.beta + 1.0, params, sampler)?;
        let k = k_lambda(params.dim, params.lambda).unwrap_or(f64::NAN);
        Ok(Self {
            c_beta: b.c_hat,
            C_beta: b.C_hat,
            C_beta_next: next.C_hat,
            k,
        })
    }
}

/// As [`check_lemma33_with`], certifying the constants with the default
/// sampler first.
pub fn check_lemma33(series: &[EnergyReport], config: &SimConfig) -> Result<MonitorVerdict, MonitorError> {
    require_interior(config)?;
    let consts = Lemma33Constants::certify(&config.weight, &BoundSampler::default())?;
    check_lemma33_with(series, config, &consts)
}

/// Bound for `dẼ_λ/dt` with `a = (1−2δ) β C_{β+1}`:
///
/// ```text
/// dẼ_λ/dt ≤ c^{−(1−2δ)} (2 + 4a/(c K²)) ∫|∂ₜu|²Ψ^λ
///         + (a/(c^{2−2δ} t₀) − 2δ/((1−δ) C^{1−2δ})) ∫|∇u|²Ψ^λ
///         + 2 c^{−(1−2δ)} ∫|u f(u)|Ψ^λ
/// ```
///
/// The cross term `∫|u||∂ₜu|Ψ^{λ−1}` is bounded with the Hardy constant
/// `K²/4`, which puts `4/K²` in front of the kinetic term. The margin
/// against the variant with `1/K` in that place is kept in `extras` as
/// `worst_margin_1_over_k`.
///
/// Skipped when `K(λ) ≤ 0` (the line, or `N = 2` with `λ = 0`).
pub fn check_lemma33_with(
    series: &[EnergyReport],
    config: &SimConfig,
    consts: &Lemma33Constants,
) -> Result<MonitorVerdict, MonitorError> {
    if !(consts.k > 0.0) {
        return Ok(MonitorVerdict::skipped("lemma33", "K(lambda) <= 0"));
    }
    let dt = uniform_spacing(series)?;
    let w = &config.weight;
    let (delta, beta, t0) = (w.delta, w.beta, w.t0);
    let c = consts.c_beta;
    let a = (1.0 - 2.0 * delta) * beta * consts.C_beta_next;
    let inv = c.powf(-(1.0 - 2.0 * delta));
    let coef_ut = inv * (2.0 + 4.0 * a / (c * consts.k * consts.k));
    let coef_ut_1k = inv * (2.0 + a / (c * consts.k));
    let coef_grad = a / (c.powf(2.0 - 2.0 * delta) * t0)
        - 2.0 * delta / ((1.0 - delta) * consts.C_beta.powf(1.0 - 2.0 * delta));
    let coef_uf = 2.0 * inv;
    let mut verdict = MonitorVerdict::new("lemma33");
    verdict.extras.insert("coef_ut".into(), coef_ut);
    verdict.extras.insert("coef_grad".into(), coef_grad);
    verdict.extras.insert("coef_uf".into(), coef_uf);
    let mut worst_1k = f64::INFINITY;
    for k in 1..series.len() - 1 {
        let (prev, r, next) = (&series[k - 1], &series[k], &series[k + 1]);
        let lhs = (next.e_tilde - prev.e_tilde) / (2.0 * dt);
        let rhs = coef_ut * r.ut_psi + coef_grad * r.grad_psi + coef_uf * r.abs_uf_term;
        verdict.record(r.t, rhs + tolerance(lhs, rhs) - lhs);
        let rhs_1k = coef_ut_1k * r.ut_psi + coef_grad * r.grad_psi + coef_uf * r.abs_uf_term;
        worst_1k = worst_1k.min(rhs_1k + tolerance(lhs, rhs_1k) - lhs);
    }
    verdict.extras.insert("worst_margin_1_over_k".into(), worst_1k);
    verdict.into_result()
}

fn require_interior(config: &SimConfig) -> Result<(), MonitorError> {
    if config.weight.delta > 0.0 {
        Ok(())
    } else {
        Err(MonitorError::Precondition("lambda = N/2 leaves delta = 0".into()))
    }
}

/// `ν = δ^{−1}(1−δ) C_β^{1−2δ} (λ²+λ+2)`.
#[allow(non_snake_case)]
pub fn proposition_nu(params: &WeightParams, C_beta: f64) -> f64 {
    let (d, l) = (params.delta, params.lambda);
    (1.0 - d) / d * C_beta.powf(1.0 - 2.0 * d) * (l * l + l + 2.0)
}

/// Smallest `t₀` allowed by the equivalence check: `c_β^{−1+2δ} ν`.
pub fn equivalence_t0(params: &WeightParams, c_beta: f64, nu: f64) -> f64 {
    c_beta.powf(-1.0 + 2.0 * params.delta) * nu
}

/// Two-sided comparison of `E_λ + νẼ_λ` with `m_λ`.
///
/// Records the empirical `γ̂ = min r(t)` and `Γ̂ = max r(t)` of
/// `r = (E_λ + νẼ_λ)/m_λ`; reports with `m_λ < 1e-14` are skipped.
pub fn check_equivalence(
    series: &[EnergyReport],
    config: &SimConfig,
    nu: f64,
) -> Result<MonitorVerdict, MonitorError> {
    require_interior(config)?;
    let w = &config.weight;
    if nu > 0.0 {
        let b = certify_bounds(w.beta, w, &BoundSampler::default())?;
        let need = equivalence_t0(w, b.c_hat, nu);
        if w.t0 < need {
            return Err(MonitorError::Precondition(format!("t0 = {} below c^(-1+2δ) ν = {need}", w.t0)));
        }
    }
    equivalence_ratios(series, nu, |r| r.e_tilde)
}

pub(crate) fn equivalence_ratios(
    series: &[EnergyReport],
    nu: f64,
    tilde: impl Fn(&EnergyReport) -> f64,
) -> Result<MonitorVerdict, MonitorError> {
    let mut verdict = MonitorVerdict::new("equivalence");
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for r in series {
        if r.m_lambda < 1e-14 {
            continue;
        }
        let ratio = (r.e_lambda + nu * tilde(r)) / r.m_lambda;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        verdict.record(r.t, ratio);
    }
    if verdict.checked == 0 {
        verdict.worst_margin = 0.0;
        verdict.extras.insert("vacuous".into(), 1.0);
        return Ok(verdict);
    }
    verdict.extras.insert("gamma_hat".into(), lo);
    verdict.extras.insert("Gamma_hat".into(), hi);
    if !(lo > 0.0) {
        return Err(MonitorError::MonitorFailure {
            name: verdict.name,
            t: verdict.worst_t,
            margin: lo,
        });
    }
    Ok(verdict)
}

/// Weighted energy estimate check.
///
/// At every report, with `RHS(t) = m_λ(0) + ∫|F(u₀)|Ψ(0)^λ + (t₀+t)∫|F(u)|Ψ^λ
/// + ∫₀ᵗ∫(|F(u)| + |u f(u)|)Ψ^λ`, the ratio `RHS/(m_λ + Y_λ + Z_λ)` is formed
/// and `η̂` is its running infimum. Passes when `η̂ > 0` and the running
/// infimum moves by less than 20% over the last quarter of the series.
/// Returns `η̂ = +∞` when every report is zero.
pub fn check_wee(series: &[EnergyReport], config: &SimConfig) -> Result<(f64, MonitorVerdict), MonitorError> {
    let first = series
        .first()
        .ok_or_else(|| MonitorError::InsufficientData("empty series".into()))?;
    if first.t != 0.0 {
        return Err(MonitorError::InsufficientData("series must start at t = 0".into()));
    }
    let t0 = config.weight.t0;
    let base = first.m_lambda + first.abs_f_term;
    let mut verdict = MonitorVerdict::new("wee");
    let mut running = Vec::with_capacity(series.len());
    let mut eta = f64::INFINITY;
    for r in series {
        let denom = r.m_lambda + r.y_lambda + r.z_lambda;
        if denom > 1e-300 {
            let rhs = base + (t0 + r.t) * r.abs_f_term + r.nl_history;
            let ratio = rhs / denom;
            eta = eta.min(ratio);
            verdict.record(r.t, ratio);
        }
        running.push(eta);
    }
    if verdict.checked == 0 {
        verdict.worst_margin = 0.0;
        verdict.extras.insert("vacuous".into(), 1.0);
        return Ok((f64::INFINITY, verdict));
    }
    let end = *running.last().unwrap();
    let start = running[(3 * running.len()) / 4];
    let variation = if end > 0.0 { (start - end) / end } else { f64::INFINITY };
    verdict.extras.insert("eta_hat".into(), eta);
    verdict.extras.insert("last_quarter_variation".into(), variation);
    if !(eta > 0.0) || !(variation < 0.2) {
        return Err(MonitorError::MonitorFailure {
            name: verdict.name,
            t: verdict.worst_t,
            margin: eta,
        });
    }
    Ok((eta, verdict))
}

/// `Ĉ = (K/2)^{−2(1−θ)} [C_{GN,q}^{q+1} (1 + λ/K)²]^θ` with
/// `θ = N/(N+2λ)`, `q = 1 + 4/N`.
///
/// The first factor comes from bounding `∫u²Ψ^{λ−1}` by the Hardy inequality
/// in the Hölder step; the second from applying the unweighted GN inequality
/// to `uΨ^{λ/2}`.
pub fn critical_constant(dim: usize, lambda: f64, c_gn_q: f64) -> Option<f64> {
    let n = dim as f64;
    let k = k_lambda(dim, lambda).ok()?;
    if !(k > 0.0) {
        return None;
    }
    let theta = n / (n + 2.0 * lambda);
    let q = 1.0 + 4.0 / n;
    let hardy = (0.5 * k).powf(-2.0 * (1.0 - theta));
    let gn = c_gn_q.powf(q + 1.0) * (1.0 + lambda / k).powi(2);
    Some(hardy * gn.powf(theta))
}

/// Interpolation chain used at the critical exponent `p = 1 + 4/(N+2λ)`:
///
/// ```text
/// ∫|u|^{p+1}Ψ^λ ≤ Ĉ (∫|∇u|²Ψ^λ) (∫u²Ψ^λ)^{(p−1)/2}
/// ```
///
/// Fails when the realized ratio exceeds `1.05 Ĉ`.
pub fn check_critical_interpolation(
    snap: &Snapshot,
    grid: &Grid,
    params: &WeightParams,
    c_gn_q: f64,
) -> Result<MonitorVerdict, MonitorError> {
    let n = params.dim as f64;
    let lambda = params.lambda;
    if !(lambda > 0.0 && lambda < n / 2.0) {
        return Err(MonitorError::Precondition(format!("lambda = {lambda} outside (0, N/2)")));
    }
    let c_hat = critical_constant(params.dim, lambda, c_gn_q)
        .ok_or_else(|| MonitorError::Precondition("K(lambda) <= 0".into()))?;
    let p = 1.0 + 4.0 / (n + 2.0 * lambda);
    let psi_l = |x: f64| psi_radial(x, snap.t, params).powf(lambda);
    let mut lhs = 0.0;
    let mut mass = 0.0;
    for i in 0..grid.len() {
        let u = snap.u[i];
        if u != 0.0 {
            let w = grid.weight[i] * psi_l(grid.radius(i));
            lhs += w * u.abs().powf(p + 1.0);
            mass += w * u * u;
        }
    }
    let mut grad = 0.0;
    for (j, (&xm, &mw)) in grid.mid.iter().zip(&grid.mid_weight).enumerate() {
        let du = (snap.u[j + 1] - snap.u[j]) / grid.h;
        grad += mw * du * du * psi_l(xm.abs());
    }
    let mut verdict = MonitorVerdict::new("critical_interpolation");
    verdict.extras.insert("C_hat".into(), c_hat);
    verdict.extras.insert("p".into(), p);
    let denom = grad * mass.powf((p - 1.0) / 2.0);
    if denom == 0.0 {
        verdict.worst_margin = 0.0;
        verdict.worst_t = snap.t;
        verdict.extras.insert("ratio".into(), 0.0);
        return Ok(verdict);
    }
    let ratio = lhs / denom;
    verdict.extras.insert("ratio".into(), ratio);
    verdict.record(snap.t, 1.05 * c_hat - ratio);
    verdict.into_result()
}
