//! Self-similar heat weights.
//!
//! ```text
//! Φ_β(x, t) = (t₀+t)^{−β} e^{−z} M(N/2 − β, N/2; z),   z = |x|²/(4(t₀+t))
//! Ψ(x, t)   = t₀ + t + |x|²/4
//! ```
//!
//! `Φ_β` solves the heat equation, satisfies `∂ₜΦ_β = −βΦ_{β+1}`, and is
//! comparable to `Ψ^{−β}` for `0 ≤ β < N/2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{gamma_ratio, kummer_m_scaled, KummerArgs, SpecfunError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("invalid weight parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires dim = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Φ_β Ψ^β = {value} ≤ 0 at |x| = {r}, t = {t} (β = {beta})")]
    BoundViolation { beta: f64, r: f64, t: f64, value: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Weight-family configuration: `N`, `λ`, `t₀` and the derived `δ`, `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub dim: usize,
    pub lambda: f64,
    pub t0: f64,
    pub delta: f64,
    pub beta: f64,
}

impl WeightParams {
    pub fn new(dim: usize, lambda: f64, t0: f64) -> Result<Self, WeightError> {
        if dim == 0 {
            return Err(WeightError::InvalidParameter("dim must be at least 1".into()));
        }
        let n = dim as f64;
        if !(lambda >= 0.0 && lambda < n / 2.0) {
            return Err(WeightError::InvalidParameter(format!(
                "lambda = {lambda} outside [0, {})",
                n / 2.0
            )));
        }
        if !(t0 >= 1.0) || !t0.is_finite() {
            return Err(WeightError::InvalidParameter(format!("t0 = {t0} must be >= 1")));
        }
        Ok(Self {
            dim,
            lambda,
            t0,
            delta: (n - 2.0 * lambda) / (4.0 * n),
            beta: 2.0 * lambda * n / (n + 2.0 * lambda),
        })
    }

    /// Like [`WeightParams::new`] but admits the endpoint `λ = N/2`.
    ///
    /// There `δ = 0` and `Φ_β` is the heat kernel, so the weighted energies
    /// remain meaningful while every theorem constant degenerates. Meant for
    /// runs that only measure `m_λ`; the monitors reject `δ = 0`.
    pub fn closed(dim: usize, lambda: f64, t0: f64) -> Result<Self, WeightError> {
        let half = dim as f64 / 2.0;
        if dim >= 1 && lambda == half {
            let below = Self::new(dim, 0.0, t0)?;
            return Ok(Self {
                lambda,
                delta: 0.0,
                beta: half,
                ..below
            });
        }
        Self::new(dim, lambda, t0)
    }

    /// Same family with another time shift.
    pub fn with_t0(&self, t0: f64) -> Result<Self, WeightError> {
        Self::new(self.dim, self.lambda, t0)
    }

    fn half_dim(&self) -> f64 {
        self.dim as f64 / 2.0
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `Ψ(x, t) = t₀ + t + |x|²/4`.
pub fn psi(x: &[f64], t: f64, params: &WeightParams) -> f64 {
    psi_radial(norm(x), t, params)
}

pub fn psi_radial(r: f64, t: f64, params: &WeightParams) -> f64 {
    params.t0 + t + r * r / 4.0
}

/// `Φ_β(x, t)`.
pub fn phi_beta(x: &[f64], t: f64, beta: f64, params: &WeightParams) -> Result<f64, WeightError> {
    phi_beta_radial(norm(x), t, beta, params)
}

/// `Φ_β` as a function of `r = |x|`.
pub fn phi_beta_radial(r: f64, t: f64, beta: f64, params: &WeightParams) -> Result<f64, WeightError> {
    check_beta(beta)?;
    let big_t = params.t0 + t;
    let z = r * r / (4.0 * big_t);
    let c = params.half_dim();
    Ok(big_t.powf(-beta) * scaled(c - beta, c, z)?)
}

fn check_beta(beta: f64) -> Result<(), WeightError> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(WeightError::InvalidParameter(format!("beta = {beta} must be >= 0")));
    }
    Ok(())
}

fn scaled(a: f64, c: f64, z: f64) -> Result<f64, SpecfunError> {
    kummer_m_scaled(KummerArgs::new(a, c, z)?)
}

/// Analytic derivatives of `Φ_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiDerivatives {
    pub dt: f64,
    pub laplacian: f64,
    pub gradient: Vec<f64>,
}

/// Radial profile `g(z) = e^{−z} M(a, c; z)` with its first two derivatives.
struct Profile {
    g: f64,
    g1: f64,
    g2: f64,
}

fn profile(a: f64, c: f64, z: f64) -> Result<Profile, SpecfunError> {
    let g = scaled(a, c, z)?;
    // Differentiating g = M(c−a, c; −z) and transforming back gives
    // g^{(k)} = (−1)^k (c−a)_k/(c)_k e^{−z} M(a, c+k; z) with no cancellation,
    // unlike e^{−z}(M' − M), which loses a factor z in relative accuracy.
    let b = c - a;
    let g1 = if b == 0.0 { 0.0 } else { -b / c * scaled(a, c + 1.0, z)? };
    let g2 = if b == 0.0 || b == -1.0 {
        0.0
    } else {
        b * (b + 1.0) / (c * (c + 1.0)) * scaled(a, c + 2.0, z)?
    };
    Ok(Profile { g, g1, g2 })
}

/// `∂ₜΦ_β`, `ΔΦ_β` and `∇Φ_β` at `x`.
///
/// All three come from the chain rule on `(t₀+t)^{−β} g(z)`; none of them
/// uses the heat equation or the index-shift identity, so those can be
/// checked against each other.
pub fn phi_beta_derivatives(
    x: &[f64],
    t: f64,
    beta: f64,
    params: &WeightParams,
) -> Result<PhiDerivatives, WeightError> {
    let r = norm(x);
    let (dt, laplacian, dr) = phi_beta_derivatives_radial(r, t, beta, params)?;
    let gradient = if r == 0.0 {
        vec![0.0; x.len()]
    } else {
        x.iter().map(|xi| dr * xi / r).collect()
    };
    Ok(PhiDerivatives { dt, laplacian, gradient })
}

/// Radial form: `(∂ₜΦ_β, ΔΦ_β, ∂_rΦ_β)`.
pub fn phi_beta_derivatives_radial(
    r: f64,
    t: f64,
    beta: f64,
    params: &WeightParams,
) -> Result<(f64, f64, f64), WeightError> {
    check_beta(beta)?;
    let big_t = params.t0 + t;
    let z = r * r / (4.0 * big_t);
    let c = params.half_dim();
    let p = profile(c - beta, c, z)?;
    let scale = big_t.powf(-beta - 1.0);
    let dt = -scale * (beta * p.g + z * p.g1);
    let laplacian = scale * (z * p.g2 + c * p.g1);
    let dr = big_t.powf(-beta) * p.g1 * r / (2.0 * big_t);
    Ok((dt, laplacian, dr))
}

/// `(Φ_β, ∂ₜΦ_β)` at `t₀ = 1`, `t = 0` in dimension `dim`, for any `β ≥ 0`.
///
/// This is the heat flow of `|x|^{−2β}` (up to a constant) one time unit
/// in, and serves as self-similar initial data.
pub fn heat_profile(dim: usize, beta: f64, r: f64) -> Result<(f64, f64), WeightError> {
    check_beta(beta)?;
    let c = dim as f64 / 2.0;
    let z = r * r / 4.0;
    let p = profile(c - beta, c, z)?;
    Ok((p.g, -(beta * p.g + z * p.g1)))
}

/// `(2 − 1/(t₀+t)) Φ_β` with `β = params.beta`, for the line only.
pub fn phi_tilde_1d(x: &[f64], t: f64, params: &WeightParams) -> Result<f64, WeightError> {
    if params.dim != 1 {
        return Err(WeightError::DimensionMismatch {
            expected: 1,
            got: params.dim,
        });
    }
    let factor = 2.0 - 1.0 / (params.t0 + t);
    Ok(factor * phi_beta(x, t, params.beta, params)?)
}

/// Margins of `∂ₜΦ̃ − ΔΦ̃ − κ Φ̃ ≥ 0` for three choices of `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TildeMargins {
    /// `κ = 1/(1+t)²`.
    pub one_plus_t: f64,
    /// `κ = 1/(t₀+t)²`.
    pub t0_plus_t: f64,
    /// `κ = 1/(2(t₀+t)²)`, which does hold since `Φ̃ ≤ 2Φ`.
    pub half_t0_plus_t: f64,
}

/// Evaluates the modified-weight inequality with analytic derivatives.
///
/// `∂ₜΦ̃ − ΔΦ̃ = Φ_β/(t₀+t)²` exactly, so the first two margins are negative
/// for every `t > 0` (at `t₀ = 1`) while the third is nonnegative.
pub fn phi_tilde_margins(x: &[f64], t: f64, params: &WeightParams) -> Result<TildeMargins, WeightError> {
    let tilde = phi_tilde_1d(x, t, params)?;
    let big_t = params.t0 + t;
    let factor = 2.0 - 1.0 / big_t;
    let phi = phi_beta(x, t, params.beta, params)?;
    let d = phi_beta_derivatives(x, t, params.beta, params)?;
    let lhs = phi / (big_t * big_t) + factor * d.dt - factor * d.laplacian;
    Ok(TildeMargins {
        one_plus_t: lhs - tilde / ((1.0 + t) * (1.0 + t)),
        t0_plus_t: lhs - tilde / (big_t * big_t),
        half_t0_plus_t: lhs - tilde / (2.0 * big_t * big_t),
    })
}

/// Empirical constants with `c_hat ≤ Φ_β Ψ^β ≤ C_hat` over the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct WeightBounds {
    pub beta: f64,
    pub c_hat: f64,
    pub C_hat: f64,
    pub sample_count: usize,
    pub max_abscissa: f64,
}

/// Sampling plan for [`certify_bounds`].
///
/// A tensor grid of `x_count` values of `|x|` and `t_count` values of `t`,
/// each `0` followed by log-spaced points up to the maximum, for every `t₀`
/// in `t0_values`, plus `random_samples` seeded log-uniform points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSampler {
    pub seed: u64,
    pub x_count: usize,
    pub t_count: usize,
    pub x_max: f64,
    pub t_max: f64,
    pub t0_values: Vec<f64>,
    pub random_samples: usize,
}

impl Default for BoundSampler {
    fn default() -> Self {
        Self {
            seed: 0,
            x_count: 128,
            t_count: 64,
            x_max: 1e4,
            t_max: 1e4,
            t0_values: vec![1.0, 10.0],
            random_samples: 0,
        }
    }
}

fn log_points(count: usize, max: f64) -> Vec<f64> {
    let lo: f64 = 1e-2;
    let mut pts = vec![0.0];
    if count > 1 {
        let steps = (count - 2).max(1) as f64;
        for k in 0..count - 1 {
            pts.push(lo * (max / lo).powf(k as f64 / steps));
        }
    }
    pts
}

impl BoundSampler {
    /// Doubles both grid densities (used to check stability of the constants).
    pub fn refined(&self) -> Self {
        Self {
            x_count: 2 * self.x_count,
            t_count: 2 * self.t_count,
            random_samples: 2 * self.random_samples,
            ..self.clone()
        }
    }

    fn points(&self) -> Vec<(f64, f64, f64)> {
        let xs = log_points(self.x_count, self.x_max);
        let ts = log_points(self.t_count, self.t_max);
        let mut pts = Vec::with_capacity(xs.len() * ts.len() * self.t0_values.len() + self.random_samples);
        for &t0 in &self.t0_values {
            for &t in &ts {
                for &r in &xs {
                    pts.push((r, t, t0));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random_samples {
            let r = 10f64.powf(rng.gen_range(-2.0..self.x_max.log10()));
            let t = 10f64.powf(rng.gen_range(-2.0..self.t_max.log10()));
            let t0 = self.t0_values[rng.gen_range(0..self.t0_values.len())];
            pts.push((r, t, t0));
        }
        pts
    }
}

/// Certifies `c_hat ≤ Φ_β Ψ^β ≤ C_hat` empirically.
///
/// `params.t0` is ignored; the time shifts come from the sampler.
pub fn certify_bounds(
    beta: f64,
    params: &WeightParams,
    sampler: &BoundSampler,
) -> Result<WeightBounds, WeightError> {
    check_beta(beta)?;
    let pts = sampler.points();
    let values: Vec<(f64, f64, f64, f64)> = pts
        .par_iter()
        .map(|&(r, t, t0)| {
            let p = WeightParams { t0, ..*params };
            let psi = psi_radial(r, t, &p);
            let v = phi_beta_radial(r, t, beta, &p)? * psi.powf(beta);
            Ok((v, psi, r, t))
        })
        .collect::<Result<_, WeightError>>()?;
    let half = params.dim as f64 / 2.0;
    if beta < half {
        if let Some(&(value, _, r, t)) = values.iter().find(|v| !(v.0 > 0.0)) {
            return Err(WeightError::BoundViolation { beta, r, t, value });
        }
    }
    let c_hat = values.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
    let big_c = values.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
    let max_abscissa = values.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok(WeightBounds {
        beta,
        c_hat,
        C_hat: big_c,
        sample_count: values.len(),
        max_abscissa,
    })
}

/// `lim_{|x|→∞} Φ_β Ψ^β = Γ(N/2)/Γ(N/2 − β)`.
pub fn far_field_limit(beta: f64, dim: usize) -> f64 {
    let c = dim as f64 / 2.0;
    gamma_ratio(c, c - beta)
}
