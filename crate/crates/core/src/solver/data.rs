use serde::{Deserialize, Serialize};

use super::{invalid, DomainSpec, SolverError};
use crate::grid::{sphere_area, Geometry};
use crate::weights::{far_field_limit, heat_profile};

/// Width of the smooth inner ramp `r_in → r_in + 1` for tail data.
const INNER_RAMP: f64 = 1.0;
/// Width of the outer taper that ends at `r_cut`.
pub(crate) const TAIL_TAPER: f64 = 5.0;

/// C^∞ transition from 0 (`x ≤ 0`) to 1 (`x ≥ 1`).
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// Shape of the initial displacement, before scaling by `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialProfile {
    /// `exp(1 − 1/(1 − s²))` with `s = (x − center)/radius`; peak value 1.
    Bump { center: f64, radius: f64 },
    /// `⟨x⟩^{−μ}`, ramped up smoothly off the inner boundary and tapered
    /// to zero on `[r_cut − 5, r_cut]`.
    PolyTail { mu: f64, r_cut: f64 },
    /// `Φ_β(x, 0)` at `t₀ = 1`, the heat flow of `|x|^{−2β}` one time unit
    /// in, with the same inner ramp and outer taper as `PolyTail`. The
    /// matching velocity `∂ₜΦ_β` is part of the profile, so the data starts
    /// on the diffusive self-similar solution.
    SelfSimilar { beta: f64, r_cut: f64 },
}

/// `u₀ = ε·profile`, `u₁ = u1_factor·u₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub profile: InitialProfile,
    pub epsilon: f64,
    pub u1_factor: f64,
}

impl InitialProfile {
    /// Profile value at signed coordinate `x` (radius in radial geometry).
    pub fn shape(&self, x: f64, geometry: Geometry, dim: usize) -> f64 {
        self.shape_and_velocity(x, geometry, dim).0
    }

    /// Built-in initial velocity, nonzero only for `SelfSimilar`.
    pub fn velocity(&self, x: f64, geometry: Geometry, dim: usize) -> f64 {
        self.shape_and_velocity(x, geometry, dim).1
    }

    fn envelope(r: f64, r_cut: f64, geometry: Geometry) -> f64 {
        let ramp = match geometry {
            Geometry::FullLine => 1.0,
            Geometry::RadialExterior { r_in } => smooth_step((r - r_in) / INNER_RAMP),
        };
        ramp * (1.0 - smooth_step((r - (r_cut - TAIL_TAPER)) / TAIL_TAPER))
    }

    fn shape_and_velocity(&self, x: f64, geometry: Geometry, dim: usize) -> (f64, f64) {
        match *self {
            InitialProfile::Bump { center, radius } => {
                let s = (x - center) / radius;
                if s.abs() >= 1.0 {
                    (0.0, 0.0)
                } else {
                    ((1.0 - 1.0 / (1.0 - s * s)).exp(), 0.0)
                }
            }
            InitialProfile::PolyTail { mu, r_cut } => {
                let r = x.abs();
                (Self::envelope(r, r_cut, geometry) * (1.0 + r * r).powf(-mu / 2.0), 0.0)
            }
            InitialProfile::SelfSimilar { beta, r_cut } => {
                let r = x.abs();
                let env = Self::envelope(r, r_cut, geometry);
                if env == 0.0 {
                    return (0.0, 0.0);
                }
                let (phi, dt) = heat_profile(dim, beta, r).unwrap_or((f64::NAN, f64::NAN));
                (env * phi, env * dt)
            }
        }
    }
}

impl InitialData {
    pub fn validate(&self, domain: &DomainSpec) -> Result<(), SolverError> {
        if !self.epsilon.is_finite() || !self.u1_factor.is_finite() {
            return Err(invalid("initial data amplitudes must be finite"));
        }
        let r_in = domain.inner_radius();
        match self.profile {
            InitialProfile::Bump { center, radius } => {
                if !(radius > 0.0) {
                    return Err(invalid("bump radius must be positive"));
                }
                if matches!(domain.geometry, Geometry::RadialExterior { .. }) && center - radius < r_in {
                    return Err(invalid(format!(
                        "bump support [{}, {}] reaches inside r_in = {r_in}",
                        center - radius,
                        center + radius
                    )));
                }
            }
            InitialProfile::PolyTail { mu, r_cut } => {
                if !(mu >= 0.0) {
                    return Err(invalid("tail exponent mu must be nonnegative"));
                }
                if r_cut - TAIL_TAPER < r_in + INNER_RAMP {
                    return Err(invalid(format!("r_cut = {r_cut} too small for the taper")));
                }
            }
            InitialProfile::SelfSimilar { beta, r_cut } => {
                if !(beta >= 0.0) || !beta.is_finite() {
                    return Err(invalid("self-similar exponent beta must be nonnegative"));
                }
                if r_cut - TAIL_TAPER < r_in + INNER_RAMP {
                    return Err(invalid(format!("r_cut = {r_cut} too small for the taper")));
                }
                if heat_profile(domain.dim, beta, r_cut).is_err() {
                    return Err(invalid(format!("heat profile with beta = {beta} cannot be evaluated")));
                }
            }
        }
        Ok(())
    }

    /// Largest `|x|` where the data can be nonzero.
    pub fn support_radius(&self) -> f64 {
        match self.profile {
            InitialProfile::Bump { center, radius } => center.abs() + radius,
            InitialProfile::PolyTail { r_cut, .. } | InitialProfile::SelfSimilar { r_cut, .. } => r_cut,
        }
    }

    pub fn u0(&self, x: f64, geometry: Geometry, dim: usize) -> f64 {
        self.epsilon * self.profile.shape(x, geometry, dim)
    }

    /// `ε·velocity + u1_factor·u₀`; the first term vanishes except for
    /// self-similar data.
    pub fn u1(&self, x: f64, geometry: Geometry, dim: usize) -> f64 {
        let (shape, vel) = self.profile.shape_and_velocity(x, geometry, dim);
        self.epsilon * (vel + self.u1_factor * shape)
    }

    /// Weighted size of the part of `ε⟨x⟩^{−μ}` that the taper discards:
    ///
    /// ```text
    /// ∫_{|x| ≥ r_cut − 5} (|∇φ|² + φ² + (u1_factor φ)²) ⟨x⟩^{2λ} dx,   φ = ε⟨x⟩^{−μ}
    /// ```
    ///
    /// Infinite when `μ ≤ λ + N/2`; zero for compactly supported bumps.
    /// Self-similar data is measured through its far field
    /// `Γ(N/2)/Γ(N/2−β) (r²/4)^{−β}`, i.e. `μ = 2β` with that prefactor.
    pub fn discarded_tail_norm(&self, dim: usize, lambda: f64) -> f64 {
        let (mu, r_cut, scale) = match self.profile {
            InitialProfile::Bump { .. } => return 0.0,
            InitialProfile::PolyTail { mu, r_cut } => (mu, r_cut, 1.0),
            InitialProfile::SelfSimilar { beta, r_cut } => (2.0 * beta, r_cut, far_field_limit(beta, dim) * 4f64.powf(beta)),
        };
        let rate = 2.0 * mu - 2.0 * lambda - dim as f64;
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        let a = r_cut - TAIL_TAPER;
        let eps2 = (scale * self.epsilon).powi(2);
        let k = 1.0 + self.u1_factor * self.u1_factor;
        // r = a e^y makes the integrand decay like e^{-rate·y}.
        let integrand = |y: f64| {
            let r = a * y.exp();
            let b = 1.0 + r * r;
            let val = k * b.powf(lambda - mu) + mu * mu * r * r * b.powf(lambda - mu - 2.0);
            eps2 * val * r.powi(dim as i32 - 1) * r
        };
        let y_max = 40.0 / rate;
        let steps = ((y_max / 2e-3).ceil() as usize).clamp(1000, 200_000);
        let dy = y_max / steps as f64;
        let mut sum = 0.5 * (integrand(0.0) + integrand(y_max));
        for i in 1..steps {
            sum += integrand(i as f64 * dy);
        }
        sphere_area(dim) * sum * dy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_step_limits() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert!((smooth_step(0.3) + smooth_step(0.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bump_peak_and_support() {
        let p = InitialProfile::Bump { center: 5.0, radius: 2.0 };
        let g = Geometry::RadialExterior { r_in: 1.0 };
        assert_eq!(p.shape(5.0, g, 2), 1.0);
        assert_eq!(p.shape(3.0, g, 2), 0.0);
        assert_eq!(p.shape(7.5, g, 2), 0.0);
    }

    #[test]
    fn tail_norm_matches_closed_form() {
        // N=1, λ=0, u1=0, μ=1: ∫_{|x|≥a} (1+x²)^{-1} + x²(1+x²)^{-3} dx
        let data = InitialData {
            profile: InitialProfile::PolyTail { mu: 1.0, r_cut: 15.0 },
            epsilon: 1.0,
            u1_factor: 0.0,
        };
        let a: f64 = 10.0;
        let first = std::f64::consts::FRAC_PI_2 - a.atan();
        // ∫ x²/(1+x²)³ = [atan x/8 + x(x²−1)/(8(1+x²)²)]
        let anti = |x: f64| x.atan() / 8.0 + x * (x * x - 1.0) / (8.0 * (1.0 + x * x).powi(2));
        let second = std::f64::consts::PI / 16.0 - anti(a);
        let exact = 2.0 * (first + second);
        let got = data.discarded_tail_norm(1, 0.0);
        assert!((got - exact).abs() / exact < 1e-6, "{got} vs {exact}");
        assert!(data.discarded_tail_norm(1, 0.5).is_infinite());
    }
}
