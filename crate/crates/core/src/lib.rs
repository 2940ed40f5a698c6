//! Numerical laboratory for weighted energy estimates of the semilinear
//! damped wave equation
//!
//! ```text
//! ∂ₜ²u − Δu + ∂ₜu = f(u)   in Ω × (0, T),   u = 0 on ∂Ω,
//! ```
//!
//! posed on the line or outside a ball in ℝᴺ (radially symmetric data).
//!
//! The crate is organised bottom-up:
//! - [`specfun`]: Pochhammer symbol and Kummer's function `M(a, c; z)`.
//! - [`weights`]: the self-similar heat weights `Φ_β`, `Ψ` and their bounds.
//! - [`grid`]: spatial grids and trapezoidal quadrature with radial measure.
//! - [`solver`]: explicit second-order finite differences, blowup detection,
//!   manufactured-solution verification.
//! - [`functionals`]: weighted energy functionals and runtime inequality monitors.
//! - [`inequalities`]: randomized verification of the weighted Hardy,
//!   Gagliardo–Nirenberg and integration-by-parts inequalities.
//! - [`experiments`]: decay fits, lifespan sweeps, critical-exponent scans.

pub mod experiments;
pub mod functionals;
pub mod grid;
pub mod inequalities;
pub mod solver;
pub mod specfun;
pub mod weights;
