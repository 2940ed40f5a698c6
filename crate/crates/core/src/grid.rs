//! Spatial grids and trapezoidal quadrature.
//!
//! Two geometries are supported: the full line `[-L, L]` and the radially
//! symmetric exterior of a ball, `r ∈ [r_in, r_outer]`. In the radial case all
//! integrals carry the surface measure `ω_N r^{N−1} dr`.

use serde::{Deserialize, Serialize};

/// Geometry of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    FullLine,
    RadialExterior { r_in: f64 },
}

/// Area of the unit sphere `S^{N−1}` (`ω_1 = 2` counts both half-lines).
pub fn sphere_area(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        n => {
            let half = n as f64 / 2.0;
            2.0 * PI.powf(half) / libm::tgamma(half)
        }
    }
}

/// Uniform grid with node and midpoint quadrature weights.
///
/// Nodes `0` and `len − 1` are Dirichlet boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub geometry: Geometry,
    pub h: f64,
    /// Node coordinate: signed `x` on the line, radius `r` otherwise.
    pub x: Vec<f64>,
    /// Trapezoid measure of each node.
    pub weight: Vec<f64>,
    /// Midpoint coordinates `x_{i+1/2}`, one fewer than the nodes.
    pub mid: Vec<f64>,
    /// Midpoint-rule measure of each cell, used for gradient integrals.
    pub mid_weight: Vec<f64>,
}

impl Grid {
    /// Builds the grid. On the full line the half-width is rounded up to a
    /// multiple of `h` so that `x = 0` is a node and the grid is symmetric.
    pub fn new(dim: usize, geometry: Geometry, r_outer: f64, h: f64) -> Self {
        let x: Vec<f64> = match geometry {
            Geometry::FullLine => {
                let m = (r_outer / h).ceil() as i64;
                (-m..=m).map(|i| i as f64 * h).collect()
            }
            Geometry::RadialExterior { r_in } => {
                let n = ((r_outer - r_in) / h).ceil() as usize;
                (0..=n).map(|i| r_in + i as f64 * h).collect()
            }
        };
        let measure = |r: f64| match geometry {
            Geometry::FullLine => 1.0,
            Geometry::RadialExterior { .. } => sphere_area(dim) * r.abs().powi(dim as i32 - 1),
        };
        let n = x.len();
        let weight = x
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let end = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                end * h * measure(r)
            })
            .collect();
        let mid: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mid_weight = mid.iter().map(|&r| h * measure(r)).collect();
        Self {
            dim,
            geometry,
            h,
            x,
            weight,
            mid,
            mid_weight,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `|x|` at node `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.x[i].abs()
    }

    /// `Σ_i w_i g_i`.
    pub fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        self.weight.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Forward difference `(u_{i+1} − u_i)/h` at every midpoint.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        u.windows(2).map(|w| (w[1] - w[0]) / self.h).collect()
    }

    /// Discrete Laplacian at interior nodes, zero on the boundary rows.
    ///
    /// Radial rows use `u_rr + (N−1)/r u_r` with centered differences.
    pub fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        out[0] = 0.0;
        out[n - 1] = 0.0;
        self.laplacian_range(u, out, 1, n - 1);
    }

    /// Laplacian on nodes `lo..hi` (interior only).
    pub(crate) fn laplacian_range(&self, u: &[f64], out: &mut [f64], lo: usize, hi: usize) {
        let h2 = self.h * self.h;
        match self.geometry {
            Geometry::FullLine => {
                for i in lo..hi {
                    out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2;
                }
            }
            Geometry::RadialExterior { .. } => {
                let k = (self.dim as f64 - 1.0) / (2.0 * self.h);
                for i in lo..hi {
                    out[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
                        + k / self.x[i] * (u[i + 1] - u[i - 1]);
                }
            }
        }
    }
}
