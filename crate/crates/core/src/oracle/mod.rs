//! Independent numerical solvers for the reduced radial equation
//!
//! ```text
//! -u'' + [l(l+1)/r^2 + 2 V(r)] u = 2 E u,    u = r psi
//! ```
//!
//! in natural units (hbar = m = 1). Both solvers impose the regular-origin
//! condition `u(0) = 0` and a Dirichlet wall at `r_max`; the grid starts at
//! `r_min > 0` so the centrifugal term stays finite on every node.

mod fd;
mod numerov;
pub mod tridiag;

pub use fd::{fd_spectrum, fd_spectrum_unchecked, FD_COARSE_REL_TOL};
pub use numerov::numerov_eigen;

use crate::error::{require, Result};

/// Uniform grid `r_min, r_min + h, ..., r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        require(r_min > 0.0 && r_min.is_finite(), || format!("r_min must be positive, got {r_min}"))?;
        require(r_max > r_min && r_max.is_finite(), || format!("r_max ({r_max}) must exceed r_min ({r_min})"))?;
        require(n_points >= Self::MIN_POINTS, || {
            format!("need at least {} grid points, got {n_points}", Self::MIN_POINTS)
        })?;
        Ok(Self { r_min, r_max, n_points })
    }

    /// Grid with the given spacing (r_max rounded to a whole number of steps).
    pub fn with_spacing(r_min: f64, r_max: f64, h: f64) -> Result<Self> {
        require(h > 0.0, || "spacing must be positive".to_string())?;
        let steps = ((r_max - r_min) / h).round().max(1.0) as usize;
        Self::new(r_min, r_min + steps as f64 * h, steps + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    /// Same interval with roughly half as many points.
    pub fn coarsened(&self) -> Result<Self> {
        Self::new(self.r_min, self.r_max, self.n_points.div_ceil(2))
    }
}

/// A numerical eigenstate: energy, reduced function `u = r psi` sampled on
/// the grid, and the a-posteriori residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub u: Vec<f64>,
    pub residual: f64,
}

/// Second-derivative stencil used by [`residual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(u[i-1] - 2u[i] + u[i+1]) / h^2`, the discretization behind
    /// [`fd_spectrum`].
    ThreePoint,
    /// Sixth-order seven-point formula, for checking closed-form functions.
    SevenPoint,
}

impl Stencil {
    fn second_derivative(self, u: &[f64], i: usize, h: f64) -> f64 {
        match self {
            Stencil::ThreePoint => (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h),
            Stencil::SevenPoint => {
                (2.0 * (u[i - 3] + u[i + 3]) - 27.0 * (u[i - 2] + u[i + 2]) + 270.0 * (u[i - 1] + u[i + 1])
                    - 490.0 * u[i])
                    / (180.0 * h * h)
            }
        }
    }
}

/// Nodes excluded from the residual at each end of the grid.
pub const RESIDUAL_EDGE: usize = 3;

/// Relative residual of the radial equation for `psi` samples:
/// `|| -u'' + [l(l+1)/r^2 + 2(V - E)] u || / ||u||` over the interior,
/// skipping [`RESIDUAL_EDGE`] nodes at each boundary.
pub fn residual<V: Fn(f64) -> f64>(
    v: V,
    energy: f64,
    psi: &[f64],
    l: f64,
    grid: &RadialGrid,
    stencil: Stencil,
) -> f64 {
    assert_eq!(psi.len(), grid.n_points, "samples must align with the grid");
    let u: Vec<f64> = psi.iter().zip(grid.points()).map(|(p, r)| p * r).collect();
    reduced_residual(v, energy, &u, l, grid, stencil)
}

/// [`residual`] for samples of the reduced function `u` directly.
pub fn reduced_residual<V: Fn(f64) -> f64>(
    v: V,
    energy: f64,
    u: &[f64],
    l: f64,
    grid: &RadialGrid,
    stencil: Stencil,
) -> f64 {
    assert_eq!(u.len(), grid.n_points, "samples must align with the grid");
    let h = grid.spacing();
    let centrifugal = l * (l + 1.0);
    let mut res2 = 0.0;
    let mut norm2 = 0.0;
    for i in RESIDUAL_EDGE..grid.n_points - RESIDUAL_EDGE {
        let r = grid.point(i);
        let lhs = -stencil.second_derivative(u, i, h) + (centrifugal / (r * r) + 2.0 * (v(r) - energy)) * u[i];
        res2 += lhs * lhs;
        norm2 += u[i] * u[i];
    }
    if norm2 == 0.0 {
        return f64::INFINITY;
    }
    (res2 / norm2).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_geometry() {
        let g = RadialGrid::new(1.0, 2.0, 101).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.point(100), 2.0);
        assert!(RadialGrid::new(0.0, 1.0, 100).is_err());
        assert!(RadialGrid::new(1.0, 1.0, 100).is_err());
        assert!(RadialGrid::new(0.1, 1.0, 15).is_err());
    }

    #[test]
    fn seven_point_stencil_is_sixth_order_exact() {
        let g = RadialGrid::new(0.5, 1.5, 41).unwrap();
        let u: Vec<f64> = g.points().map(|r| r.powi(6)).collect();
        let h = g.spacing();
        let d2 = Stencil::SevenPoint.second_derivative(&u, 20, h);
        assert!((d2 - 30.0 * g.point(20).powi(4)).abs() < 1e-9);
    }

    #[test]
    fn wrong_energy_is_visible() {
        let g = RadialGrid::new(1e-3, 12.0, 4000).unwrap();
        let psi: Vec<f64> = g.points().map(|r| (-r * r / 2.0).exp()).collect();
        let v = |r: f64| 0.5 * r * r;
        assert!(residual(v, 1.5, &psi, 0.0, &g, Stencil::SevenPoint) < 1e-8);
        assert!(residual(v, 1.6, &psi, 0.0, &g, Stencil::SevenPoint) > 1e-2);
    }
}
