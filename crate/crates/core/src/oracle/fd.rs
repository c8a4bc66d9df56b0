use super::tridiag::SymTridiagonal;
use super::{reduced_residual, Eigenpair, RadialGrid, Stencil};
use crate::error::{require, Error, Result};

/// Relative disagreement between the grid and its coarsening above which
/// the ground state is considered unresolved.
pub const FD_COARSE_REL_TOL: f64 = 1e-3;

/// Lowest `count` states of the reduced radial equation by the three-point
/// finite-difference matrix, with a grid-resolution guard on the ground state.
pub fn fd_spectrum<V: Fn(f64) -> f64>(v: V, l: u32, grid: &RadialGrid, count: usize) -> Result<Vec<Eigenpair>> {
    let pairs = fd_spectrum_unchecked(&v, l, grid, count)?;
    let coarse = grid.coarsened()?;
    let e_coarse = fd_matrix(&v, l, &coarse).eigenvalue(0) / 2.0;
    let e_fine = pairs[0].energy;
    let scale = e_fine.abs().max(f64::MIN_POSITIVE);
    if (e_fine - e_coarse).abs() > FD_COARSE_REL_TOL * scale {
        return Err(Error::GridTooCoarse {
            fine: e_fine,
            coarse: e_coarse,
        });
    }
    Ok(pairs)
}

/// [`fd_spectrum`] without the coarse-grid comparison.
pub fn fd_spectrum_unchecked<V: Fn(f64) -> f64>(
    v: V,
    l: u32,
    grid: &RadialGrid,
    count: usize,
) -> Result<Vec<Eigenpair>> {
    require(count >= 1, || "count must be at least 1".to_string())?;
    require(count < grid.n_points - 1, || "count exceeds the number of grid unknowns".to_string())?;
    let matrix = fd_matrix(&v, l, grid);
    let lf = f64::from(l);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // The matrix is 2H, so halve to get energies.
        let two_e = matrix.eigenvalue(k);
        let energy = two_e / 2.0;
        require(energy.is_finite(), || "non-finite eigenvalue; check the potential".to_string())?;
        let mut u = matrix.eigenvector(two_e);
        u.push(0.0);
        let residual = reduced_residual(&v, energy, &u, lf, grid, Stencil::ThreePoint);
        out.push(Eigenpair { energy, u, residual });
    }
    Ok(out)
}

/// `-d^2 + l(l+1)/r^2 + 2V` on nodes `0 .. n-2`; the last node is the
/// Dirichlet wall. Node 0 sees a ghost value extrapolated linearly through
/// the origin, `u(r_min - h) = u(r_min) (r_min - h) / r_min`, which keeps
/// the matrix symmetric.
fn fd_matrix<V: Fn(f64) -> f64>(v: &V, l: u32, grid: &RadialGrid) -> SymTridiagonal {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let centrifugal = f64::from(l) * (f64::from(l) + 1.0);
    let unknowns = grid.n_points - 1;
    let ghost = (grid.r_min - h) / grid.r_min;

    let diag: Vec<f64> = (0..unknowns)
        .map(|i| {
            let r = grid.point(i);
            let kinetic = if i == 0 { (2.0 - ghost) * inv_h2 } else { 2.0 * inv_h2 };
            kinetic + centrifugal / (r * r) + 2.0 * v(r)
        })
        .collect();
    SymTridiagonal::new(diag, vec![-inv_h2; unknowns - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_ground_state() {
        let g = RadialGrid::new(1e-3, 20.0, 4000).unwrap();
        let e = fd_spectrum(|r| 0.5 * r * r, 0, &g, 1).unwrap();
        assert!((e[0].energy - 1.5).abs() < 1e-4, "{}", e[0].energy);
    }

    #[test]
    fn coulomb_ground_state() {
        let g = RadialGrid::new(1e-3, 60.0, 4000).unwrap();
        let e = fd_spectrum(|r| -1.0 / r, 0, &g, 1).unwrap();
        assert!((e[0].energy + 0.5).abs() < 1e-3, "{}", e[0].energy);
    }

    #[test]
    fn particle_in_a_box() {
        let len = 2.0;
        let g = RadialGrid::new(1e-3, len, 2000).unwrap();
        let e = fd_spectrum(|_| 0.0, 0, &g, 4).unwrap();
        for (k, pair) in e.iter().enumerate() {
            let exact = ((k + 1) as f64 * std::f64::consts::PI / len).powi(2) / 2.0;
            assert!((pair.energy - exact).abs() < 2e-3 * exact, "k={k}: {} vs {exact}", pair.energy);
        }
    }

    #[test]
    fn eigenvectors_solve_their_own_discretization() {
        let g = RadialGrid::new(1e-3, 20.0, 4000).unwrap();
        let e = fd_spectrum(|r| 0.5 * r * r, 0, &g, 3).unwrap();
        for pair in &e {
            assert!(pair.residual < 1e-10, "{}", pair.residual);
            assert_eq!(*pair.u.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let g = RadialGrid::new(1e-3, 60.0, 40).unwrap();
        assert!(matches!(fd_spectrum(|r| -1.0 / r, 0, &g, 1), Err(Error::GridTooCoarse { .. })));
    }
}
