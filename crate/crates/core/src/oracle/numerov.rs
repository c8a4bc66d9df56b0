use super::{reduced_residual, Eigenpair, RadialGrid, Stencil};
use crate::error::{require, Error, Result};

const ENERGY_TOL: f64 = 1e-12;
const RESCALE_AT: f64 = 1e100;

/// One eigenstate inside `bracket` by Numerov shooting.
///
/// The solution is integrated outward from the regular start
/// `u ~ r^(l+1)` and inward from `u(r_max) = 0`; the normalized Wronskian
/// of the two pieces at a fixed matching node is the matching function.
/// Its root is found by bisection with secant steps.
pub fn numerov_eigen<V: Fn(f64) -> f64>(v: V, l: u32, grid: &RadialGrid, bracket: (f64, f64)) -> Result<Eigenpair> {
    let (mut lo, mut hi) = bracket;
    require(lo < hi && lo.is_finite() && hi.is_finite(), || format!("invalid bracket ({lo}, {hi})"))?;

    let lf = f64::from(l);
    let radii: Vec<f64> = grid.points().collect();
    let potential: Vec<f64> = radii.iter().map(|&r| v(r)).collect();
    let matching = matching_node(&radii, &potential, lf, 0.5 * (lo + hi));
    let shoot = |e: f64| Shot::new(&radii, &potential, lf, e, grid.spacing(), matching);

    let mut f_lo = shoot(lo).mismatch();
    let f_hi = shoot(hi).mismatch();
    if f_lo * f_hi > 0.0 || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::NoSignChange { lo, hi });
    }

    let mut f_hi = f_hi;
    let mut energy = 0.5 * (lo + hi);
    for _ in 0..200 {
        // Secant proposal, falling back to bisection when it leaves the bracket.
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = 0.5 * (lo + hi);
        let guess = if secant.is_finite() && secant > lo && secant < hi && (hi - lo) < 0.5 * (bracket.1 - bracket.0) {
            secant
        } else {
            mid
        };
        energy = guess;
        let f = shoot(guess).mismatch();
        if f == 0.0 {
            break;
        }
        if (f < 0.0) == (f_lo < 0.0) {
            lo = guess;
            f_lo = f;
        } else {
            hi = guess;
            f_hi = f;
        }
        if hi - lo < ENERGY_TOL {
            energy = 0.5 * (lo + hi);
            break;
        }
        // Secant steps can stall one endpoint; force a bisection then.
        let mid_f = shoot(0.5 * (lo + hi)).mismatch();
        let mid = 0.5 * (lo + hi);
        if (mid_f < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = mid_f;
        } else {
            hi = mid;
            f_hi = mid_f;
        }
        if hi - lo < ENERGY_TOL {
            energy = 0.5 * (lo + hi);
            break;
        }
    }

    let u = shoot(energy).assemble();
    let residual = reduced_residual(&v, energy, &u, lf, grid, Stencil::SevenPoint);
    Ok(Eigenpair { energy, u, residual })
}

/// Outermost classically allowed node for the trial energy, kept away from
/// the grid ends; the midpoint when the whole grid is forbidden.
fn matching_node(radii: &[f64], potential: &[f64], l: f64, energy: f64) -> usize {
    let n = radii.len();
    let allowed = |i: usize| energy > potential[i] + l * (l + 1.0) / (2.0 * radii[i] * radii[i]);
    let node = (0..n).rev().find(|&i| allowed(i)).unwrap_or(n / 2);
    node.clamp(4, n - 5)
}

struct Shot {
    outward: Vec<f64>,
    inward: Vec<f64>,
    matching: usize,
}

impl Shot {
    fn new(radii: &[f64], potential: &[f64], l: f64, energy: f64, h: f64, matching: usize) -> Self {
        let n = radii.len();
        // u'' = g u with g = l(l+1)/r^2 + 2(V - E)
        let g: Vec<f64> = radii
            .iter()
            .zip(potential)
            .map(|(&r, &v)| l * (l + 1.0) / (r * r) + 2.0 * (v - energy))
            .collect();
        let k = h * h / 12.0;
        let step = |u_prev: f64, u_cur: f64, g_prev: f64, g_cur: f64, g_next: f64| {
            (2.0 * u_cur * (1.0 + 5.0 * k * g_cur) - u_prev * (1.0 - k * g_prev)) / (1.0 - k * g_next)
        };

        let mut outward = vec![0.0; matching + 2];
        outward[0] = radii[0].powf(l + 1.0);
        outward[1] = radii[1].powf(l + 1.0);
        for i in 1..matching + 1 {
            outward[i + 1] = step(outward[i - 1], outward[i], g[i - 1], g[i], g[i + 1]);
            if outward[i + 1].abs() > RESCALE_AT {
                outward[..=i + 1].iter_mut().for_each(|x| *x /= RESCALE_AT);
            }
        }

        // inward[j] holds node n-1-j.
        let len_in = n - matching;
        let mut inward = vec![0.0; len_in];
        inward[1] = 1e-30;
        for j in 1..len_in - 1 {
            let i = n - 1 - j;
            inward[j + 1] = step(inward[j - 1], inward[j], g[i + 1], g[i], g[i - 1]);
            if inward[j + 1].abs() > RESCALE_AT {
                inward[..=j + 1].iter_mut().for_each(|x| *x /= RESCALE_AT);
            }
        }
        Self { outward, inward, matching }
    }

    fn inward_at(&self, node: usize) -> f64 {
        self.inward[self.inward.len() - 1 - (node - self.matching)]
    }

    /// Wronskian-type mismatch, scaled to be independent of the pieces'
    /// amplitudes. Continuous in E and zero exactly at eigenvalues.
    fn mismatch(&self) -> f64 {
        let m = self.matching;
        let (o0, o1) = (self.outward[m], self.outward[m + 1]);
        let (i0, i1) = (self.inward_at(m), self.inward_at(m + 1));
        (o1 * i0 - o0 * i1) / (o0.hypot(o1) * i0.hypot(i1))
    }

    fn assemble(&self) -> Vec<f64> {
        let m = self.matching;
        let scale = if self.inward_at(m) != 0.0 {
            self.outward[m] / self.inward_at(m)
        } else {
            self.outward[m + 1] / self.inward_at(m + 1)
        };
        let mut u: Vec<f64> = self.outward[..m].to_vec();
        u.extend(self.inward.iter().rev().map(|x| x * scale));
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if u.iter().find(|x| x.abs() > 1e-12 * norm).copied().unwrap_or(1.0) < 0.0 {
            -1.0
        } else {
            1.0
        };
        u.iter_mut().for_each(|x| *x *= sign / norm);
        u
    }
}
