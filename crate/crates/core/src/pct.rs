//! Point canonical transformations `rho -> f(rho)` of the alpha-family.
//!
//! Substituting `x = f(rho)` and `u(rho) = f'(rho)^(-1/2) U(f(rho))` into the
//! reduced equation `U'' = [C/x^2 + x^(2 alpha - 2)/(4a^2) + G x^(alpha-2)] U`
//! gives a Schrodinger equation in `rho` whose potential picks up the
//! Schwarzian of `f`. With `f = e^rho` every coefficient but the energy is
//! independent of rho-scale constants, at the price of fixing `l`.
//!
//! All potentials here are returned in energy units at `r = lambda rho`;
//! `reduced_*` variants give `2 m lambda^2 V / hbar^2`.

use crate::error::{require, Error, Result};
use crate::family::FamilyParams;
use crate::spectrum::{discriminant, epsilon_n, laguerre, Branch};

/// `f` and its first three derivatives at a point, supplied analytically.
pub trait PointMap {
    /// `[f, f', f'', f''']` at `rho`.
    fn derivatives(&self, rho: f64) -> [f64; 4];

    fn eval(&self, rho: f64) -> f64 {
        self.derivatives(rho)[0]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl PointMap for IdentityMap {
    fn derivatives(&self, rho: f64) -> [f64; 4] {
        [rho, 1.0, 0.0, 0.0]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExponentialMap;

impl PointMap for ExponentialMap {
    fn derivatives(&self, rho: f64) -> [f64; 4] {
        let e = rho.exp();
        [e, e, e, e]
    }
}

/// `f = scale * rho + offset`.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub scale: f64,
    pub offset: f64,
}

impl PointMap for AffineMap {
    fn derivatives(&self, rho: f64) -> [f64; 4] {
        [self.scale * rho + self.offset, self.scale, 0.0, 0.0]
    }
}

/// A user-supplied map from closures.
pub struct PctMap<F> {
    derivatives: F,
}

impl<F: Fn(f64) -> [f64; 4]> PctMap<F> {
    pub fn new(derivatives: F) -> Self {
        Self { derivatives }
    }
}

impl<F: Fn(f64) -> [f64; 4]> PointMap for PctMap<F> {
    fn derivatives(&self, rho: f64) -> [f64; 4] {
        (self.derivatives)(rho)
    }
}

/// Coefficient `G = [b + a(alpha - 1 - 2 eps)] / (2 a^2)` of `x^(alpha-2)`.
fn middle_coefficient(p: &FamilyParams) -> f64 {
    (p.b + p.a * (p.alpha - 1.0 - 2.0 * p.epsilon)) / (2.0 * p.a * p.a)
}

/// `(b/2a)(b/2a - 1) - c/a`.
fn inverse_square_coefficient(p: &FamilyParams) -> f64 {
    let h = p.b / (2.0 * p.a);
    h * (h - 1.0) - p.c / p.a
}

/// Reduced potential after the transformation, with `energy` in energy units.
pub fn reduced_pct_potential<M: PointMap + ?Sized>(p: &FamilyParams, map: &M, energy: f64, rho: f64) -> f64 {
    let [f, f1, f2, f3] = map.derivatives(rho);
    let al = p.alpha;
    let e_reduced = p.constants.reduced_from_energy(energy, p.lambda);
    let ratio = f2 / f1;
    e_reduced + (f1 * f.powf(al - 1.0)).powi(2) / (4.0 * p.a * p.a)
        + middle_coefficient(p) * f1 * f1 * f.powf(al - 2.0)
        + inverse_square_coefficient(p) * (f1 / f).powi(2)
        - p.l * (p.l + 1.0) / (rho * rho)
        + 0.75 * ratio * ratio
        - 0.5 * f3 / f1
}

/// Potential of the transformed problem at `r = lambda rho`.
pub fn pct_potential<M: PointMap + ?Sized>(p: &FamilyParams, map: &M, energy: f64, rho: f64) -> f64 {
    p.constants
        .energy_from_reduced(reduced_pct_potential(p, map, energy, rho), p.lambda)
}

/// `f = e^rho` case with the energy absorbed:
/// `e^(2 alpha rho)/(4a^2) + G e^(alpha rho) - l(l+1)/rho^2`.
pub fn reduced_exp_map_potential(p: &FamilyParams, rho: f64) -> f64 {
    let al = p.alpha;
    (2.0 * al * rho).exp() / (4.0 * p.a * p.a) + middle_coefficient(p) * (al * rho).exp()
        - p.l * (p.l + 1.0) / (rho * rho)
}

pub fn exp_map_potential(p: &FamilyParams, rho: f64) -> f64 {
    p.constants.energy_from_reduced(reduced_exp_map_potential(p, rho), p.lambda)
}

/// Energy that cancels the constant part of the `f = e^rho` potential:
/// `2 m lambda^2 E / hbar^2 + (b/2a)(b/2a - 1) - c/a + 1/4 = 0`, which is
/// `-Delta/4` in reduced units. No dependence on `l`.
pub fn pct_energy(p: &FamilyParams) -> Result<f64> {
    require(p.a != 0.0, || "a must be nonzero".to_string())?;
    let reduced = -(inverse_square_coefficient(p) + 0.25);
    Ok(p.constants.energy_from_reduced(reduced, p.lambda))
}

/// Conditionally solvable state of the `f = e^rho` potential at fixed `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PctSolution {
    /// Parameters with epsilon fixed so the operator exponential terminates at `n`.
    pub params: FamilyParams,
    pub l_fixed: u32,
    pub energy: f64,
    pub n: u32,
    /// Sign of `sqrt(Delta)` in the wavefunction.
    pub branch: Branch,
}

impl PctSolution {
    pub fn new(params: FamilyParams, l_fixed: u32, n: u32, branch: Branch) -> Result<Self> {
        let params = params.with_l(f64::from(l_fixed));
        params.validate()?;
        require(params.alpha != 0.0, || "alpha must be nonzero".to_string())?;
        let eps = epsilon_n(&params, n, branch.partner())?;
        let params = params.with_epsilon(eps);
        Ok(Self {
            params,
            l_fixed,
            energy: pct_energy(&params)?,
            n,
            branch,
        })
    }

    /// Potential this state solves, in energy units at `r = lambda rho`.
    pub fn potential(&self, rho: f64) -> f64 {
        exp_map_potential(&self.params, rho)
    }
}

/// `psi = (1/rho) f'^(-1/2) f^((±sqrt(Delta)+1)/2) exp(f^alpha/(2 a alpha)) L_n^(±sqrt(Delta)/alpha)(-f^alpha/(a alpha))`
/// with `f = e^rho`, unnormalized.
pub fn pct_wavefunction(sol: &PctSolution, rho: f64) -> f64 {
    let p = &sol.params;
    let root = sol.branch.sign() * discriminant(p).sqrt();
    let fa = (p.alpha * rho).exp();
    // f'^(-1/2) f^((root+1)/2) = e^(root rho / 2) for f = e^rho
    (0.5 * root * rho).exp() * (fa / (2.0 * p.a * p.alpha)).exp()
        * laguerre(sol.n, root / p.alpha, -fa / (p.a * p.alpha))
        / rho
}

/// Coefficients of `e^(-2 rho)` and `e^(-rho)` in the alpha = -1 potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseCoefficients {
    pub quadratic: f64,
    pub linear: f64,
}

/// Reduced-unit Morse form of the `f = e^rho` potential at alpha = -1.
pub fn morse_view(p: &FamilyParams) -> Result<MorseCoefficients> {
    if (p.alpha + 1.0).abs() > crate::family::ALPHA_TOL {
        return Err(Error::WrongAlpha(p.alpha));
    }
    Ok(MorseCoefficients {
        quadratic: 1.0 / (4.0 * p.a * p.a),
        linear: middle_coefficient(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{couplings, PhysicalConstants};

    const NAT: PhysicalConstants = PhysicalConstants::natural();

    fn params(alpha: f64, a: f64, b: f64, c: f64, eps: f64, l: f64) -> FamilyParams {
        FamilyParams::new(alpha, a, b, c, eps, 1.0, l, NAT).unwrap()
    }

    #[test]
    fn identity_map_reproduces_family_potential() {
        let p = FamilyParams::new(1.7, -0.4, 0.9, 0.3, 0.25, 1.3, 2.0, NAT).unwrap();
        let cs = couplings(&p);
        let energy = -0.8;
        for rho in [0.2, 0.9, 2.5] {
            let direct = cs.potential(energy, p.lambda * rho);
            let via = pct_potential(&p, &IdentityMap, energy, rho);
            assert!((direct - via).abs() < 1e-12 * direct.abs().max(1.0), "{direct} vs {via}");
        }
    }

    #[test]
    fn exponential_map_matches_closed_form() {
        let p = params(0.7, -0.6, 0.4, -0.9, 0.3, 1.0);
        let e = pct_energy(&p).unwrap();
        for i in 0..20 {
            let rho = 0.1 + 0.5 * i as f64;
            let a = pct_potential(&p, &ExponentialMap, e, rho);
            let b = exp_map_potential(&p, rho);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0), "rho={rho}: {a} vs {b}");
        }
    }

    #[test]
    fn scale_map_by_substitution() {
        // f = 2 rho: f' = 2, higher derivatives vanish.
        let p = params(1.4, 0.8, -0.3, 0.6, 0.1, 1.0);
        let map = AffineMap { scale: 2.0, offset: 0.0 };
        let rho = 0.85_f64;
        let x = 2.0 * rho;
        let g = (p.b + p.a * (p.alpha - 1.0 - 2.0 * p.epsilon)) / (2.0 * p.a * p.a);
        let h = p.b / (2.0 * p.a);
        let want = 4.0 * x.powf(2.0 * p.alpha - 2.0) / (4.0 * p.a * p.a) + g * 4.0 * x.powf(p.alpha - 2.0)
            + (h * (h - 1.0) - p.c / p.a) / (rho * rho)
            - 2.0 / (rho * rho);
        let got = reduced_pct_potential(&p, &map, 0.0, rho);
        assert!((got - want).abs() < 1e-12 * want.abs());
    }

    #[test]
    fn exp_map_potential_decays_for_negative_alpha() {
        let p = params(-0.5, 0.7, 0.2, 0.1, 0.0, 0.0);
        assert!(reduced_exp_map_potential(&p, 80.0).abs() < 1e-16);
    }

    #[test]
    fn energy_examples() {
        // Delta = (1 - b/a)^2 - 4c/a; E = -Delta/8 in natural units (lambda = 1).
        let p = params(2.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(pct_energy(&p).unwrap(), -1.0 / 8.0);
        let p = params(4.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        assert_eq!(pct_energy(&p).unwrap(), 0.0);
        let p = params(0.6, -0.3, 0.8, 0.2, 0.0, 0.0);
        assert_eq!(pct_energy(&p).unwrap(), pct_energy(&p.with_l(1.0)).unwrap());
    }

    #[test]
    fn ground_state_structure() {
        let p = params(-1.0, 0.2, 0.5, -0.4, 0.0, 0.0);
        let sol = PctSolution::new(p, 0, 0, Branch::Minus).unwrap();
        let root = -discriminant(&sol.params).sqrt();
        // log(rho psi) = root rho / 2 + e^(alpha rho) / (2 a alpha)
        for rho in [0.3, 1.1, 4.0] {
            let lhs = (rho * pct_wavefunction(&sol, rho)).ln();
            let rhs = 0.5 * root * rho + -(-rho).exp() / (2.0 * 0.2);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn second_excited_state_has_two_nodes() {
        // Laguerre argument e^(-rho)/a spans (0, 1/a) on rho > 0; a small a
        // puts both roots of L_2 inside.
        let p = params(-1.0, 0.05, 0.1, -0.3, 0.0, 0.0);
        let sol = PctSolution::new(p, 0, 2, Branch::Minus).unwrap();
        let signs: Vec<bool> = (1..20000).map(|i| pct_wavefunction(&sol, i as f64 * 1e-3) > 0.0).collect();
        assert_eq!(signs.windows(2).filter(|s| s[0] != s[1]).count(), 2);
    }

    #[test]
    fn morse_coefficients() {
        let p = params(-1.0, -0.5, 0.3, 0.0, 0.2, 0.0);
        let m = morse_view(&p).unwrap();
        assert_eq!(m.quadratic, 1.0);
        assert_eq!(m.linear, (0.3 - 0.5 * (-2.0 - 0.4)) / 0.5);
        assert!(matches!(morse_view(&params(0.0, 1.0, 0.0, 0.0, 0.0, 0.0)), Err(Error::WrongAlpha(_))));
    }
}
