//! The alpha-family of central potentials produced by the similarity
//! transformation, its couplings, and the Coulomb / oscillator members.

use crate::engine::OperatorA;
use crate::error::{require, Error, Result};

/// Tolerance for recognising `alpha = 1` and `alpha = 2`.
pub const ALPHA_TOL: f64 = 1e-12;

/// hbar, mass, Coulomb strength `e^2 / (4 pi eps0)` and oscillator
/// frequency. Defaults to natural units (all ones).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
    pub coulomb_strength: f64,
    pub omega: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

impl PhysicalConstants {
    pub const fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            coulomb_strength: 1.0,
            omega: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require(self.hbar > 0.0 && self.hbar.is_finite(), || format!("hbar must be positive, got {}", self.hbar))?;
        require(self.mass > 0.0 && self.mass.is_finite(), || format!("mass must be positive, got {}", self.mass))?;
        require(self.coulomb_strength.is_finite() && self.omega.is_finite(), || {
            "physical constants must be finite".to_string()
        })
    }

    /// `hbar^2 / (2 m)`.
    pub fn kinetic_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// Converts a reduced (dimensionless) quantity `2 m lambda^2 X / hbar^2`
    /// back to energy units.
    pub fn energy_from_reduced(&self, reduced: f64, lambda: f64) -> f64 {
        reduced * self.kinetic_scale() / (lambda * lambda)
    }

    pub fn reduced_from_energy(&self, energy: f64, lambda: f64) -> f64 {
        energy * lambda * lambda / self.kinetic_scale()
    }
}

/// Transformation parameters plus the physical setting; every formula in
/// the crate reads from this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub epsilon: f64,
    /// Length scale, `r = lambda * rho`.
    pub lambda: f64,
    /// Angular momentum; may be non-integer for the zero-energy solver.
    pub l: f64,
    pub constants: PhysicalConstants,
    /// Set by the Coulomb / oscillator constructors.
    pub sigma: Option<f64>,
}

impl FamilyParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        a: f64,
        b: f64,
        c: f64,
        epsilon: f64,
        lambda: f64,
        l: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            a,
            b,
            c,
            epsilon,
            lambda,
            l,
            constants,
            sigma: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.a != 0.0, || "a must be nonzero".to_string())?;
        require(
            [self.alpha, self.a, self.b, self.c, self.epsilon].iter().all(|v| v.is_finite()),
            || "family parameters must be finite".to_string(),
        )?;
        require(self.lambda > 0.0 && self.lambda.is_finite(), || format!("lambda must be positive, got {}", self.lambda))?;
        require(self.l >= 0.0 && self.l.is_finite(), || format!("l must be non-negative, got {}", self.l))?;
        self.constants.validate()
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_l(mut self, l: f64) -> Self {
        self.l = l;
        self
    }

    /// `A0 = (b - 6a + 2 a alpha) / (2a)`, the power in the S-factor.
    pub fn a0(&self) -> f64 {
        (self.b - 6.0 * self.a + 2.0 * self.a * self.alpha) / (2.0 * self.a)
    }

    pub fn operator_a(&self) -> OperatorA {
        OperatorA {
            a: self.a,
            b: self.b,
            c: self.c,
            alpha: self.alpha,
        }
    }

    /// `[a(2-alpha)(3-alpha) + b alpha - 2b + c] / a`.
    fn shift_bracket(&self) -> f64 {
        let (a, b, c, al) = (self.a, self.b, self.c, self.alpha);
        (a * (2.0 - al) * (3.0 - al) + b * al - 2.0 * b + c) / a
    }

    /// `A0(A0+1) - bracket`: the effective `l(l+1)` the transformed
    /// equation carries before the centrifugal term is split off.
    pub fn effective_centrifugal(&self) -> f64 {
        let a0 = self.a0();
        a0 * (a0 + 1.0) - self.shift_bracket()
    }
}

/// Couplings `g1, g2, g3` of `V(r) = E + g1 r^(2(alpha-1)) + g2 r^(alpha-2) + g3 r^-2`
/// and the tilde couplings they are scaled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub tg1: f64,
    pub tg2: f64,
    pub tg3: f64,
    pub exponents: [f64; 3],
}

impl CouplingSet {
    pub fn potential(&self, energy: f64, r: f64) -> f64 {
        potential_eval(self, energy, r)
    }
}

pub fn couplings(p: &FamilyParams) -> CouplingSet {
    let PhysicalConstants { hbar, mass, .. } = p.constants;
    let (a, al, lam) = (p.a, p.alpha, p.lambda);
    let h2 = hbar * hbar;
    let lam2 = lam * lam;

    let tg1 = h2 / (8.0 * mass * a * a * lam2);
    let tg2 = h2 * (2.0 * p.a0() - al + 5.0 - 2.0 * p.epsilon) / (4.0 * mass * a * lam2);
    let tg3 = h2 * (p.effective_centrifugal() - p.l * (p.l + 1.0)) / (2.0 * mass * lam2);

    CouplingSet {
        g1: tg1 * lam.powf(2.0 * (1.0 - al)),
        g2: tg2 * lam.powf(2.0 - al),
        g3: tg3 * lam2,
        tg1,
        tg2,
        tg3,
        exponents: [2.0 * (al - 1.0), al - 2.0, -2.0],
    }
}

pub fn potential_eval(cs: &CouplingSet, energy: f64, r: f64) -> f64 {
    let [e1, e2, e3] = cs.exponents;
    energy + cs.g1 * r.powf(e1) + cs.g2 * r.powf(e2) + cs.g3 * r.powf(e3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlphaClass {
    Coulomb,
    Oscillator,
    NotConstantIndependent,
}

impl AlphaClass {
    pub fn is_constant_independent(self) -> bool {
        self != AlphaClass::NotConstantIndependent
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AlphaClass::Coulomb => "coulomb",
            AlphaClass::Oscillator => "oscillator",
            AlphaClass::NotConstantIndependent => "not-constant-independent",
        }
    }
}

/// A member of the family can absorb E into a coupling only if one of the
/// two non-centrifugal exponents, `2(alpha-1)` or `alpha-2`, is zero.
pub fn classify_alpha(alpha: f64) -> AlphaClass {
    if (2.0 * (alpha - 1.0)).abs() <= 2.0 * ALPHA_TOL {
        AlphaClass::Coulomb
    } else if (alpha - 2.0).abs() <= ALPHA_TOL {
        AlphaClass::Oscillator
    } else {
        AlphaClass::NotConstantIndependent
    }
}

/// alpha = 1 member with `a = 1/(2 sigma)`, `b = 2/sigma`,
/// `c = (2 - l(l+1)) / (2 sigma)`. sigma is tied to the energy through
/// `sigma^2 = -2 m lambda^2 E / hbar^2`; see [`crate::spectrum::energy_coulomb`].
pub fn coulomb_params(l: u32, sigma: f64, constants: PhysicalConstants, lambda: f64) -> Result<FamilyParams> {
    require(sigma != 0.0 && sigma.is_finite(), || "sigma must be finite and nonzero".to_string())?;
    let ll = f64::from(l) * (f64::from(l) + 1.0);
    let mut p = FamilyParams::new(
        1.0,
        1.0 / (2.0 * sigma),
        2.0 / sigma,
        (2.0 - ll) / (2.0 * sigma),
        0.0,
        lambda,
        f64::from(l),
        constants,
    )?;
    p.sigma = Some(sigma);
    Ok(p)
}

/// alpha = 2 member with `sigma = -m omega lambda^2 / hbar`,
/// `a = 1/(2 sigma)`, `b = 1/sigma`, `c = -l(l+1)/(2 sigma)`.
pub fn oscillator_params(l: u32, constants: PhysicalConstants, lambda: f64) -> Result<FamilyParams> {
    require(constants.omega > 0.0, || format!("omega must be positive, got {}", constants.omega))?;
    let sigma = -constants.mass * constants.omega * lambda * lambda / constants.hbar;
    oscillator_params_with_sigma(l, sigma, constants, lambda)
}

/// Oscillator-shaped parameters for an arbitrary sigma (sigma > 0 gives a
/// growing Gaussian and is rejected later by branch selection).
pub fn oscillator_params_with_sigma(
    l: u32,
    sigma: f64,
    constants: PhysicalConstants,
    lambda: f64,
) -> Result<FamilyParams> {
    require(sigma != 0.0 && sigma.is_finite(), || "sigma must be finite and nonzero".to_string())?;
    let ll = f64::from(l) * (f64::from(l) + 1.0);
    let mut p = FamilyParams::new(
        2.0,
        1.0 / (2.0 * sigma),
        1.0 / sigma,
        -ll / (2.0 * sigma),
        0.0,
        lambda,
        f64::from(l),
        constants,
    )?;
    p.sigma = Some(sigma);
    Ok(p)
}

/// Angular momentum making `g3` vanish for the given operator parameters:
/// `l(l+1) = A0(A0+1) - [a(2-alpha)(3-alpha) + b alpha - 2b + c]/a`.
/// Returns `None` when the right side is negative.
pub fn solve_l_for_zero_energy(alpha: f64, a: f64, b: f64, c: f64) -> Result<Option<f64>> {
    require(a != 0.0, || "a must be nonzero".to_string())?;
    let probe = FamilyParams {
        alpha,
        a,
        b,
        c,
        epsilon: 0.0,
        lambda: 1.0,
        l: 0.0,
        constants: PhysicalConstants::natural(),
        sigma: None,
    };
    let rhs = probe.effective_centrifugal();
    if !rhs.is_finite() {
        return Err(Error::InvalidParameter("non-finite l(l+1) target".into()));
    }
    if rhs < 0.0 {
        return Ok(None);
    }
    Ok(Some(0.5 * (-1.0 + (1.0 + 4.0 * rhs).sqrt())))
}
