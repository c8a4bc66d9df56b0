//! Closed-form spectra and eigenfunctions of the alpha-family.
//!
//! Sign conventions: `Branch` in [`epsilon_n`] is the sign in front of
//! `sqrt(Delta)` in the eigenvalue formula. The wavefunction that belongs
//! to `epsilon_n(.., branch)` carries the *opposite* sign in its power
//! `rho^((±sqrt(Delta)-1)/2)` and Laguerre order; [`Branch::partner`]
//! converts between the two. The pairing is fixed by where the operator
//! exponential terminates, not by the printed signs.

use crate::engine::{exp_series, ExpSeries, MonomialTerm};
use crate::error::{require, Error, Result};
use crate::family::{coulomb_params, oscillator_params, FamilyParams, PhysicalConstants};
use crate::oracle::RadialGrid;
use crate::quadrature::simpson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    /// Eigenvalue branch <-> wavefunction branch.
    pub fn partner(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

/// One analytic level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub n: u32,
    pub l: u32,
    pub branch: Branch,
    pub epsilon_n: f64,
    pub energy: f64,
}

/// `Delta = (1 - b/a)^2 - 4c/a`.
pub fn discriminant(p: &FamilyParams) -> f64 {
    let t = 1.0 - p.b / p.a;
    t * t - 4.0 * p.c / p.a
}

/// `eps_n^± = -alpha n - (1 - b/a)/2 ± sqrt(Delta)/2`.
pub fn epsilon_n(p: &FamilyParams, n: u32, branch: Branch) -> Result<f64> {
    let delta = discriminant(p);
    if delta < 0.0 {
        return Err(Error::NegativeDiscriminant(delta));
    }
    Ok(-p.alpha * f64::from(n) - 0.5 * (1.0 - p.b / p.a) + 0.5 * branch.sign() * delta.sqrt())
}

/// `exp(A/alpha) rho^(-eps)` for the parameters' current epsilon.
pub fn eigen_series(p: &FamilyParams, max_terms: usize) -> Result<ExpSeries> {
    require(p.alpha != 0.0, || "alpha must be nonzero for exp(A/alpha)".to_string())?;
    exp_series(&p.operator_a(), 1.0 / p.alpha, MonomialTerm::power(-p.epsilon), max_terms)
}

/// sigma solving the Coulomb self-consistency `g2 = -e^2/(4 pi eps0)` at
/// level `n + l + 1`.
pub fn coulomb_sigma(n: u32, l: u32, constants: &PhysicalConstants, lambda: f64) -> f64 {
    let principal = f64::from(n + l + 1);
    -constants.mass * constants.coulomb_strength * lambda / (constants.hbar * constants.hbar * principal)
}

/// Coulomb parameters for level (n, l) with epsilon set to `eps_n^-`.
pub fn coulomb_level(n: u32, l: u32, constants: PhysicalConstants, lambda: f64) -> Result<FamilyParams> {
    let p = coulomb_params(l, coulomb_sigma(n, l, &constants, lambda), constants, lambda)?;
    let eps = epsilon_n(&p, n, Branch::Minus)?;
    Ok(p.with_epsilon(eps))
}

/// `E = -m (e^2/4 pi eps0)^2 / (2 hbar^2 (n+l+1)^2)`.
pub fn energy_coulomb(n: u32, l: u32, constants: &PhysicalConstants, lambda: f64) -> Result<SpectralLine> {
    constants.validate()?;
    require(lambda > 0.0, || "lambda must be positive".to_string())?;
    let p = coulomb_level(n, l, *constants, lambda)?;
    let principal = f64::from(n + l + 1);
    let k = constants.coulomb_strength;
    Ok(SpectralLine {
        n,
        l,
        branch: Branch::Minus,
        epsilon_n: p.epsilon,
        energy: -constants.mass * k * k / (2.0 * constants.hbar * constants.hbar * principal * principal),
    })
}

/// Oscillator parameters for level (n, l) with epsilon set to `eps_n^-`.
pub fn oscillator_level(n: u32, l: u32, constants: PhysicalConstants, lambda: f64) -> Result<FamilyParams> {
    let p = oscillator_params(l, constants, lambda)?;
    let eps = epsilon_n(&p, n, Branch::Minus)?;
    Ok(p.with_epsilon(eps))
}

/// `E = hbar omega (2n + l + 3/2)`.
pub fn energy_oscillator(n: u32, l: u32, constants: &PhysicalConstants) -> Result<SpectralLine> {
    constants.validate()?;
    let p = oscillator_level(n, l, *constants, 1.0)?;
    Ok(SpectralLine {
        n,
        l,
        branch: Branch::Minus,
        epsilon_n: p.epsilon,
        energy: constants.hbar * constants.omega * (2.0 * f64::from(n) + f64::from(l) + 1.5),
    })
}

/// Associated Laguerre polynomial `L_n^k(x)` by forward recurrence.
pub fn laguerre(n: u32, k: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let j = f64::from(j);
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Wavefunction branch whose `psi` is normalizable.
///
/// The exponential factor `exp(rho^alpha / (2 a alpha))` must decay, which
/// needs `alpha > 0` and `a alpha < 0`; near the origin `psi ~ rho^p` with
/// `p = (±sqrt(Delta) - 1)/2` must satisfy `p + 1 > -1/2`. Ties go to `+`.
pub fn branch_select(p: &FamilyParams) -> Result<Branch> {
    let delta = discriminant(p);
    if delta < 0.0 {
        return Err(Error::NegativeDiscriminant(delta));
    }
    if !(p.alpha > 0.0 && p.a * p.alpha < 0.0) {
        return Err(Error::NotNormalizable);
    }
    let integrable = |b: Branch| (b.sign() * delta.sqrt() - 1.0) / 2.0 + 1.0 > -0.5;
    [Branch::Plus, Branch::Minus]
        .into_iter()
        .find(|&b| integrable(b))
        .ok_or(Error::NotNormalizable)
}

/// Closed-form eigenfunction
/// `psi(rho) = rho^((±sqrt(Delta)-1)/2) exp(rho^alpha/(2 a alpha)) L_n^(±sqrt(Delta)/alpha)(-rho^alpha/(a alpha))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavefunction {
    pub params: FamilyParams,
    pub n: u32,
    /// Sign of `sqrt(Delta)` in the power and Laguerre order.
    pub branch: Branch,
    pub normalization: f64,
}

impl Wavefunction {
    /// Unnormalized wavefunction with the branch picked by [`branch_select`].
    pub fn new(params: FamilyParams, n: u32) -> Result<Self> {
        let branch = branch_select(&params)?;
        Ok(Self {
            params,
            n,
            branch,
            normalization: 1.0,
        })
    }

    pub fn with_branch(params: FamilyParams, n: u32, branch: Branch) -> Result<Self> {
        let delta = discriminant(&params);
        if delta < 0.0 {
            return Err(Error::NegativeDiscriminant(delta));
        }
        Ok(Self {
            params,
            n,
            branch,
            normalization: 1.0,
        })
    }

    fn root_delta(&self) -> f64 {
        discriminant(&self.params).sqrt()
    }

    pub fn origin_power(&self) -> f64 {
        (self.branch.sign() * self.root_delta() - 1.0) / 2.0
    }

    pub fn laguerre_order(&self) -> f64 {
        self.branch.sign() * self.root_delta() / self.params.alpha
    }

    /// Laguerre argument `-rho^alpha / (a alpha)`.
    pub fn laguerre_argument(&self, rho: f64) -> f64 {
        -rho.powf(self.params.alpha) / (self.params.a * self.params.alpha)
    }

    /// `psi` as a function of the dimensionless `rho`.
    pub fn eval(&self, rho: f64) -> f64 {
        let p = &self.params;
        let ra = rho.powf(p.alpha);
        self.normalization
            * rho.powf(self.origin_power())
            * (ra / (2.0 * p.a * p.alpha)).exp()
            * laguerre(self.n, self.laguerre_order(), self.laguerre_argument(rho))
    }

    /// `psi` at physical radius `r = lambda rho`.
    pub fn eval_r(&self, r: f64) -> f64 {
        self.eval(r / self.params.lambda)
    }

    /// Rescales so that `int |psi|^2 r^2 dr = 1` over `grid` (physical r).
    pub fn normalize(&self, grid: &RadialGrid) -> Result<Self> {
        let density: Vec<f64> = grid
            .points()
            .map(|r| {
                let v = self.eval_r(r);
                v * v * r * r
            })
            .collect();
        let h = grid.spacing();
        let total = simpson(&density, h);
        // Weight carried by the last tenth of the grid; a converged norm has none.
        let tail_start = density.len() - (density.len() / 10).max(4);
        let tail = simpson(&density[tail_start..], h);
        if !(total.is_finite() && total > 0.0) || tail > 1e-8 * total {
            return Err(Error::DivergentNorm { tail, total });
        }
        Ok(Self {
            normalization: self.normalization / total.sqrt(),
            ..*self
        })
    }
}

/// `psi` samples on `grid` (physical r).
pub fn sample_wavefunction(w: &Wavefunction, grid: &RadialGrid) -> Vec<f64> {
    grid.points().map(|r| w.eval_r(r)).collect()
}
