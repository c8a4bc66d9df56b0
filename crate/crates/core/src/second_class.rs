//! Second family: `(D^2 + beta D + delta) eta = 0` conjugated by
//! `exp(-gamma O)`, `O = a rho^alpha d + b rho^(alpha-1)`.
//!
//! Two versions of the coefficient functions live here. The *printed*
//! set ([`derived_coeffs`], [`f_functions`], [`reduced_second_potential`])
//! follows the closed forms term by term. The *exact* set is what the
//! conjugation actually produces; writing `k = gamma (alpha - 1)` and
//! `x = rho^(alpha-1)`:
//!
//! ```text
//! F1 = rho^2 (1 + k a x)^2
//! F2 = rho (1 + k a x) (1 + beta + k (a alpha + 2b) x)
//! F3 = b k^2 (a alpha - a + b) x^2 + b k (alpha - 1 + beta) x
//! ```
//!
//! `F1` agrees with the printed form; `F2` and `F3` do not. The exact set
//! drives the transformation-chain residual.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

use crate::engine::{exp_series, ExpSeries, MonomialTerm, OperatorO, WeightedPowerSeries, EXPONENT_MERGE_TOL};
use crate::error::{require, Error, Result};
use crate::family::{PhysicalConstants, ALPHA_TOL};
use crate::oracle::{reduced_residual, RadialGrid, Stencil};
use crate::quadrature::gauss_legendre5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondClassParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub l: u32,
    pub lambda: f64,
    pub constants: PhysicalConstants,
}

impl SecondClassParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: f64,
        beta: f64,
        delta: f64,
        gamma: f64,
        a: f64,
        b: f64,
        l: u32,
        lambda: f64,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            delta,
            gamma,
            a,
            b,
            l,
            lambda,
            constants,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require(
            [self.alpha, self.beta, self.delta, self.gamma, self.a, self.b]
                .iter()
                .all(|v| v.is_finite()),
            || "second-class parameters must be finite".to_string(),
        )?;
        require((self.alpha - 1.0).abs() > ALPHA_TOL, || "alpha = 1 leaves A2 undefined".to_string())?;
        require(self.gamma != 0.0, || "gamma must be nonzero".to_string())?;
        require(self.a != 0.0, || "a must be nonzero".to_string())?;
        require(self.lambda > 0.0 && self.lambda.is_finite(), || format!("lambda must be positive, got {}", self.lambda))?;
        self.constants.validate()
    }

    /// `k a = gamma (alpha - 1) a = 1 / A2`.
    fn ka(&self) -> f64 {
        self.gamma * (self.alpha - 1.0) * self.a
    }

    fn centrifugal(&self) -> f64 {
        let l = f64::from(self.l);
        l * (l + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

/// The coefficient list as printed.
pub fn derived_coeffs(p: &SecondClassParams) -> Result<DerivedCoefficients> {
    p.validate()?;
    let (a, b, al, be, ga) = (p.a, p.b, p.alpha, p.beta, p.gamma);
    let a2 = 1.0 / ((al - 1.0) * ga * a);
    let a1 = a2.powi(-2);
    let a2sq = a2 * a2;

    let b1 = (al * a + 2.0 * b) / (a * a2sq);
    if b1 == 0.0 {
        return Err(Error::DegenerateCoefficient("B2"));
    }
    let b2 = (2.0 * b + a * (3.0 + be - ga)) / (2.0 * a * a2 * b1);
    let b3 = 1.0 + be - b1 * b2 * b2;

    let c1 = b * (a * al - a + b) / (a * a * a2sq);
    if c1 == 0.0 {
        return Err(Error::DegenerateCoefficient("C2"));
    }
    let c2 = b * (be - ga + 1.0) / (2.0 * a * a2 * c1);
    let c3 = -c1 * c2 * c2 / b;

    let d1 = (2.0 * b - 3.0 * al * a) / (a * a2sq);
    if d1 == 0.0 {
        return Err(Error::DegenerateCoefficient("D2"));
    }
    let d2 = (2.0 * b + a * (be - ga - 4.0 * al - 1.0)) / (2.0 * a2 * d1);
    let d3 = 1.0 + be - 4.0 / d1 - d1 * d2 * d2;

    Ok(DerivedCoefficients {
        a1,
        a2,
        b1,
        b2,
        b3,
        c1,
        c2,
        c3,
        d1,
        d2,
        d3,
    })
}

/// Roots of `s^2 + beta s + delta = 0`, larger first.
pub fn eta_bar_exponents(p: &SecondClassParams) -> Result<(f64, f64)> {
    let disc = p.beta * p.beta - 4.0 * p.delta;
    if disc < 0.0 {
        return Err(Error::ComplexRoots(disc));
    }
    let root = disc.sqrt();
    Ok((0.5 * (-p.beta + root), 0.5 * (-p.beta - root)))
}

/// `F1, F1', F2, F3` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValues {
    pub f1: f64,
    pub f1_prime: f64,
    pub f2: f64,
    pub f3: f64,
}

/// Which coefficient functions to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FForm<'a> {
    Printed(&'a DerivedCoefficients),
    Exact,
}

impl FForm<'_> {
    pub fn values(&self, p: &SecondClassParams, rho: f64) -> FValues {
        let al = p.alpha;
        let x = rho.powf(al - 1.0);
        match self {
            FForm::Printed(dc) => {
                let (f1, f1_prime) = printed_f1(dc, al, rho, x);
                FValues {
                    f1,
                    f1_prime,
                    f2: dc.b1 * rho * (x + dc.b2).powi(2) + dc.b3,
                    f3: dc.c1 * (x + dc.c2).powi(2) + dc.c3,
                }
            }
            FForm::Exact => {
                let ka = p.ka();
                let k = p.gamma * (al - 1.0);
                let w = 1.0 + ka * x;
                FValues {
                    f1: (rho * w).powi(2),
                    f1_prime: 2.0 * rho * w * (1.0 + ka * al * x),
                    f2: rho * w * (1.0 + p.beta + k * (p.a * al + 2.0 * p.b) * x),
                    f3: p.b * k * k * (p.a * al - p.a + p.b) * x * x + p.b * k * (al - 1.0 + p.beta) * x,
                }
            }
        }
    }
}

fn printed_f1(dc: &DerivedCoefficients, alpha: f64, rho: f64, x: f64) -> (f64, f64) {
    let s = x + dc.a2;
    let f1 = dc.a1 * rho * rho * s * s;
    let f1_prime = 2.0 * dc.a1 * rho * s * (alpha * x + dc.a2);
    (f1, f1_prime)
}

/// `(F1, F2, F3)` from the printed closed forms.
pub fn f_functions(dc: &DerivedCoefficients, p: &SecondClassParams, rho: f64) -> (f64, f64, f64) {
    let v = FForm::Printed(dc).values(p, rho);
    (v.f1, v.f2, v.f3)
}

/// Right side of `S'/S = (F2 - 2 F1') / (2 F1) - 1/rho`.
pub fn s_log_derivative(form: FForm<'_>, p: &SecondClassParams, rho: f64) -> f64 {
    let v = form.values(p, rho);
    (v.f2 - 2.0 * v.f1_prime) / (2.0 * v.f1) - 1.0 / rho
}

/// Zero of `F1` on the positive axis, `rho^(alpha-1) = -A2`, if any.
pub fn f1_turning_point(p: &SecondClassParams) -> Option<f64> {
    let minus_a2 = -1.0 / p.ka();
    (minus_a2 > 0.0).then(|| minus_a2.powf(1.0 / (p.alpha - 1.0)))
}

/// `S` sampled on the grid, integrated cell by cell with five-point
/// Gauss-Legendre and gauged to 1 at the middle node.
pub fn s_factor(form: FForm<'_>, p: &SecondClassParams, grid: &RadialGrid) -> Result<Vec<f64>> {
    if let Some(t) = f1_turning_point(p) {
        if t >= grid.r_min && t <= grid.r_max {
            return Err(Error::TurningPointOnGrid(t));
        }
    }
    let g = |rho: f64| s_log_derivative(form, p, rho);
    let mut log_s = Vec::with_capacity(grid.n_points);
    let mut acc = 0.0;
    log_s.push(0.0);
    for i in 1..grid.n_points {
        acc += gauss_legendre5(g, grid.point(i - 1), grid.point(i));
        log_s.push(acc);
    }
    let gauge = log_s[grid.n_points / 2];
    Ok(log_s.into_iter().map(|v| (v - gauge).exp()).collect())
}

/// `V(lambda rho) - E` from the printed five-line expression, in reduced
/// units `2 m lambda^2 / hbar^2`.
pub fn reduced_second_potential(dc: &DerivedCoefficients, p: &SecondClassParams, rho: f64) -> f64 {
    let al = p.alpha;
    let x = rho.powf(al - 1.0);
    let s = x + dc.a2;
    let t = al * x + dc.a2;
    let r2 = rho * rho;

    let first = (dc.b1 * rho * (x + dc.b2).powi(2) + dc.b3) * (dc.d1 * rho * (x + dc.d2).powi(2) + dc.d3)
        / (4.0 * dc.a1 * dc.a1 * r2 * r2 * s.powi(4));
    let second = dc.d1 * (x + dc.d2) * ((2.0 * al - 1.0) * x + dc.d2) / (dc.a1 * r2 * s * s);
    let third = 8.0 / r2 * (t / s).powi(2) * (1.0 / rho + (al - 1.0) / s + al * (al - 1.0) / t);
    let fourth = -(dc.c1 * s * s + dc.c3 + p.delta) / (dc.a1 * r2 * s * s);
    first + second + third + fourth - p.centrifugal() / r2
}

/// [`reduced_second_potential`] in energy units.
pub fn second_potential(dc: &DerivedCoefficients, p: &SecondClassParams, rho: f64) -> f64 {
    p.constants
        .energy_from_reduced(reduced_second_potential(dc, p, rho), p.lambda)
}

/// `V - E` (reduced) that the exact reduction produces:
/// `P^2/4 + P'/2 - (F3 + delta)/F1 - l(l+1)/rho^2` with `P = F2/F1`.
pub fn exact_reduced_potential(p: &SecondClassParams, rho: f64) -> f64 {
    let r2 = rho * rho;
    exact_numerator(p, rho.powf(p.alpha - 1.0)) / (r2 * (1.0 + p.ka() * rho.powf(p.alpha - 1.0)).powi(2))
        - p.centrifugal() / r2
}

/// `rho^2 (1 + k a x)^2 Q` as a quadratic in `x`, coefficients ascending.
fn exact_numerator_coeffs(p: &SecondClassParams) -> [f64; 3] {
    let al = p.alpha;
    let k = p.gamma * (al - 1.0);
    let ka = p.ka();
    let q = k * (p.a * al + 2.0 * p.b);
    let n0 = 1.0 + p.beta;
    // n = n0 + q x;  n^2/4 + [q (alpha-1) x (1 + ka x) - n (1 + ka alpha x)]/2 - (F3 + delta)
    let c0 = n0 * n0 / 4.0 - n0 / 2.0 - p.delta;
    let c1 = n0 * q / 2.0 + (q * (al - 1.0) - q - n0 * ka * al) / 2.0 - p.b * k * (al - 1.0 + p.beta);
    let c2 = q * q / 4.0 + (q * (al - 1.0) * ka - q * ka * al) / 2.0 - p.b * k * k * (p.a * al - p.a + p.b);
    [c0, c1, c2]
}

fn exact_numerator(p: &SecondClassParams, x: f64) -> f64 {
    let [c0, c1, c2] = exact_numerator_coeffs(p);
    c0 + x * (c1 + x * c2)
}

/// `exp(-gamma O) rho^s` truncated after `truncation` terms.
pub fn second_wavefunction_series(p: &SecondClassParams, s_root: f64, truncation: usize) -> Result<ExpSeries> {
    let op = OperatorO::new(p.a, p.b, p.alpha)?;
    exp_series(&op, -p.gamma, MonomialTerm::power(s_root), truncation)
}

/// Boundary `rho_c` of the convergence region `|k a rho^(alpha-1)| < 1`:
/// the series converges for `rho < rho_c` when alpha > 1 and for
/// `rho > rho_c` when alpha < 1.
pub fn convergence_boundary(p: &SecondClassParams) -> f64 {
    p.ka().abs().powf(-1.0 / (p.alpha - 1.0))
}

/// Ratio-test estimate of the truncation tail at `rho`; zero for a
/// terminated series, infinite where the last ratio is not below one.
pub fn series_tail_estimate(series: &ExpSeries, alpha: f64, rho: f64) -> f64 {
    if series.terminated {
        return 0.0;
    }
    let terms = series.series.terms();
    if terms.len() < 2 {
        return f64::INFINITY;
    }
    // Exponents march by alpha - 1, so the last generated terms sit at the
    // top of the exponent order for alpha > 1 and at the bottom otherwise.
    let (last, prev) = if alpha > 1.0 {
        (terms[terms.len() - 1], terms[terms.len() - 2])
    } else {
        (terms[0], terms[1])
    };
    let (last, prev) = (last.eval(rho).abs(), prev.eval(rho).abs());
    if prev == 0.0 {
        return f64::INFINITY;
    }
    let ratio = last / prev;
    if ratio >= 1.0 {
        f64::INFINITY
    } else {
        last * ratio / (1.0 - ratio)
    }
}

/// Residual of the chain `psi = F1 S chi`, `chi = exp(-gamma O) rho^s`,
/// against the exact reduced potential with the energy detuned by
/// `detuning` (reduced units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainResidual {
    pub residual: f64,
    /// Largest series-tail estimate over the grid.
    pub tail: f64,
}

pub fn chain_residual(
    p: &SecondClassParams,
    s_root: f64,
    truncation: usize,
    grid: &RadialGrid,
    detuning: f64,
) -> Result<ChainResidual> {
    let series = second_wavefunction_series(p, s_root, truncation)?;
    let s = s_factor(FForm::Exact, p, grid)?;
    let mut tail: f64 = 0.0;
    let u: Vec<f64> = grid
        .points()
        .zip(&s)
        .map(|(rho, s)| {
            let chi = series.eval(rho);
            tail = tail.max(series_tail_estimate(&series, p.alpha, rho) / chi.abs().max(f64::MIN_POSITIVE));
            let f1 = FForm::Exact.values(p, rho).f1;
            rho * f1 * s * chi
        })
        .collect();
    let l = f64::from(p.l);
    let v = |rho: f64| 0.5 * (exact_reduced_potential(p, rho) + detuning);
    Ok(ChainResidual {
        residual: reduced_residual(v, 0.0, &u, l, grid, Stencil::SevenPoint),
        tail,
    })
}

/// Chain residual over a list of detunings.
pub fn energy_scan(
    p: &SecondClassParams,
    s_root: f64,
    truncation: usize,
    grid: &RadialGrid,
    detunings: &[f64],
) -> Result<Vec<(f64, f64)>> {
    detunings
        .iter()
        .map(|&d| chain_residual(p, s_root, truncation, grid, d).map(|c| (d, c.residual)))
        .collect()
}

/// Polynomial in `rho` and `x = rho^(alpha-1)` with integer powers.
#[derive(Debug, Clone, Default)]
struct RhoX(BTreeMap<(i32, u32), f64>);

impl RhoX {
    fn term(c: f64, i: i32, j: u32) -> Self {
        let mut m = BTreeMap::new();
        m.insert((i, j), c);
        Self(m)
    }

    /// `c0 + c1 x`.
    fn linear(c0: f64, c1: f64) -> Self {
        Self::term(c0, 0, 0).add(&Self::term(c1, 0, 1))
    }

    fn add(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, v) in &other.0 {
            *m.entry(*k).or_insert(0.0) += v;
        }
        Self(m)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut m = BTreeMap::new();
        for ((i1, j1), v1) in &self.0 {
            for ((i2, j2), v2) in &other.0 {
                *m.entry((i1 + i2, j1 + j2)).or_insert(0.0) += v1 * v2;
            }
        }
        Self(m)
    }

    fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::term(1.0, 0, 0), |acc, _| acc.mul(self))
    }

    fn scale(&self, c: f64) -> Self {
        Self(self.0.iter().map(|(k, v)| (*k, v * c)).collect())
    }

    #[cfg(test)]
    fn eval(&self, rho: f64, x: f64) -> f64 {
        self.0.iter().map(|((i, j), v)| v * rho.powi(*i) * x.powi(*j as i32)).sum()
    }
}

/// Numerator and denominator of `V - E + l(l+1)/rho^2`; the denominator is
/// `rho^power` times a polynomial in `x` alone.
struct ClearedForm {
    numerator: RhoX,
    den_power: i32,
    den_x: Vec<f64>,
}

fn printed_cleared(dc: &DerivedCoefficients, p: &SecondClassParams) -> ClearedForm {
    let al = p.alpha;
    let rho = |i: i32| RhoX::term(1.0, i, 0);
    let s = RhoX::linear(dc.a2, 1.0);
    let t = RhoX::linear(dc.a2, al);
    let b_block = rho(1).mul(&RhoX::linear(dc.b2, 1.0).pow(2)).scale(dc.b1).add(&RhoX::term(dc.b3, 0, 0));
    let d_block = rho(1).mul(&RhoX::linear(dc.d2, 1.0).pow(2)).scale(dc.d1).add(&RhoX::term(dc.d3, 0, 0));

    let n1 = b_block.mul(&d_block).mul(&t);
    let n2 = rho(2)
        .mul(&s.pow(2))
        .mul(&t)
        .mul(&RhoX::linear(dc.d2, 1.0))
        .mul(&RhoX::linear(dc.d2, 2.0 * al - 1.0))
        .scale(4.0 * dc.a1 * dc.d1);
    let bracket = s
        .pow(2)
        .mul(&t)
        .mul(&rho(-1))
        .add(&s.mul(&t).scale(al - 1.0))
        .add(&s.pow(2).scale(al * (al - 1.0)));
    let n3 = rho(2).mul(&t.pow(2)).mul(&bracket).scale(32.0 * dc.a1 * dc.a1);
    let c_block = s.pow(2).scale(dc.c1).add(&RhoX::term(dc.c3 + p.delta, 0, 0));
    let n4 = rho(2).mul(&s.pow(2)).mul(&t).mul(&c_block).scale(-4.0 * dc.a1);

    let den = s.pow(4).mul(&t).scale(4.0 * dc.a1 * dc.a1);
    ClearedForm {
        numerator: n1.add(&n2).add(&n3).add(&n4),
        den_power: 4,
        den_x: x_coefficients(&den),
    }
}

fn exact_cleared(p: &SecondClassParams) -> ClearedForm {
    let [c0, c1, c2] = exact_numerator_coeffs(p);
    let num = RhoX::linear(c0, c1).add(&RhoX::term(c2, 0, 2));
    ClearedForm {
        numerator: num,
        den_power: 2,
        den_x: x_coefficients(&RhoX::linear(1.0, p.ka()).pow(2)),
    }
}

fn x_coefficients(poly: &RhoX) -> Vec<f64> {
    let degree = poly.0.keys().map(|(_, j)| *j).max().unwrap_or(0) as usize;
    let mut out = vec![0.0; degree + 1];
    for ((i, j), v) in &poly.0 {
        debug_assert_eq!(*i, 0, "denominator must be free of bare rho powers");
        out[*j as usize] += v;
    }
    out
}

/// Expansion order in `x` used by the exponent bookkeeping.
pub const EXPANSION_ORDER: u32 = 10;
/// A merged coefficient survives when it exceeds this fraction of the
/// absolute sum of its contributions.
pub const RELIABILITY_FLOOR: f64 = 1e-9;

/// Expansion of `V - E + l(l+1)/rho^2` in powers of `x` through
/// [`EXPANSION_ORDER`], as monomials in `rho`, together with the absolute
/// sums behind every merged coefficient.
fn expand(form: &ClearedForm, alpha: f64) -> (WeightedPowerSeries, WeightedPowerSeries) {
    let d = &form.den_x;
    let order = EXPANSION_ORDER as usize;
    let mut inv = vec![0.0; order + 1];
    inv[0] = 1.0 / d[0];
    for j in 1..=order {
        let acc: f64 = (1..=j.min(d.len() - 1)).map(|m| d[m] * inv[j - m]).sum();
        inv[j] = -acc / d[0];
    }
    let mut signed = Vec::new();
    let mut magnitude = Vec::new();
    for ((i, j), v) in &form.numerator.0 {
        for (t, w) in inv.iter().enumerate() {
            let total = *j as usize + t;
            if total > order {
                break;
            }
            let expo = f64::from(i - form.den_power) + total as f64 * (alpha - 1.0);
            signed.push(MonomialTerm::new(v * w, expo));
            magnitude.push(MonomialTerm::new((v * w).abs(), expo));
        }
    }
    (
        WeightedPowerSeries::from_terms(signed),
        WeightedPowerSeries::from_terms(magnitude),
    )
}

/// Exponents of a cleared form's expansion that neither the energy nor an
/// `l` shift can absorb, plus the coefficient of `rho^-2`.
fn surviving(form: &ClearedForm, alpha: f64) -> (Vec<f64>, f64) {
    let (signed, magnitude) = expand(form, alpha);
    let absorbed = |e: f64| e.abs() <= EXPONENT_MERGE_TOL || (e + 2.0).abs() <= EXPONENT_MERGE_TOL;
    let exps = magnitude
        .terms()
        .iter()
        .filter(|m| !absorbed(m.expo))
        .filter(|m| signed.coeff_of(m.expo).abs() > RELIABILITY_FLOOR * m.coeff)
        .map(|m| m.expo)
        .collect();
    let inv_sq = signed.coeff_of(-2.0);
    let inv_sq = if inv_sq.abs() > RELIABILITY_FLOOR * magnitude.coeff_of(-2.0) { inv_sq } else { 0.0 };
    (exps, inv_sq)
}

/// Which form of the second-class potential a report analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Printed,
    Exact,
}

impl Reduction {
    pub fn as_str(self) -> &'static str {
        match self {
            Reduction::Printed => "printed",
            Reduction::Exact => "exact",
        }
    }
}

fn cleared(p: &SecondClassParams, reduction: Reduction) -> Result<ClearedForm> {
    Ok(match reduction {
        Reduction::Printed => printed_cleared(&derived_coeffs(p)?, p),
        Reduction::Exact => exact_cleared(p),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaReport {
    pub alpha: f64,
    /// True when some analyzed parameter set leaves exactly one power of
    /// `rho` besides the constant and `rho^-2`.
    pub constant_independent: bool,
    /// Non-absorbable exponents for the template parameters, ascending.
    pub surviving_exponents: Vec<f64>,
    /// Coefficient of `rho^-2` in `V - E + l(l+1)/rho^2` for the template.
    pub inverse_square: f64,
    /// At `E = 0`, the `l` whose centrifugal term cancels that coefficient.
    pub zero_energy_l: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantIndependenceReport {
    pub reduction: Reduction,
    pub draws: usize,
    pub entries: Vec<AlphaReport>,
    /// Grid values skipped because alpha = 1.
    pub excluded: Vec<f64>,
}

impl ConstantIndependenceReport {
    pub fn all_negative(&self) -> bool {
        self.entries.iter().all(|e| !e.constant_independent)
    }
}

fn random_params(rng: &mut ChaCha8Rng, alpha: f64, template: &SecondClassParams) -> SecondClassParams {
    let signed = |rng: &mut ChaCha8Rng| {
        let m: f64 = rng.gen_range(0.2..2.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };
    SecondClassParams {
        alpha,
        beta: rng.gen_range(-2.0..2.0),
        delta: rng.gen_range(-2.0..2.0),
        gamma: signed(rng),
        a: signed(rng),
        b: signed(rng),
        ..*template
    }
}

/// Exponent bookkeeping of `V - E` for every alpha in the grid. Each alpha
/// is checked for the template and for `draws` seeded random parameter
/// sets; parameter sets whose coefficients degenerate are redrawn.
pub fn constant_independence_report(
    alpha_grid: &[f64],
    template: &SecondClassParams,
    reduction: Reduction,
    draws: usize,
    seed: u64,
) -> Result<ConstantIndependenceReport> {
    require(!alpha_grid.is_empty(), || "alpha grid is empty".to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    for &alpha in alpha_grid {
        if (alpha - 1.0).abs() <= ALPHA_TOL {
            excluded.push(alpha);
            continue;
        }
        let base = SecondClassParams { alpha, ..*template };
        base.validate()?;
        let (surviving_exponents, inverse_square) = surviving(&cleared(&base, reduction)?, alpha);
        let mut constant_independent = surviving_exponents.len() == 1;
        let mut done = 0;
        let mut attempts = 0;
        while done < draws && attempts < 20 * draws {
            attempts += 1;
            let p = random_params(&mut rng, alpha, template);
            let Ok(form) = cleared(&p, reduction) else { continue };
            done += 1;
            constant_independent |= surviving(&form, alpha).0.len() == 1;
        }
        let disc = 1.0 + 4.0 * inverse_square;
        entries.push(AlphaReport {
            alpha,
            constant_independent,
            surviving_exponents,
            inverse_square,
            zero_energy_l: (disc >= 0.0).then(|| 0.5 * (disc.sqrt() - 1.0)),
        });
    }
    Ok(ConstantIndependenceReport {
        reduction,
        draws,
        entries,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: PhysicalConstants = PhysicalConstants::natural();

    fn params(alpha: f64, beta: f64, delta: f64, gamma: f64, a: f64, b: f64, l: u32) -> SecondClassParams {
        SecondClassParams::new(alpha, beta, delta, gamma, a, b, l, 1.0, NAT).unwrap()
    }

    fn worked() -> SecondClassParams {
        params(2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0)
    }

    #[test]
    fn worked_example_coefficients() {
        let dc = derived_coeffs(&worked()).unwrap();
        assert_eq!(
            [dc.a2, dc.a1, dc.b1, dc.b2, dc.b3, dc.c1, dc.c2, dc.c3, dc.d1, dc.d2, dc.d3],
            [1.0, 1.0, 4.0, 0.5, 0.0, 2.0, 0.0, 0.0, -4.0, 1.0, 6.0]
        );
    }

    #[test]
    fn degenerate_denominators_are_named() {
        let p = params(2.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0);
        assert_eq!(derived_coeffs(&p), Err(Error::DegenerateCoefficient("C2")));
        // alpha a + 2b = 0
        let p = params(2.0, 0.0, 0.0, 1.0, 1.0, -1.0, 0);
        assert_eq!(derived_coeffs(&p), Err(Error::DegenerateCoefficient("B2")));
        assert!(SecondClassParams::new(1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0, 1.0, NAT).is_err());
    }

    #[test]
    fn eta_bar_roots() {
        assert_eq!(eta_bar_exponents(&params(2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0)).unwrap(), (0.0, 0.0));
        assert_eq!(eta_bar_exponents(&params(2.0, -3.0, 2.0, 1.0, 1.0, 1.0, 0)).unwrap(), (2.0, 1.0));
        assert!(matches!(
            eta_bar_exponents(&params(2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0)),
            Err(Error::ComplexRoots(_))
        ));
    }

    #[test]
    fn printed_f_values() {
        let p = worked();
        let dc = derived_coeffs(&p).unwrap();
        assert_eq!(f_functions(&dc, &p, 1.0).0, 4.0);
        // rho^(alpha-1) = -A2 needs A2 < 0.
        let q = params(3.0, 0.2, 0.1, -0.5, 1.0, 1.0, 0);
        let dq = derived_coeffs(&q).unwrap();
        let t = f1_turning_point(&q).unwrap();
        assert!(f_functions(&dq, &q, t).0.abs() < 1e-14);
        let (_, f2, _) = f_functions(&dq, &q, 1e-9);
        assert!((f2 - dq.b3).abs() < 1e-8);
    }

    /// Apply `D + k O` twice to a trial function numerically and compare
    /// with `F1 chi'' + F2 chi' + F3 chi` using the exact forms.
    #[test]
    fn exact_forms_match_the_conjugated_operator() {
        let p = params(2.5, 0.3, -0.4, 0.7, 1.4, 0.75, 0);
        let k = p.gamma * (p.alpha - 1.0);
        // chi = rho^m with m generic: (D + kO) rho^m = m rho^m + k (a m + b) rho^(m + alpha - 1)
        let m = 0.37_f64;
        for rho in [0.3_f64, 0.9, 1.7] {
            let al = p.alpha;
            // L^2 rho^m = m^2 rho^m + k f (2m + al - 1) rho^(m+al-1) + k^2 f g rho^(m+2al-2)
            let f = p.a * m + p.b;
            let g = p.a * (m + al - 1.0) + p.b;
            let l2 = m * m * rho.powf(m) + k * f * (2.0 * m + al - 1.0) * rho.powf(m + al - 1.0)
                + k * k * f * g * rho.powf(m + 2.0 * al - 2.0);
            let l1 = m * rho.powf(m) + k * f * rho.powf(m + al - 1.0);
            let want = l2 + p.beta * l1 + p.delta * rho.powf(m);
            let v = FForm::Exact.values(&p, rho);
            let got = v.f1 * m * (m - 1.0) * rho.powf(m - 2.0) + v.f2 * m * rho.powf(m - 1.0) + (v.f3 + p.delta) * rho.powf(m);
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "rho={rho}: {got} vs {want}");
        }
    }

    #[test]
    fn s_factor_gauge_and_log_derivative() {
        let p = params(2.0, 0.3, 0.1, 0.6, 0.8, 0.5, 1);
        let dc = derived_coeffs(&p).unwrap();
        let grid = RadialGrid::new(0.2, 4.0, 801).unwrap();
        let s = s_factor(FForm::Printed(&dc), &p, &grid).unwrap();
        assert_eq!(s[grid.n_points / 2], 1.0);
        let h = grid.spacing();
        let ls: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        for i in 3..grid.n_points - 3 {
            let d = (-ls[i - 3] + 9.0 * ls[i - 2] - 45.0 * ls[i - 1] + 45.0 * ls[i + 1] - 9.0 * ls[i + 2] + ls[i + 3])
                / (60.0 * h);
            let want = s_log_derivative(FForm::Printed(&dc), &p, grid.point(i));
            assert!((d - want).abs() < 1e-8, "i={i}: {d} vs {want}");
        }
    }

    #[test]
    fn turning_point_on_grid_is_rejected() {
        let p = params(3.0, 0.2, 0.1, -0.5, 1.0, 1.0, 0);
        let grid = RadialGrid::new(0.1, 5.0, 200).unwrap();
        assert!(matches!(s_factor(FForm::Exact, &p, &grid), Err(Error::TurningPointOnGrid(_))));
    }

    #[test]
    fn printed_potential_term_isolation() {
        let p = worked();
        let mut dc = derived_coeffs(&p).unwrap();
        dc.d1 = 0.0;
        dc.d3 = 0.0;
        // Only the third and fourth blocks remain at rho = 1, x = 1, s = 2, t = 3.
        let third = 8.0 * (3.0_f64 / 2.0).powi(2) * (1.0 + 1.0 / 2.0 + 2.0 / 3.0);
        let fourth = -(2.0 * 4.0) / 4.0;
        assert!((reduced_second_potential(&dc, &p, 1.0) - (third + fourth)).abs() < 1e-13);
    }

    #[test]
    fn printed_potential_decays_like_inverse_square() {
        let p = worked();
        let dc = derived_coeffs(&p).unwrap();
        let (r1, r2) = (1e4, 1e5);
        let slope = (reduced_second_potential(&dc, &p, r2).abs().ln() - reduced_second_potential(&dc, &p, r1).abs().ln())
            / (r2 / r1).ln();
        assert!((slope + 2.0).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn cleared_forms_reproduce_potentials() {
        let p = params(2.3, 0.4, -0.3, 0.8, -0.7, 0.9, 2);
        let dc = derived_coeffs(&p).unwrap();
        let printed = printed_cleared(&dc, &p);
        let exact = exact_cleared(&p);
        let cf = p.centrifugal();
        // F1 vanishes near rho = 1.27; stay clear of the pole.
        for rho in [0.15_f64, 0.6, 2.8, 4.5] {
            let x = rho.powf(p.alpha - 1.0);
            let den = |f: &ClearedForm| {
                rho.powi(f.den_power) * f.den_x.iter().rev().fold(0.0, |acc, c| acc * x + c)
            };
            let via = printed.numerator.eval(rho, x) / den(&printed) - cf / (rho * rho);
            let direct = reduced_second_potential(&dc, &p, rho);
            assert!((via - direct).abs() < 1e-10 * direct.abs().max(1.0), "{via} vs {direct}");
            let via = exact.numerator.eval(rho, x) / den(&exact) - cf / (rho * rho);
            let direct = exact_reduced_potential(&p, rho);
            assert!((via - direct).abs() < 1e-10 * direct.abs().max(1.0), "{via} vs {direct}");
        }
    }

    #[test]
    fn exact_potential_matches_reduction_of_f_functions() {
        // Q = P^2/4 + P'/2 - (F3 + delta)/F1 with P' by central differences.
        let p = params(0.6, -0.2, 0.35, 0.5, 0.9, -0.4, 1);
        let pf = |rho: f64| {
            let v = FForm::Exact.values(&p, rho);
            v.f2 / v.f1
        };
        for rho in [0.4, 1.0, 3.0] {
            let h = 1e-5;
            let dp = (pf(rho + h) - pf(rho - h)) / (2.0 * h);
            let v = FForm::Exact.values(&p, rho);
            let q = pf(rho).powi(2) / 4.0 + dp / 2.0 - (v.f3 + p.delta) / v.f1 - 2.0 / (rho * rho);
            assert!((q - exact_reduced_potential(&p, rho)).abs() < 1e-7);
        }
    }

    #[test]
    fn series_examples() {
        let p = params(0.5, 0.0, 0.0, 1e-300, 0.6, 0.3, 0);
        let q = SecondClassParams { gamma: 0.0, ..p };
        assert_eq!(second_wavefunction_series(&q, 1.5, 10).unwrap().series.len(), 1);
        // a s + b = 0 at s = -b/a
        let s = second_wavefunction_series(&params(0.5, 0.0, 0.0, 0.4, 0.6, 0.3, 0), -0.5, 10).unwrap();
        assert!(s.terminated);
        assert_eq!(s.terms, 1);
    }

    #[test]
    fn series_partial_sums_converge_for_alpha_below_one() {
        let p = params(0.5, 0.1, -0.2, 0.3, 0.7, 0.4, 0);
        let sums: Vec<f64> = (30..=40)
            .map(|n| second_wavefunction_series(&p, 0.8, n).unwrap().eval(0.5))
            .collect();
        assert!((sums[10] - sums[9]).abs() < 1e-10);
        assert!(0.5 > convergence_boundary(&p));
    }

    #[test]
    fn chain_residual_is_small_and_sharp_in_energy() {
        let p = params(0.5, 0.4, -0.3, 0.4, 0.6, 0.3, 1);
        let (s_plus, _) = eta_bar_exponents(&p).unwrap();
        let grid = RadialGrid::new(0.5, 6.0, 2001).unwrap();
        assert!(grid.r_min > convergence_boundary(&p));
        let c = chain_residual(&p, s_plus, 40, &grid, 0.0).unwrap();
        assert!(c.tail < 1e-9, "{}", c.tail);
        assert!(c.residual < 1e-5, "{}", c.residual);
        let scan = energy_scan(&p, s_plus, 40, &grid, &[-0.1, 0.0, 0.1]).unwrap();
        assert!(scan[0].1 > 100.0 * scan[1].1 && scan[2].1 > 100.0 * scan[1].1);
    }

    #[test]
    fn report_is_negative_and_reports_zero_energy_l() {
        let template = params(2.0, 0.3, -0.15, 0.45, -0.8, -0.5, 0);
        let grid: Vec<f64> = (0..=50).map(|i| 0.5 + 0.05 * i as f64).collect();
        for reduction in [Reduction::Printed, Reduction::Exact] {
            let r = constant_independence_report(&grid, &template, reduction, 8, 7).unwrap();
            assert!(r.all_negative(), "{reduction:?}");
            assert_eq!(r.excluded.len(), 1);
            assert!(r.entries.iter().all(|e| e.surviving_exponents.len() >= 2));
        }
        // Exact form: rho^-2 coefficient (beta^2 - 1)/4 - delta, so
        // l = (sqrt(beta^2 - 4 delta) - 1) / 2.
        let r = constant_independence_report(&[2.0], &template, Reduction::Exact, 0, 1).unwrap();
        let want = 0.5 * ((0.09_f64 + 0.6).sqrt() - 1.0);
        let disc = 1.0 + 4.0 * r.entries[0].inverse_square;
        assert!(disc < 1.0 || (r.entries[0].zero_energy_l.unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn first_class_bookkeeping_contrast() {
        // Same bookkeeping on the first family: one survivor exactly at alpha = 1, 2.
        let count = |alpha: f64| {
            let form = ClearedForm {
                numerator: RhoX::term(1.0, 0, 2).add(&RhoX::term(1.0, 0, 1).mul(&RhoX::term(1.0, -1, 0))),
                den_power: 0,
                den_x: vec![1.0],
            };
            // x^2 -> rho^(2 alpha - 2); x/rho -> rho^(alpha - 2)
            surviving(&form, alpha).0.len()
        };
        assert_eq!(count(1.0), 1);
        assert_eq!(count(2.0), 1);
        assert_eq!(count(1.5), 2);
    }
}
