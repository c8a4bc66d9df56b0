//! Monomial engine: exact action of the Euler-type operators on `rho^s`.
//!
//! Both operators map a monomial to a single monomial, so operator
//! exponentials acting on a seed power are weighted power series whose
//! k-th coefficient is a running product of scalar factors. A series
//! terminates exactly when one of those factors has an algebraic zero.

use crate::error::{require, Result};

/// Exponents closer than this are treated as the same power when merging.
pub const EXPONENT_MERGE_TOL: f64 = 1e-12;

/// A factor is an algebraic zero when it is this small relative to the
/// magnitudes of the parts that produced it.
pub const ZERO_FACTOR_TOL: f64 = 1e-12;

pub const DEFAULT_MAX_TERMS: usize = 64;

/// `coeff * rho^expo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub expo: f64,
}

impl MonomialTerm {
    pub fn new(coeff: f64, expo: f64) -> Self {
        Self { coeff, expo }
    }

    /// Unit-coefficient power `rho^expo`.
    pub fn power(expo: f64) -> Self {
        Self { coeff: 1.0, expo }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        self.coeff * rho.powf(self.expo)
    }
}

/// Finite sum of real-exponent monomials, kept sorted by strictly
/// increasing exponent with no zero coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedPowerSeries {
    terms: Vec<MonomialTerm>,
}

impl WeightedPowerSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: f64, expo: f64) -> Self {
        Self::from_terms([MonomialTerm::new(coeff, expo)])
    }

    pub fn constant(value: f64) -> Self {
        Self::monomial(value, 0.0)
    }

    /// Builds a normalized series: sorts, merges exponents equal within
    /// [`EXPONENT_MERGE_TOL`] and drops terms that vanish or cancel.
    pub fn from_terms<I: IntoIterator<Item = MonomialTerm>>(terms: I) -> Self {
        let mut raw: Vec<MonomialTerm> = terms.into_iter().filter(|t| t.coeff != 0.0).collect();
        raw.sort_by(|x, y| x.expo.total_cmp(&y.expo));

        let mut merged: Vec<MonomialTerm> = Vec::with_capacity(raw.len());
        // Largest |coeff| that fed into each merged entry, for cancellation checks.
        let mut magnitude: Vec<f64> = Vec::with_capacity(raw.len());
        for t in raw {
            match merged.last_mut() {
                Some(last) if (t.expo - last.expo).abs() <= EXPONENT_MERGE_TOL => {
                    last.coeff += t.coeff;
                    let m = magnitude.last_mut().expect("parallel vectors");
                    *m = m.max(t.coeff.abs());
                }
                _ => {
                    merged.push(t);
                    magnitude.push(t.coeff.abs());
                }
            }
        }
        let terms = merged
            .into_iter()
            .zip(magnitude)
            .filter(|(t, m)| t.coeff != 0.0 && t.coeff.abs() > 1e-15 * m)
            .map(|(t, _)| t)
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|t| t.expo)
    }

    /// Coefficient of the term whose exponent matches `expo`, or zero.
    pub fn coeff_of(&self, expo: f64) -> f64 {
        self.terms
            .iter()
            .find(|t| (t.expo - expo).abs() <= EXPONENT_MERGE_TOL)
            .map_or(0.0, |t| t.coeff)
    }

    /// `sum coeff * rho^expo`, accumulated in ascending-exponent order.
    pub fn eval(&self, rho: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(rho)).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| MonomialTerm::new(t.coeff * factor, t.expo)))
    }

    /// Multiplies every term by `rho^shift`.
    pub fn shift(&self, shift: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| MonomialTerm::new(t.coeff, t.expo + shift))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|x| {
            other
                .terms
                .iter()
                .map(move |y| MonomialTerm::new(x.coeff * y.coeff, x.expo + y.expo))
        }))
    }

    /// Keeps only terms with exponent strictly above `floor`.
    pub fn truncate_below(&self, floor: f64) -> Self {
        Self {
            terms: self.terms.iter().copied().filter(|t| t.expo > floor).collect(),
        }
    }
}

impl FromIterator<MonomialTerm> for WeightedPowerSeries {
    fn from_iter<I: IntoIterator<Item = MonomialTerm>>(iter: I) -> Self {
        Self::from_terms(iter)
    }
}

/// Scalar picked up by `rho^s` under an operator, with the magnitude of the
/// parts it was summed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub value: f64,
    pub scale: f64,
}

impl Factor {
    pub fn is_zero(&self) -> bool {
        self.value == 0.0 || self.value.abs() <= ZERO_FACTOR_TOL * self.scale
    }
}

/// An operator that maps every monomial to a single monomial.
pub trait MonomialOperator {
    /// Exponent change `s -> s + shift`.
    fn exponent_shift(&self) -> f64;

    fn factor(&self, s: f64) -> Factor;

    fn apply(&self, t: MonomialTerm) -> MonomialTerm {
        MonomialTerm::new(t.coeff * self.factor(t.expo).value, t.expo + self.exponent_shift())
    }

    fn apply_series(&self, series: &WeightedPowerSeries) -> WeightedPowerSeries {
        series.terms().iter().map(|t| self.apply(*t)).collect()
    }
}

/// `a rho^(2-alpha) d^2 + b rho^(1-alpha) d + c rho^(-alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorA {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
}

impl OperatorA {
    pub fn new(a: f64, b: f64, c: f64, alpha: f64) -> Result<Self> {
        require(a != 0.0 && a.is_finite(), || format!("operator A needs a finite nonzero a, got {a}"))?;
        require(b.is_finite() && c.is_finite() && alpha.is_finite(), || {
            "operator A parameters must be finite".to_string()
        })?;
        Ok(Self { a, b, c, alpha })
    }

    /// The quadratic `a s(s-1) + b s + c`.
    pub fn quadratic(&self, s: f64) -> f64 {
        self.a * s * (s - 1.0) + self.b * s + self.c
    }
}

impl MonomialOperator for OperatorA {
    fn exponent_shift(&self) -> f64 {
        -self.alpha
    }

    fn factor(&self, s: f64) -> Factor {
        let parts = [self.a * s * (s - 1.0), self.b * s, self.c];
        Factor {
            value: parts.iter().sum(),
            scale: parts.iter().map(|p| p.abs()).sum(),
        }
    }
}

/// `a rho^alpha d + b rho^(alpha-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorO {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
}

impl OperatorO {
    pub fn new(a: f64, b: f64, alpha: f64) -> Result<Self> {
        require(a != 0.0 && a.is_finite(), || format!("operator O needs a finite nonzero a, got {a}"))?;
        require(b.is_finite() && alpha.is_finite(), || "operator O parameters must be finite".to_string())?;
        Ok(Self { a, b, alpha })
    }
}

impl MonomialOperator for OperatorO {
    fn exponent_shift(&self) -> f64 {
        self.alpha - 1.0
    }

    fn factor(&self, s: f64) -> Factor {
        let parts = [self.a * s, self.b];
        Factor {
            value: parts[0] + parts[1],
            scale: parts[0].abs() + parts[1].abs(),
        }
    }
}

/// Result of expanding `exp(scale * op) seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSeries {
    pub series: WeightedPowerSeries,
    /// Number of `op^k seed` terms generated (k = 0 .. terms-1).
    pub terms: usize,
    /// True when the expansion is exactly finite: some `op^k seed`
    /// vanished, or the scale is zero.
    pub terminated: bool,
}

impl ExpSeries {
    pub fn eval(&self, rho: f64) -> f64 {
        self.series.eval(rho)
    }
}

/// `sum_k scale^k / k! op^k(seed)` for k below `max_terms`.
///
/// Generation stops at the first k whose factor is an algebraic zero; in
/// that case `terms == k` and `terminated` is set. Hitting `max_terms`
/// without a zero leaves `terminated` false.
pub fn exp_series<O: MonomialOperator + ?Sized>(
    op: &O,
    scale: f64,
    seed: MonomialTerm,
    max_terms: usize,
) -> Result<ExpSeries> {
    require(max_terms >= 1, || "max_terms must be at least 1".to_string())?;
    if scale == 0.0 || seed.coeff == 0.0 {
        return Ok(ExpSeries {
            series: WeightedPowerSeries::from_terms([seed]),
            terms: 1,
            terminated: true,
        });
    }

    let mut collected = vec![seed];
    let mut current = seed;
    let mut terminated = false;
    for k in 1..max_terms {
        let f = op.factor(current.expo);
        if f.is_zero() {
            terminated = true;
            break;
        }
        current = MonomialTerm::new(
            current.coeff * f.value * scale / k as f64,
            current.expo + op.exponent_shift(),
        );
        collected.push(current);
    }
    if !terminated && collected.len() == max_terms {
        // The last generated term may itself be followed by a zero factor.
        terminated = op.factor(current.expo).is_zero();
    }
    Ok(ExpSeries {
        terms: collected.len(),
        series: WeightedPowerSeries::from_terms(collected),
        terminated,
    })
}

pub fn series_eval(series: &WeightedPowerSeries, rho: f64) -> f64 {
    series.eval(rho)
}
