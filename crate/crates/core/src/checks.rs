//! The verification suite behind `qbertrand verify`.
//!
//! Every check produces a measured value and a tolerance and passes when
//! `measured <= tolerance`. Randomized checks draw from a ChaCha stream
//! seeded by the caller, so a seed fixes the whole report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::engine::DEFAULT_MAX_TERMS;
use crate::error::{require, Result};
use crate::family::{classify_alpha, couplings, FamilyParams, PhysicalConstants};
use crate::oracle::{fd_spectrum, numerov_eigen, residual, RadialGrid, Stencil};
use crate::pct::{
    exp_map_potential, morse_view, pct_energy, pct_potential, pct_wavefunction, reduced_exp_map_potential,
    ExponentialMap, PctSolution,
};
use crate::second_class::{
    chain_residual, constant_independence_report, convergence_boundary, derived_coeffs, energy_scan,
    eta_bar_exponents, s_factor, s_log_derivative, FForm, Reduction, SecondClassParams,
};
use crate::spectrum::{
    coulomb_level, discriminant, eigen_series, energy_coulomb, energy_oscillator, epsilon_n, laguerre,
    oscillator_level, sample_wavefunction, Branch, Wavefunction,
};

pub const GROUPS: [&str; 8] = [
    "coulomb",
    "oscillator",
    "couplings",
    "bertrand",
    "duality",
    "residuals",
    "pct",
    "second_class",
];

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn from_measurement(name: &str, tolerance: f64, measured: Result<f64>) -> Self {
        let measured = measured.unwrap_or(f64::INFINITY);
        Self {
            name: name.to_string(),
            pass: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    pub fn group(&self) -> &str {
        self.name.split('.').next().unwrap_or(&self.name)
    }
}

/// Runs every group, or only the comma-separated groups in `only`.
pub fn run_checks(seed: u64, only: Option<&str>) -> Result<Vec<CheckResult>> {
    let wanted: Option<Vec<&str>> = only.map(|o| o.split(',').map(str::trim).collect());
    for g in wanted.iter().flatten() {
        require(GROUPS.contains(g), || format!("unknown check group '{g}'; expected one of {}", GROUPS.join(", ")))?;
    }
    let selected = |g: &str| wanted.as_ref().is_none_or(|w| w.contains(&g));
    let mut out = Vec::new();
    if selected("coulomb") {
        out.extend(coulomb_checks());
    }
    if selected("oscillator") {
        out.extend(oscillator_checks());
    }
    if selected("couplings") {
        out.extend(coupling_checks());
    }
    if selected("bertrand") {
        out.push(bertrand_check());
    }
    if selected("duality") {
        out.extend(duality_checks(seed));
    }
    if selected("residuals") {
        out.extend(residual_checks());
    }
    if selected("pct") {
        out.extend(pct_checks(seed));
    }
    if selected("second_class") {
        out.extend(second_class_checks(seed));
    }
    Ok(out)
}

/// `{name: {pass, measured, tolerance}}`.
pub fn report_json(results: &[CheckResult]) -> Value {
    let mut map = Map::new();
    for r in results {
        map.insert(
            r.name.clone(),
            json!({"pass": r.pass, "measured": finite_or_null(r.measured), "tolerance": r.tolerance}),
        );
    }
    Value::Object(map)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

const NAT: PhysicalConstants = PhysicalConstants::natural();

fn coulomb_checks() -> Vec<CheckResult> {
    let measured = (|| {
        let grid = RadialGrid::new(1e-3, 60.0, 6000)?;
        let mut worst: f64 = 0.0;
        for l in 0..4u32 {
            let count = (4 - l) as usize;
            let pairs = fd_spectrum(|r| -1.0 / r, l, &grid, count)?;
            for (n, pair) in pairs.iter().enumerate() {
                let exact = energy_coulomb(n as u32, l, &NAT, 1.0)?.energy;
                worst = worst.max(((pair.energy - exact) / exact).abs());
            }
        }
        Ok(worst)
    })();
    vec![CheckResult::from_measurement("coulomb.spectrum", 1e-3, measured)]
}

/// The six lowest oscillator levels by `2n + l`, ties by `l`.
pub fn lowest_oscillator_levels(count: usize) -> Vec<(u32, u32)> {
    let mut levels: Vec<(u32, u32)> = (0..count as u32).flat_map(|n| (0..count as u32).map(move |l| (n, l))).collect();
    levels.sort_by_key(|&(n, l)| (2 * n + l, l));
    levels.truncate(count);
    levels
}

fn oscillator_checks() -> Vec<CheckResult> {
    let v = |r: f64| 0.5 * r * r;
    let run = || -> Result<[f64; 3]> {
        let grid = RadialGrid::new(1e-3, 20.0, 8000)?;
        let mut worst = [0.0f64; 3];
        for (n, l) in lowest_oscillator_levels(6) {
            let exact = energy_oscillator(n, l, &NAT)?.energy;
            let fd = fd_spectrum(v, l, &grid, n as usize + 1)?[n as usize].energy;
            let nu = numerov_eigen(v, l, &grid, (exact - 0.5, exact + 0.5))?.energy;
            worst[0] = worst[0].max((fd - exact).abs());
            worst[1] = worst[1].max((nu - exact).abs());
            worst[2] = worst[2].max((nu - fd).abs());
        }
        Ok(worst)
    };
    split(
        run(),
        [
            ("oscillator.fd", 1e-4),
            ("oscillator.numerov", 1e-4),
            ("oscillator.cross_agreement", 5e-4),
        ],
    )
}

/// One result per entry of a jointly measured array.
fn split<const N: usize>(measured: Result<[f64; N]>, specs: [(&str, f64); N]) -> Vec<CheckResult> {
    specs
        .iter()
        .enumerate()
        .map(|(i, (name, tol))| CheckResult::from_measurement(name, *tol, measured.clone().map(|m| m[i])))
        .collect()
}

fn coupling_checks() -> Vec<CheckResult> {
    let other = PhysicalConstants {
        hbar: 1.3,
        mass: 0.7,
        coulomb_strength: 2.1,
        omega: 1.7,
    };
    let run = || -> Result<[f64; 4]> {
        let mut worst = [0.0f64; 4];
        for (k, lambda) in [(NAT, 1.0), (other, 0.9)] {
            for l in 0..=5u32 {
                for n in 0..3u32 {
                    let osc = couplings(&oscillator_level(n, l, k, lambda)?);
                    let want = k.mass * k.omega * k.omega / 2.0;
                    worst[0] = worst[0].max(((osc.g1 - want) / want).abs());
                    worst[1] = worst[1].max((osc.g3 / osc.g1).abs());

                    let coul = couplings(&coulomb_level(n, l, k, lambda)?);
                    worst[2] = worst[2].max((coul.g3 / coul.g2).abs());
                    worst[3] = worst[3].max(((coul.g2 + k.coulomb_strength) / k.coulomb_strength).abs());
                }
            }
        }
        Ok(worst)
    };
    split(
        run(),
        [
            ("couplings.oscillator_g1", 1e-12),
            ("couplings.oscillator_g3", 1e-12),
            ("couplings.coulomb_g3", 1e-12),
            ("couplings.coulomb_g2", 1e-12),
        ],
    )
}

/// Alphas `0.50, 0.55, ..., 3.00`.
pub fn bertrand_grid() -> Vec<f64> {
    (0..=50).map(|i| f64::from(50 + 5 * i) / 100.0).collect()
}

fn bertrand_check() -> CheckResult {
    let mismatches = bertrand_grid()
        .into_iter()
        .filter(|&alpha| {
            let expected = alpha == 1.0 || alpha == 2.0;
            classify_alpha(alpha).is_constant_independent() != expected
        })
        .count();
    CheckResult::from_measurement("bertrand.classifier", 0.0, Ok(mismatches as f64))
}

/// `n! (a alpha)^n rho^(-eps - n alpha) L_n^nu(-rho^alpha / (a alpha))`,
/// the closed form of the terminated series; `nu` carries the opposite
/// sign to the epsilon branch.
pub fn terminated_closed_form(p: &FamilyParams, n: u32, branch: Branch, rho: f64) -> f64 {
    let aa = p.a * p.alpha;
    let nu = -branch.sign() * discriminant(p).sqrt() / p.alpha;
    let factorial: f64 = (1..=n).map(f64::from).product();
    factorial * aa.powi(n as i32) * rho.powf(-p.epsilon - f64::from(n) * p.alpha) * laguerre(n, nu, -rho.powf(p.alpha) / aa)
}

fn random_family(rng: &mut ChaCha8Rng) -> (FamilyParams, u32, Branch) {
    loop {
        let alpha = rng.gen_range(0.5..3.0);
        let a = -rng.gen_range(0.2..2.0);
        let b = rng.gen_range(-2.0..2.0);
        let c = rng.gen_range(-2.0..2.0);
        let n = rng.gen_range(0..=8u32);
        let branch = if rng.gen_bool(0.5) { Branch::Plus } else { Branch::Minus };
        let Ok(p) = FamilyParams::new(alpha, a, b, c, 0.0, 1.0, 0.0, NAT) else { continue };
        if discriminant(&p) >= 0.0 {
            return (p, n, branch);
        }
    }
}

fn duality_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_0001);
    let mut run = || -> Result<[f64; 2]> {
        let mut wrong_length = 0usize;
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let (p, n, branch) = random_family(&mut rng);
            let p = p.with_epsilon(epsilon_n(&p, n, branch)?);
            let series = eigen_series(&p, DEFAULT_MAX_TERMS)?;
            if !series.terminated || series.terms != n as usize + 1 {
                wrong_length += 1;
                continue;
            }
            for rho in [0.3, 0.8, 1.5, 2.5] {
                let got = series.eval(rho);
                let want = terminated_closed_form(&p, n, branch, rho);
                // Relative to the term magnitudes, which is what cancellation can cost.
                let scale: f64 = series.series.terms().iter().map(|t| t.eval(rho).abs()).sum();
                worst = worst.max((got - want).abs() / scale);
            }
        }
        Ok([wrong_length as f64, worst])
    };
    split(run(), [("duality.termination", 0.0), ("duality.laguerre", 1e-10)])
}

fn residual_checks() -> Vec<CheckResult> {
    let run = |coulomb: bool| -> Result<f64> {
        let grid = RadialGrid::new(1e-3, 30.0, 4000)?;
        let mut worst: f64 = 0.0;
        for n in 0..=5u32 {
            for l in 0..=3u32 {
                let (p, e) = if coulomb {
                    (coulomb_level(n, l, NAT, 1.0)?, energy_coulomb(n, l, &NAT, 1.0)?.energy)
                } else {
                    (oscillator_level(n, l, NAT, 1.0)?, energy_oscillator(n, l, &NAT)?.energy)
                };
                let w = Wavefunction::new(p, n)?;
                let psi = sample_wavefunction(&w, &grid);
                let v = |r: f64| if coulomb { -1.0 / r } else { 0.5 * r * r };
                worst = worst.max(residual(v, e, &psi, f64::from(l), &grid, Stencil::SevenPoint));
            }
        }
        Ok(worst)
    };
    vec![
        CheckResult::from_measurement("residuals.coulomb", 1e-6, run(true)),
        CheckResult::from_measurement("residuals.oscillator", 1e-6, run(false)),
    ]
}

fn pct_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_0002);
    let signed = |rng: &mut ChaCha8Rng| {
        let m: f64 = rng.gen_range(0.2..2.0);
        if rng.gen_bool(0.5) {
            m
        } else {
            -m
        }
    };

    let mut identity_run = || -> Result<[f64; 2]> {
        let mut worst = [0.0f64; 2];
        for _ in 0..50 {
            let alpha = rng.gen_range(-2.0..2.0);
            let a = signed(&mut rng);
            let (b, c, eps) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let l = f64::from(rng.gen_range(0..5u32));
            let p = FamilyParams::new(alpha, a, b, c, eps, 1.0, l, NAT)?;
            let e = pct_energy(&p)?;
            for i in 0..20 {
                let rho = 0.1 + 9.9 * f64::from(i) / 19.0;
                let x = pct_potential(&p, &ExponentialMap, e, rho);
                let y = exp_map_potential(&p, rho);
                // The energy cancels against constants inside the map, so it sets the scale too.
                worst[0] = worst[0].max((x - y).abs() / (x.abs().max(y.abs()) + e.abs()));
            }
            worst[1] = worst[1].max((pct_energy(&p.with_l(l + 1.0))? - e).abs());
        }
        Ok(worst)
    };
    let identity = identity_run();

    let residual_run = || -> Result<f64> {
        let grid = RadialGrid::new(0.05, 25.0, 4000)?;
        let mut worst: f64 = 0.0;
        for (alpha, a, b, c, l) in [(-1.0, 0.25, 0.5, -0.4, 2u32), (-0.5, -0.6, 0.3, 0.2, 1)] {
            let base = FamilyParams::new(alpha, a, b, c, 0.0, 1.0, 0.0, NAT)?;
            for n in 0..=3 {
                let sol = PctSolution::new(base, l, n, Branch::Minus)?;
                let psi: Vec<f64> = grid.points().map(|rho| pct_wavefunction(&sol, rho)).collect();
                let r = residual(|rho| sol.potential(rho), sol.energy, &psi, f64::from(l), &grid, Stencil::SevenPoint);
                worst = worst.max(r);
            }
        }
        Ok(worst)
    };

    let morse_run = || -> Result<f64> {
        let p = FamilyParams::new(-1.0, -0.5, 0.7, 0.2, 0.3, 1.0, 2.0, NAT)?;
        let m = morse_view(&p)?;
        let pts: Vec<f64> = (0..200).map(|i| 0.05 + 0.05 * f64::from(i)).collect();
        let target: Vec<f64> = pts
            .iter()
            .map(|&rho| reduced_exp_map_potential(&p, rho) + p.l * (p.l + 1.0) / (rho * rho))
            .collect();
        let (qa, qb) = fit_two_exponentials(&pts, &target);
        let scale = target.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let fit = pts
            .iter()
            .zip(&target)
            .map(|(&rho, t)| (qa * (-2.0 * rho).exp() + qb * (-rho).exp() - t).abs())
            .fold(0.0f64, f64::max);
        // The fitted coefficients must also be the ones the Morse view reports.
        let coeff = ((qa - m.quadratic).abs() + (qb - m.linear).abs()) / (m.quadratic.abs() + m.linear.abs());
        Ok((fit / scale).max(coeff))
    };

    let mut out = split(identity, [("pct.exp_map", 1e-12), ("pct.l_independence", 0.0)]);
    out.push(CheckResult::from_measurement("pct.residual", 1e-6, residual_run()));
    out.push(CheckResult::from_measurement("pct.morse_fit", 1e-10, morse_run()));
    out
}

/// Least-squares `A e^(-2 rho) + B e^(-rho)` through the samples.
fn fit_two_exponentials(rho: &[f64], target: &[f64]) -> (f64, f64) {
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&r, &y) in rho.iter().zip(target) {
        let (u, v) = ((-2.0 * r).exp(), (-r).exp());
        s11 += u * u;
        s12 += u * v;
        s22 += v * v;
        t1 += u * y;
        t2 += v * y;
    }
    let det = s11 * s22 - s12 * s12;
    ((t1 * s22 - t2 * s12) / det, (s11 * t2 - s12 * t1) / det)
}

fn second_class_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_0003);
    let worked = || -> Result<f64> {
        let p = SecondClassParams::new(2.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0, 1.0, NAT)?;
        let dc = derived_coeffs(&p)?;
        let got = [dc.a2, dc.a1, dc.b1, dc.b2, dc.b3, dc.c1, dc.c2, dc.c3, dc.d1, dc.d2, dc.d3];
        let want = [1.0, 1.0, 4.0, 0.5, 0.0, 2.0, 0.0, 0.0, -4.0, 1.0, 6.0];
        Ok(got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max))
    };

    let mut invariants: f64 = 0.0;
    let mut draws = 0;
    while draws < 200 {
        let signed = |rng: &mut ChaCha8Rng| {
            let m: f64 = rng.gen_range(0.2..2.0);
            if rng.gen_bool(0.5) {
                m
            } else {
                -m
            }
        };
        let alpha = rng.gen_range(-1.0..3.0);
        let (gamma, a, b) = (signed(&mut rng), signed(&mut rng), signed(&mut rng));
        let (beta, delta) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let Ok(p) = SecondClassParams::new(alpha, beta, delta, gamma, a, b, 0, 1.0, NAT) else { continue };
        let Ok(dc) = derived_coeffs(&p) else { continue };
        draws += 1;
        let rel = |x: f64, y: f64| if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()) };
        invariants = invariants
            .max(rel(dc.a1, dc.a2.powi(-2)))
            .max(rel(1.0 / dc.a2, (alpha - 1.0) * gamma * a))
            .max(rel(dc.c3, -dc.c1 * dc.c2 * dc.c2 / b))
            .max(rel(dc.b3, 1.0 + beta - dc.b1 * dc.b2 * dc.b2))
            .max(rel(dc.d3, 1.0 + beta - 4.0 / dc.d1 - dc.d1 * dc.d2 * dc.d2));
    }

    let s_check = || -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (alpha, beta, delta, gamma, a, b) in [(2.0, 0.3, 0.1, 0.6, 0.8, 0.5), (0.5, -0.4, 0.2, 0.7, -0.9, 0.6)] {
            let p = SecondClassParams::new(alpha, beta, delta, gamma, a, b, 1, 1.0, NAT)?;
            let dc = derived_coeffs(&p)?;
            let grid = RadialGrid::new(0.2, 4.0, 801)?;
            for form in [FForm::Printed(&dc), FForm::Exact] {
                worst = worst.max(log_derivative_error(form, &p, &grid)?);
            }
        }
        Ok(worst)
    };

    let template = SecondClassParams::new(2.0, 0.3, -0.15, 0.45, -0.8, -0.5, 0, 1.0, NAT);
    let grid: Vec<f64> = bertrand_grid();
    let report = |reduction: Reduction| -> Result<f64> {
        let r = constant_independence_report(&grid, &template.clone()?, reduction, 8, seed)?;
        Ok(r.entries.iter().filter(|e| e.constant_independent).count() as f64)
    };

    let chain = || -> Result<(f64, f64)> {
        let p = SecondClassParams::new(0.5, 0.4, -0.3, 0.4, 0.6, 0.3, 1, 1.0, NAT)?;
        let (s_plus, _) = eta_bar_exponents(&p)?;
        let lo = (2.0 * convergence_boundary(&p)).max(0.5);
        let grid = RadialGrid::new(lo, lo + 5.5, 2001)?;
        let c = chain_residual(&p, s_plus, 40, &grid, 0.0)?;
        require(c.tail < 1e-9, || format!("series tail {} not certified", c.tail))?;
        let scan = energy_scan(&p, s_plus, 40, &grid, &[-0.1, 0.0, 0.1])?;
        Ok((c.residual, scan[1].1 / scan[0].1.min(scan[2].1)))
    };
    let chain = chain().map(|(r, s)| [r, s]);

    let mut out = vec![
        CheckResult::from_measurement("second_class.worked_example", 0.0, worked()),
        CheckResult::from_measurement("second_class.invariants", 4.0 * f64::EPSILON, Ok(invariants)),
        CheckResult::from_measurement("second_class.s_factor", 1e-8, s_check()),
        CheckResult::from_measurement("second_class.report_printed", 0.0, report(Reduction::Printed)),
        CheckResult::from_measurement("second_class.report_exact", 0.0, report(Reduction::Exact)),
    ];
    out.extend(split(
        chain,
        [("second_class.chain_residual", 1e-5), ("second_class.energy_scan", 1e-2)],
    ));
    out
}

/// Largest gap between a sixth-order difference of `log S` and the
/// log-derivative it was integrated from.
pub fn log_derivative_error(form: FForm<'_>, p: &SecondClassParams, grid: &RadialGrid) -> Result<f64> {
    let s = s_factor(form, p, grid)?;
    let ls: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let h = grid.spacing();
    let mut worst: f64 = 0.0;
    for i in 3..grid.n_points - 3 {
        let d = (-ls[i - 3] + 9.0 * ls[i - 2] - 45.0 * ls[i - 1] + 45.0 * ls[i + 1] - 9.0 * ls[i + 2] + ls[i + 3])
            / (60.0 * h);
        worst = worst.max((d - s_log_derivative(form, p, grid.point(i))).abs());
    }
    Ok(worst)
}
