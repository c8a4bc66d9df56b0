//! Subcommand bodies. Each takes a validated [`RunConfig`] and returns the
//! rendered output.

use super::config::{ConfigError, RunConfig};
use super::table::{Cell, Table};
use super::CliError;
use crate::checks::{self, bertrand_grid, CheckResult};
use crate::family::{classify_alpha, couplings, FamilyParams, PhysicalConstants, ALPHA_TOL};
use crate::oracle::{fd_spectrum, residual, RadialGrid, Stencil};
use crate::pct::{exp_map_potential, reduced_exp_map_potential, pct_wavefunction, PctSolution};
use crate::second_class::{
    constant_independence_report, convergence_boundary, derived_coeffs, eta_bar_exponents,
    exact_reduced_potential, f1_turning_point, second_potential, Reduction, SecondClassParams,
};
use crate::spectrum::{coulomb_level, energy_coulomb, energy_oscillator, oscillator_level, Branch};

const CONSTANT_KEYS: [&str; 5] = ["hbar", "mass", "coulomb_strength", "omega", "lambda"];
const FIRST_KEYS: [&str; 9] = ["alpha", "a", "b", "c", "epsilon", "energy", "l", "n", "case"];
const SECOND_KEYS: [&str; 8] = ["alpha", "beta", "delta", "gamma", "a", "b", "l", "reduction"];

fn accepted(groups: &[&[&'static str]]) -> Vec<&'static str> {
    let mut out = Vec::new();
    for k in groups.iter().flat_map(|g| g.iter()) {
        if !out.contains(k) {
            out.push(*k);
        }
    }
    out
}

fn constants(cfg: &RunConfig) -> Result<PhysicalConstants, CliError> {
    let nat = PhysicalConstants::natural();
    let c = PhysicalConstants {
        hbar: cfg.f64_or("hbar", nat.hbar)?,
        mass: cfg.f64_or("mass", nat.mass)?,
        coulomb_strength: cfg.f64_or("coulomb_strength", nat.coulomb_strength)?,
        omega: cfg.f64_or("omega", nat.omega)?,
    };
    c.validate()?;
    Ok(c)
}

fn branch(cfg: &RunConfig) -> Result<Branch, ConfigError> {
    Ok(match cfg.choice_or("branch", &["plus", "minus"], "minus")? {
        "plus" => Branch::Plus,
        _ => Branch::Minus,
    })
}

fn grid_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i == n - 1 { hi } else { lo + step * i as f64 })
}

fn rv_table(points: impl Iterator<Item = f64>, v: impl Fn(f64) -> f64) -> Table {
    let mut t = Table::new(&["r", "V"]);
    for r in points {
        t.push(vec![Cell::Num(r), Cell::Num(v(r))]);
    }
    t
}

enum FirstCase {
    Coulomb,
    Oscillator,
    Custom,
}

fn first_case(cfg: &RunConfig, alpha: f64) -> Result<FirstCase, ConfigError> {
    let explicit = ["a", "b", "c", "epsilon"].iter().any(|k| cfg.contains(k));
    Ok(match cfg.choice_or("case", &["auto", "coulomb", "oscillator", "custom"], "auto")? {
        "coulomb" => FirstCase::Coulomb,
        "oscillator" => FirstCase::Oscillator,
        "custom" => FirstCase::Custom,
        _ if !explicit && (alpha - 1.0).abs() <= ALPHA_TOL => FirstCase::Coulomb,
        _ if !explicit && (alpha - 2.0).abs() <= ALPHA_TOL => FirstCase::Oscillator,
        _ => FirstCase::Custom,
    })
}

fn custom_family(cfg: &RunConfig, alpha: f64, k: PhysicalConstants) -> Result<FamilyParams, CliError> {
    Ok(FamilyParams::new(
        alpha,
        cfg.f64_or("a", -0.5)?,
        cfg.f64_or("b", 0.0)?,
        cfg.f64_or("c", 0.0)?,
        cfg.f64_or("epsilon", 0.0)?,
        cfg.f64_or("lambda", 1.0)?,
        f64::from(cfg.u32_or("l", 0)?),
        k,
    )?)
}

fn second_params(cfg: &RunConfig, k: PhysicalConstants) -> Result<SecondClassParams, CliError> {
    Ok(SecondClassParams::new(
        cfg.f64_or("alpha", 2.0)?,
        cfg.f64_or("beta", 0.3)?,
        cfg.f64_or("delta", -0.15)?,
        cfg.f64_or("gamma", 0.45)?,
        cfg.f64_or("a", -0.8)?,
        cfg.f64_or("b", -0.5)?,
        cfg.u32_or("l", 0)?,
        cfg.f64_or("lambda", 1.0)?,
        k,
    )?)
}

/// `r,V` table for the first family, the exponential-map potential, or the
/// second class.
pub fn potential(cfg: &RunConfig) -> Result<Table, CliError> {
    let family = cfg.choice_or("family", &["first", "pct", "second"], "first")?;
    let keys = match family {
        "first" => accepted(&[&["family", "grid"], &FIRST_KEYS, &CONSTANT_KEYS]),
        "pct" => accepted(&[&["family", "grid", "branch"], &FIRST_KEYS[..8], &CONSTANT_KEYS]),
        _ => accepted(&[&["family", "grid"], &SECOND_KEYS, &CONSTANT_KEYS]),
    };
    cfg.restrict(&keys)?;
    let (lo, hi, n) = cfg.grid_or("grid", (0.1, 10.0, 100))?;
    let k = constants(cfg)?;
    let lambda = cfg.f64_or("lambda", 1.0)?;
    match family {
        "first" => {
            let alpha = cfg.f64_or("alpha", 2.0)?;
            let (level, l) = (cfg.u32_or("n", 0)?, cfg.u32_or("l", 0)?);
            let (p, energy) = match first_case(cfg, alpha)? {
                FirstCase::Coulomb => (coulomb_level(level, l, k, lambda)?, energy_coulomb(level, l, &k, lambda)?.energy),
                FirstCase::Oscillator => (oscillator_level(level, l, k, lambda)?, energy_oscillator(level, l, &k)?.energy),
                FirstCase::Custom => (custom_family(cfg, alpha, k)?, cfg.f64_or("energy", 0.0)?),
            };
            let cs = couplings(&p);
            Ok(rv_table(grid_points(lo, hi, n), |r| cs.potential(energy, r)))
        }
        "pct" => {
            let p = pct_params(cfg, k)?;
            Ok(rv_table(grid_points(lo, hi, n), |r| exp_map_potential(&p, r / lambda)))
        }
        _ => {
            let p = second_params(cfg, k)?;
            if cfg.choice_or("reduction", &["printed", "exact"], "printed")? == "exact" {
                Ok(rv_table(grid_points(lo, hi, n), |r| {
                    k.energy_from_reduced(exact_reduced_potential(&p, r / lambda), lambda)
                }))
            } else {
                let dc = derived_coeffs(&p)?;
                Ok(rv_table(grid_points(lo, hi, n), |r| second_potential(&dc, &p, r / lambda)))
            }
        }
    }
}

/// Exponential-map parameters; epsilon follows level `n` unless given.
fn pct_params(cfg: &RunConfig, k: PhysicalConstants) -> Result<FamilyParams, CliError> {
    let alpha = cfg.f64_or("alpha", -1.0)?;
    let p = custom_family(cfg, alpha, k)?;
    if cfg.contains("epsilon") {
        return Ok(p);
    }
    let sol = PctSolution::new(p, cfg.u32_or("l", 0)?, cfg.u32_or("n", 0)?, branch(cfg)?)?;
    Ok(sol.params)
}

/// Analytic levels with optional finite-difference comparison.
pub fn spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    cfg.restrict(&accepted(&[
        &["case", "n_max", "l_max", "verify", "grid"],
        &["alpha", "a", "b", "c", "epsilon", "energy"],
        &CONSTANT_KEYS,
    ]))?;
    let case = cfg.choice_or("case", &["coulomb", "oscillator", "numeric"], "coulomb")?;
    let (n_max, l_max) = (cfg.u32_or("n_max", 2)?, cfg.u32_or("l_max", 1)?);
    let verify = cfg.bool_or("verify", false)?;
    let k = constants(cfg)?;
    let lambda = cfg.f64_or("lambda", 1.0)?;
    // The oracle works with hbar = m = 1; rescale V and E accordingly.
    let to_nat = k.mass / (k.hbar * k.hbar);
    let (lo, hi, points) = cfg.grid_or("grid", default_spectrum_grid(case, n_max, l_max, &k, to_nat))?;
    let grid = RadialGrid::new(lo, hi, points)?;

    let custom = if case == "numeric" {
        let p = custom_family(cfg, cfg.f64_or("alpha", 2.0)?, k)?;
        Some((couplings(&p), cfg.f64_or("energy", 0.0)?))
    } else {
        None
    };
    let mut t = Table::new(&["n", "l", "E_analytic", "E_numeric", "abs_diff"]);
    for l in 0..=l_max {
        let v = |r: f64| -> f64 {
            to_nat
                * match case {
                    "coulomb" => -k.coulomb_strength / r,
                    "oscillator" => 0.5 * k.mass * k.omega * k.omega * r * r,
                    _ => {
                        let (cs, e) = custom.as_ref().expect("numeric case has couplings");
                        cs.potential(*e, r)
                    }
                }
        };
        let numeric = if verify || case == "numeric" {
            Some(fd_spectrum(v, l, &grid, n_max as usize + 1)?)
        } else {
            None
        };
        for n in 0..=n_max {
            let analytic = match case {
                "coulomb" => Some(energy_coulomb(n, l, &k, lambda)?.energy),
                "oscillator" => Some(energy_oscillator(n, l, &k)?.energy),
                _ => None,
            };
            let e_num = numeric.as_ref().map(|pairs| pairs[n as usize].energy / to_nat);
            let diff = analytic.zip(e_num).map(|(a, b)| (a - b).abs());
            t.push(vec![n.into(), l.into(), analytic.into(), e_num.into(), diff.into()]);
        }
    }
    Ok(t)
}

/// Box wide enough for the highest requested level, in units of the
/// natural length of the case (Bohr radius or oscillator length).
fn default_spectrum_grid(case: &str, n_max: u32, l_max: u32, k: &PhysicalConstants, to_nat: f64) -> (f64, f64, usize) {
    let (scale, extent, h) = match case {
        "coulomb" => {
            let top = f64::from(n_max + l_max + 1);
            (1.0 / (to_nat * k.coulomb_strength).abs(), (2.0 * top * top + 15.0 * top).max(60.0), 0.01)
        }
        "oscillator" => {
            let e_top = f64::from(2 * n_max + l_max) + 1.5;
            ((to_nat * k.mass * k.omega * k.omega).abs().powf(-0.25), ((2.0 * e_top).sqrt() + 8.0).max(20.0), 0.0025)
        }
        _ => (1.0, 20.0, 0.0025),
    };
    let (lo, hi) = (1e-3 * scale, extent * scale);
    (lo, hi, ((hi - lo) / (h * scale)).round() as usize + 1)
}

/// Runs the check suite; the caller turns failures into the exit status.
pub fn verify(seed: u64, only: Option<&str>) -> Result<Vec<CheckResult>, CliError> {
    Ok(checks::run_checks(seed, only)?)
}

pub fn verify_table(results: &[CheckResult]) -> Table {
    let mut t = Table::new(&["name", "pass", "measured", "tolerance"]);
    for r in results {
        let measured = if r.measured.is_finite() { Cell::Num(r.measured) } else { Cell::Empty };
        t.push(vec![r.name.as_str().into(), r.pass.into(), measured, Cell::Num(r.tolerance)]);
    }
    t
}

/// Levels of the exponential-map potential at fixed `l`, with the
/// radial-equation residual of each closed-form state.
pub fn pct(cfg: &RunConfig) -> Result<Table, CliError> {
    cfg.restrict(&accepted(&[&["alpha", "a", "b", "c", "l", "n_max", "branch", "grid"], &CONSTANT_KEYS]))?;
    let k = constants(cfg)?;
    let base = custom_family(cfg, cfg.f64_or("alpha", -1.0)?, k)?;
    let l = cfg.u32_or("l", 0)?;
    let br = branch(cfg)?;
    let (lo, hi, points) = cfg.grid_or("grid", (0.05, 25.0, 4000))?;
    let grid = RadialGrid::new(lo, hi, points)?;
    let mut t = Table::new(&["n", "l", "epsilon", "E", "residual"]);
    for n in 0..=cfg.u32_or("n_max", 3)? {
        let sol = PctSolution::new(base, l, n, br)?;
        let p = sol.params;
        let psi: Vec<f64> = grid.points().map(|rho| pct_wavefunction(&sol, rho)).collect();
        let e_half = 0.5 * k.reduced_from_energy(sol.energy, p.lambda);
        let res = residual(
            |rho| 0.5 * reduced_exp_map_potential(&p, rho),
            e_half,
            &psi,
            f64::from(l),
            &grid,
            Stencil::SevenPoint,
        );
        t.push(vec![n.into(), l.into(), p.epsilon.into(), sol.energy.into(), res.into()]);
    }
    Ok(t)
}

/// Derived coefficients and characteristic data of a second-class member.
pub fn second_class(cfg: &RunConfig) -> Result<Table, CliError> {
    cfg.restrict(&accepted(&[&SECOND_KEYS[..7], &CONSTANT_KEYS]))?;
    let p = second_params(cfg, constants(cfg)?)?;
    let dc = derived_coeffs(&p)?;
    let mut t = Table::new(&["name", "value"]);
    let named = [
        ("A1", dc.a1),
        ("A2", dc.a2),
        ("B1", dc.b1),
        ("B2", dc.b2),
        ("B3", dc.b3),
        ("C1", dc.c1),
        ("C2", dc.c2),
        ("C3", dc.c3),
        ("D1", dc.d1),
        ("D2", dc.d2),
        ("D3", dc.d3),
        ("convergence_boundary", convergence_boundary(&p)),
    ];
    for (name, value) in named {
        t.push(vec![name.into(), value.into()]);
    }
    let (s_plus, s_minus) = match eta_bar_exponents(&p) {
        Ok((sp, sm)) => (Some(sp), Some(sm)),
        Err(_) => (None, None),
    };
    t.push(vec!["s_plus".into(), s_plus.into()]);
    t.push(vec!["s_minus".into(), s_minus.into()]);
    t.push(vec!["f1_turning_point".into(), f1_turning_point(&p).into()]);
    Ok(t)
}

/// Constant-independence classification over a list of alphas for both
/// classes.
pub fn classify(cfg: &RunConfig, seed: u64) -> Result<Table, CliError> {
    cfg.restrict(&accepted(&[&["alphas", "draws"], &SECOND_KEYS[1..], &CONSTANT_KEYS]))?;
    let alphas = cfg.list_or("alphas", bertrand_grid())?;
    let draws = cfg.u32_or("draws", 20)? as usize;
    let reduction = match cfg.choice_or("reduction", &["printed", "exact"], "exact")? {
        "printed" => Reduction::Printed,
        _ => Reduction::Exact,
    };
    let mut template_cfg = cfg.clone();
    template_cfg.set("alpha", "2");
    let template = second_params(&template_cfg, constants(cfg)?)?;
    let report = constant_independence_report(&alphas, &template, reduction, draws, seed)?;
    let mut t = Table::new(&["alpha", "first_class", "first_constant_independent", "second_constant_independent", "second_surviving_exponents"]);
    for &alpha in &alphas {
        let class = classify_alpha(alpha);
        let entry = report.entries.iter().find(|e| e.alpha == alpha);
        let second: Cell = entry.map(|e| Cell::Bool(e.constant_independent)).unwrap_or(Cell::Empty);
        let surviving: Cell = entry
            .map(|e| {
                let parts: Vec<String> = e.surviving_exponents.iter().map(|x| format!("{x}")).collect();
                Cell::Text(parts.join(" "))
            })
            .unwrap_or(Cell::Empty);
        t.push(vec![
            alpha.into(),
            class.as_str().into(),
            class.is_constant_independent().into(),
            second,
            surviving,
        ]);
    }
    Ok(t)
}
