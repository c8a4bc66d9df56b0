use proptest::prelude::*;

use quantum_bertrand::cli::{Cell, Table};
use quantum_bertrand::engine::{exp_series, MonomialOperator, MonomialTerm, OperatorA, OperatorO, WeightedPowerSeries};
use quantum_bertrand::family::{
    classify_alpha, coulomb_params, couplings, oscillator_params_with_sigma, AlphaClass, FamilyParams,
    PhysicalConstants,
};
use quantum_bertrand::pct::{exp_map_potential, pct_energy, pct_potential, ExponentialMap};
use quantum_bertrand::second_class::{derived_coeffs, FForm, SecondClassParams};
use quantum_bertrand::spectrum::{
    discriminant, eigen_series, energy_coulomb, energy_oscillator, epsilon_n, laguerre, Branch,
};

const NAT: PhysicalConstants = PhysicalConstants::natural();

fn nonzero(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo..hi, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn branch() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn operator_shifts_exponents_exactly(a in nonzero(0.1, 3.0), b in -3.0..3.0f64, c in -3.0..3.0f64,
                                         alpha in -3.0..3.0f64, s in -5.0..5.0f64) {
        let op_a = OperatorA::new(a, b, c, alpha).unwrap();
        let t = op_a.apply(MonomialTerm::power(s));
        prop_assert_eq!(t.expo, s - alpha);
        prop_assert_eq!(t.coeff, a * s * (s - 1.0) + b * s + c);
        let op_o = OperatorO::new(a, b, alpha).unwrap();
        let t = op_o.apply(MonomialTerm::power(s));
        prop_assert_eq!(t.expo, s + (alpha - 1.0));
        prop_assert_eq!(t.coeff, a * s + b);
    }

    #[test]
    fn operator_is_linear(a in nonzero(0.1, 3.0), b in -3.0..3.0f64, c in -3.0..3.0f64, alpha in 0.5..3.0f64,
                          s1 in -4.0..4.0f64, gap in 0.1..2.0f64, c1 in -2.0..2.0f64, c2 in -2.0..2.0f64,
                          rho in 0.2..3.0f64) {
        let op = OperatorA::new(a, b, c, alpha).unwrap();
        let (t1, t2) = (MonomialTerm::new(c1, s1), MonomialTerm::new(c2, s1 + gap));
        let whole = op.apply_series(&WeightedPowerSeries::from_terms([t1, t2])).eval(rho);
        let parts = op.apply(t1).eval(rho) + op.apply(t2).eval(rho);
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + parts.abs()));
    }

    #[test]
    fn series_coefficients_factorize(a in nonzero(0.2, 2.0), b in -2.0..2.0f64, c in -2.0..2.0f64,
                                     alpha in 0.5..3.0f64, eps in -2.0..2.0f64, scale in -1.5..1.5f64) {
        let op = OperatorA::new(a, b, c, alpha).unwrap();
        let series = exp_series(&op, scale, MonomialTerm::power(-eps), 11).unwrap();
        let mut expected = 1.0;
        let mut s = -eps;
        for (k, term) in series.series.terms().iter().rev().enumerate() {
            prop_assert!((term.expo - s).abs() < 1e-12);
            prop_assert!((term.coeff - expected).abs() <= 1e-12 * expected.abs().max(1e-300));
            expected *= scale * op.quadratic(s) / (k as f64 + 1.0);
            s -= alpha;
        }
    }

    #[test]
    fn termination_iff_quadratic_root(alpha in 0.5..3.0f64, a in -2.0..-0.2f64, b in -2.0..2.0f64,
                                      c in -2.0..2.0f64, n in 0u32..=8, br in branch()) {
        let p = FamilyParams::new(alpha, a, b, c, 0.0, 1.0, 0.0, NAT).unwrap();
        prop_assume!(discriminant(&p) >= 0.0);
        let eps = epsilon_n(&p, n, br).unwrap();
        let s_n = -eps - f64::from(n) * alpha;
        let q = p.operator_a().quadratic(s_n);
        prop_assert!(q.abs() <= 1e-10 * (a.abs() * s_n * s_n + b.abs() * s_n.abs() + c.abs() + 1.0));
        let series = eigen_series(&p.with_epsilon(eps), 64).unwrap();
        prop_assert!(series.terminated);
        prop_assert_eq!(series.terms, n as usize + 1);
        // A detuned epsilon runs to the cap.
        let detuned = eigen_series(&p.with_epsilon(eps + 0.3 * alpha), 20).unwrap();
        prop_assert!(detuned.terms == 20 || detuned.terms < n as usize + 1);
    }

    #[test]
    fn coupling_scaling_identities(alpha in -2.0..3.0f64, a in nonzero(0.2, 2.0), b in -2.0..2.0f64,
                                   c in -2.0..2.0f64, eps in -2.0..2.0f64, lambda in 0.2..5.0f64, l in 0u32..6) {
        let p = FamilyParams::new(alpha, a, b, c, eps, lambda, f64::from(l), NAT).unwrap();
        let cs = couplings(&p);
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-13 * x.abs().max(y.abs()).max(1e-300);
        prop_assert!(rel(cs.g1, cs.tg1 * lambda.powf(2.0 * (1.0 - alpha))));
        prop_assert!(rel(cs.g2, cs.tg2 * lambda.powf(2.0 - alpha)));
        prop_assert!(rel(cs.g3, cs.tg3 * lambda * lambda));
    }

    #[test]
    fn case_constructors_have_no_inverse_square(l in 0u32..=10, sigma in -5.0..-0.05f64) {
        for p in [coulomb_params(l, sigma, NAT, 1.0).unwrap(), oscillator_params_with_sigma(l, sigma, NAT, 1.0).unwrap()] {
            prop_assert!(p.a0().abs() < 1e-12);
            prop_assert!(couplings(&p).tg3.abs() < 1e-12 * (1.0 + f64::from(l * (l + 1))));
        }
    }

    #[test]
    fn classifier_is_the_exponent_test(alpha in -3.0..4.0f64) {
        let expected = alpha == 1.0 || alpha == 2.0;
        prop_assert_eq!(classify_alpha(alpha).is_constant_independent(), expected);
    }

    #[test]
    fn degeneracy_patterns(n in 0u32..6, l in 0u32..6, shift in 1u32..4) {
        let shifted = if l >= shift { Some((n + shift, l - shift)) } else { None };
        if let Some((n2, l2)) = shifted {
            prop_assert_eq!(energy_coulomb(n, l, &NAT, 1.0).unwrap().energy,
                            energy_coulomb(n2, l2, &NAT, 1.0).unwrap().energy);
        }
        if l >= 2 {
            prop_assert_eq!(energy_oscillator(n, l, &NAT).unwrap().energy,
                            energy_oscillator(n + 1, l - 2, &NAT).unwrap().energy);
        }
    }

    #[test]
    fn laguerre_matches_explicit_sum(n in 0u32..=6, k in 0.0..5.0f64, x in 0.0..20.0f64) {
        let terms: Vec<f64> = (0..=n).map(|j| {
            let binom: f64 = (1..=n - j).map(|i| (k + f64::from(j + i)) / f64::from(i)).product();
            let fact: f64 = (1..=j).map(f64::from).product();
            (-1.0f64).powi(j as i32) * binom * x.powi(j as i32) / fact
        }).collect();
        let sum: f64 = terms.iter().sum();
        // The alternating sum cancels near roots; its own rounding scales with the term sizes.
        let scale: f64 = terms.iter().map(|t| t.abs()).sum::<f64>().max(1.0);
        prop_assert!((laguerre(n, k, x) - sum).abs() / scale < 1e-12);
    }

    #[test]
    fn pct_map_matches_closed_form(alpha in -2.0..2.0f64, a in nonzero(0.2, 2.0), b in -2.0..2.0f64,
                                   c in -2.0..2.0f64, eps in -2.0..2.0f64, l in 0u32..5, rho in 0.1..10.0f64) {
        let p = FamilyParams::new(alpha, a, b, c, eps, 1.0, f64::from(l), NAT).unwrap();
        let e = pct_energy(&p).unwrap();
        let x = pct_potential(&p, &ExponentialMap, e, rho);
        let y = exp_map_potential(&p, rho);
        prop_assert!((x - y).abs() <= 1e-12 * (x.abs().max(y.abs()) + e.abs()));
        prop_assert_eq!(pct_energy(&p.with_l(f64::from(l + 1))).unwrap(), e);
    }

    #[test]
    fn second_class_invariants(alpha in -1.0..3.0f64, beta in -2.0..2.0f64, delta in -2.0..2.0f64,
                               gamma in nonzero(0.2, 2.0), a in nonzero(0.2, 2.0), b in nonzero(0.2, 2.0),
                               rho in 0.05..6.0f64) {
        prop_assume!((alpha - 1.0).abs() > 1e-3);
        let p = SecondClassParams::new(alpha, beta, delta, gamma, a, b, 0, 1.0, NAT).unwrap();
        let Ok(dc) = derived_coeffs(&p) else { return Ok(()) };
        let close = |x: f64, y: f64| (x - y).abs() <= 4.0 * f64::EPSILON * x.abs().max(y.abs());
        prop_assert!(close(dc.a1, 1.0 / (dc.a2 * dc.a2)));
        prop_assert!(close(dc.b3, 1.0 + beta - dc.b1 * dc.b2 * dc.b2));
        if dc.a1 > 0.0 {
            prop_assert!(FForm::Printed(&dc).values(&p, rho).f1 >= 0.0);
        }
        prop_assert!(FForm::Exact.values(&p, rho).f1 >= 0.0);
    }

    #[test]
    fn csv_tables_round_trip(rows in prop::collection::vec(
        (any::<i32>(), prop::num::f64::NORMAL | prop::num::f64::ZERO, "[ -~]{0,12}", any::<bool>(), any::<bool>()), 0..20)) {
        let mut t = Table::new(&["i", "x", "label", "flag"]);
        for (i, x, s, flag, empty) in rows {
            let x = if empty { Cell::Empty } else { Cell::Num(x) };
            t.push(vec![Cell::Int(i64::from(i)), x, Cell::Text(s), Cell::Bool(flag)]);
        }
        prop_assert_eq!(Table::parse_csv(&t.to_csv()).unwrap(), t);
    }
}

#[test]
fn coulomb_potential_is_pure_inverse_r() {
    for l in 0..4u32 {
        let line = energy_coulomb(0, l, &NAT, 1.0).unwrap();
        let p = quantum_bertrand::spectrum::coulomb_level(0, l, NAT, 1.0).unwrap();
        let cs = couplings(&p);
        let rv: Vec<f64> = (0..40).map(|i| 10f64.powf(-2.0 + 0.1 * f64::from(i))).map(|r| r * cs.potential(line.energy, r)).collect();
        let mean = rv.iter().sum::<f64>() / rv.len() as f64;
        assert!(rv.iter().all(|v| (v - mean).abs() < 1e-12), "l = {l}: {rv:?}");
    }
}

#[test]
fn classifier_tags() {
    assert_eq!(classify_alpha(1.0), AlphaClass::Coulomb);
    assert_eq!(classify_alpha(2.0), AlphaClass::Oscillator);
    assert_eq!(classify_alpha(1.5), AlphaClass::NotConstantIndependent);
}
