//! Property-based checks of the algebra layer and the analytic identities
//! the closed forms are built on.

use proptest::prelude::*;
use soliton_forge::algebra::{ParamPoly, PhiPoly, Rational, Symbol, SymbolValues};
use soliton_forge::closed_form::{eval_phi, SolutionSet, WaveConfig};
use soliton_forge::expansion::{p_from_eta, paper_parameter_sets};

fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| Rational::new(n, d))
}

fn symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        Just(Symbol::A),
        Just(Symbol::B),
        Just(Symbol::C),
        Just(Symbol::N),
        Just(Symbol::M),
        Just(Symbol::Alpha),
        Just(Symbol::Eta),
        (0u32..3).prop_map(Symbol::Coeff),
    ]
}

fn param_poly() -> impl Strategy<Value = ParamPoly> {
    prop::collection::vec((rational(), prop::collection::vec((symbol(), 1u32..=3), 0..3)), 0..5)
        .prop_map(|terms| {
            let mut acc = ParamPoly::zero();
            for (c, factors) in terms {
                let mut term = ParamPoly::constant(c);
                for (sym, exp) in factors {
                    term = term.mul(&ParamPoly::symbol_pow(sym, exp));
                }
                acc = acc.add(&term);
            }
            acc
        })
}

fn phi_poly() -> impl Strategy<Value = PhiPoly> {
    prop::collection::vec(param_poly(), 0..5).prop_map(PhiPoly::from_coeffs)
}

proptest! {
    #[test]
    fn parampoly_print_parse_roundtrip(p in param_poly()) {
        let printed = p.to_string();
        let reparsed = ParamPoly::parse(&printed).unwrap();
        prop_assert_eq!(reparsed, p);
    }

    #[test]
    fn phipoly_differentiation_obeys_product_rule(f in phi_poly(), g in phi_poly()) {
        let lhs = f.mul(&g).differentiate(1);
        let rhs = f.differentiate(1).mul(&g).add(&f.mul(&g.differentiate(1)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_rule_never_mentions_the_shift(k in 1u32..4) {
        let d = PhiPoly::phi().pow(2).differentiate(k);
        prop_assert!(!d.contains_symbol(Symbol::A));
    }

    #[test]
    fn family_etas_are_antisymmetric(
        b in -3.0f64..3.0,
        c in -2.0f64..2.0,
        n in 0.2f64..2.0,
        m in 0.2f64..2.0,
        alpha in 0.2f64..2.0,
    ) {
        prop_assume!((b - c - 1.0).abs() > 1e-6);
        let sets = paper_parameter_sets(b, c, n, m, alpha).unwrap();
        let scale = 1.0 + sets[0].eta.abs();
        prop_assert!((sets[0].eta + sets[1].eta).abs() <= 1e-12 * scale);
    }

    #[test]
    fn wave_speed_inverts_the_dispersion_relation(
        eta in -10.0f64..10.0,
        n in 0.2f64..2.0,
        m in 0.2f64..2.0,
    ) {
        let p = p_from_eta(eta, n, m).unwrap();
        let back = -(2.0 * n * n + m * m + 2.0 * n * p + m * p);
        prop_assert!((back - eta).abs() <= 1e-12 * (1.0 + eta.abs()));
    }

    #[test]
    fn numeric_phi_slope_matches_the_closed_rule(
        b in -2.0f64..2.0,
        c in -1.5f64..1.5,
        a in -3.0f64..3.0,
        xi in -2.0f64..2.0,
    ) {
        prop_assume!((b * b - 4.0 * c).abs() > 0.05);
        prop_assume!((b - c - 1.0).abs() > 0.05);
        let cfg = WaveConfig::new(a, b, c, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, SolutionSet::Set1);
        prop_assume!(cfg.is_ok());
        let cfg = cfg.unwrap();
        let h = 1e-5;
        let samples: Result<Vec<f64>, _> = [-h, 0.0, h]
            .iter()
            .map(|d| eval_phi(&cfg, xi + d))
            .collect();
        prop_assume!(samples.is_ok());
        let s = samples.unwrap();
        // skip near-pole samples where the difference quotient is hopeless
        prop_assume!(s.iter().all(|v| v.abs() < 10.0));
        let numeric = (s[2] - s[0]) / (2.0 * h);
        let vals = SymbolValues::new().with(Symbol::B, b).with(Symbol::C, c);
        let rule = PhiPoly::derivative_rule().eval(s[1], &vals).unwrap();
        let scale = 1.0 + numeric.abs().max(rule.abs());
        prop_assert!((numeric - rule).abs() <= 1e-6 * scale);
    }
}
