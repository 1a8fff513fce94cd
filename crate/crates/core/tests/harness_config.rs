use bounded_sampling::basis::Basis;
use bounded_sampling::domain::BoxDomain;
use bounded_sampling::harness::commands::{l2_distance, reference_integral};
use bounded_sampling::harness::config::{Command, ExperimentConfig};
use bounded_sampling::harness::expr::Expr;
use bounded_sampling::refinable::Mask;
use proptest::prelude::*;

#[test]
fn every_command_round_trips_through_text() {
    for command in Command::ALL {
        let mut cfg = ExperimentConfig::new(command);
        cfg.set("seed", "42").unwrap();
        cfg.set("domain", "0,3^2").unwrap();
        cfg.set("function", "x*y + 1").unwrap();
        let back = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back.to_text(), cfg.to_text());
    }
}

#[test]
fn reference_integral_of_a_separable_function() {
    let domain = BoxDomain::rectangle((0.0, 2.0), (1.0, 3.0)).unwrap();
    let got = reference_integral(|p| p[0].exp() * p[1], &domain);
    assert!((got - (2f64.exp() - 1.0) * 4.0).abs() < 1e-12);
}

#[test]
fn l2_distance_of_an_exact_expansion_is_zero() {
    let unit = BoxDomain::interval(0.0, 1.0).unwrap();
    let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 2, &unit).unwrap();
    let coeffs: Vec<f64> = (0..basis.len()).map(|k| k as f64 * 0.3 - 1.0).collect();
    assert!(l2_distance(&basis, &coeffs, |p| basis.expansion(&coeffs, p)) < 1e-14);
    // Distance to the zero function is ‖f‖₂ = 1 for f ≡ 1.
    assert!((l2_distance(&basis, &vec![0.0; basis.len()], |_| 1.0) - 1.0).abs() < 1e-14);
}

proptest! {
    #[test]
    fn polynomial_expressions_evaluate_like_rust(a in -5.0f64..5.0, b in -5.0f64..5.0, x in -2.0f64..2.0) {
        let e = Expr::parse(&format!("({a}) * x^3 - ({b}) * x + 2 / (1 + x^2)")).unwrap();
        let expected = a * x.powi(3) - b * x + 2.0 / (1.0 + x * x);
        prop_assert!((e.eval(x, 0.0) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn numeric_settings_round_trip(n in 2u32..8, dh in 0.01f64..5.0, seed in any::<u64>(), tol in 1e-15f64..1e-3) {
        let mut cfg = ExperimentConfig::new(Command::Restore);
        cfg.set("n", &n.to_string()).unwrap();
        cfg.set("h", &(n as f64 - 1.0 + dh).to_string()).unwrap();
        cfg.set("seed", &seed.to_string()).unwrap();
        cfg.set("tol", &tol.to_string()).unwrap();
        let back = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(back.h, cfg.h);
        prop_assert_eq!(back.seed, seed);
        prop_assert_eq!(back.tol, tol);
    }
}
