use approx::assert_abs_diff_eq;
use bounded_sampling::bspline;
use bounded_sampling::refinable::{cascade, Mask};
use proptest::prelude::*;
use std::f64::consts::PI;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

// a_k = 2^{-h} [C(n+1,k) + 4(2^{h-n} - 1) C(n-1,k-1)], written out independently.
fn gp_oracle(n: u64, h: f64) -> Vec<f64> {
    let factor = 4.0 * (2f64.powf(h - n as f64) - 1.0);
    (0..=n + 1)
        .map(|k| {
            let tail = if k >= 1 && k <= n { binomial(n - 1, k - 1) } else { 0.0 };
            2f64.powf(-h) * (binomial(n + 1, k) + factor * tail)
        })
        .collect()
}

#[test]
fn bspline_masks_are_scaled_binomials() {
    for n in 2..=7u32 {
        let mask = Mask::gp(n, n as f64).unwrap();
        let expected: Vec<f64> = (0..=n as u64 + 1).map(|k| binomial(n as u64 + 1, k) / 2f64.powi(n as i32)).collect();
        assert_eq!(mask.coeffs(), expected.as_slice());
        assert_eq!(mask.bspline_degree(), Some(n));
    }
}

#[test]
fn cubic_bspline_integer_values() {
    let phi = cascade(&Mask::gp(3, 3.0).unwrap(), 10).unwrap();
    assert_abs_diff_eq!(phi.evaluate(1.0), 1.0 / 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(phi.evaluate(2.0), 2.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(phi.evaluate(3.0), 1.0 / 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(bspline::cardinal(3, 2.0), 2.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn cascade_matches_cox_de_boor() {
    for degree in 2..=5u32 {
        let phi = cascade(&Mask::gp(degree, degree as f64).unwrap(), 10).unwrap();
        for i in 0..=200 {
            let x = (degree + 1) as f64 * i as f64 / 200.0;
            assert_abs_diff_eq!(phi.evaluate(x), bspline::cardinal(degree, x), epsilon = 1e-5);
        }
    }
}

#[test]
fn mask_record_round_trip() {
    let mask = Mask::gp(5, 4.3).unwrap();
    let back = Mask::from_record(&mask.to_record()).unwrap();
    assert_eq!(back.coeffs(), mask.coeffs());
    assert_eq!(back.offset(), mask.offset());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gp_mask_matches_closed_form(n in 2u32..8, dh in 0.05f64..12.0) {
        let h = n as f64 - 1.0 + dh;
        let mask = Mask::gp(n, h).unwrap();
        for (a, b) in mask.coeffs().iter().zip(gp_oracle(n as u64, h)) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
        prop_assert!(mask.is_palindromic());
    }

    #[test]
    fn even_and_odd_coefficients_each_sum_to_one(n in 2u32..8, dh in 0.05f64..12.0) {
        let mask = Mask::gp(n, n as f64 - 1.0 + dh).unwrap();
        let (lo, _) = mask.support();
        let (mut even, mut odd) = (0.0, 0.0);
        for (i, a) in mask.coeffs().iter().enumerate() {
            if (lo + i as i64) % 2 == 0 { even += a } else { odd += a }
        }
        prop_assert!((even - 1.0).abs() < 1e-12 && (odd - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_vanishes_at_pi(n in 2u32..8, dh in 0.05f64..12.0) {
        let mask = Mask::gp(n, n as f64 - 1.0 + dh).unwrap();
        prop_assert!(mask.symbol(PI).norm() < 1e-12);
        prop_assert!((mask.symbol(0.0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integer_translates_sum_to_one(n in 2u32..6, dh in 0.5f64..6.0, x in 0.0f64..1.0) {
        let phi = cascade(&Mask::gp(n, n as f64 - 1.0 + dh).unwrap(), 10).unwrap();
        let (lo, hi) = phi.support();
        let total: f64 = (-hi - 1..=1 - lo).map(|k| phi.evaluate(x - k as f64)).sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "{total}");
        prop_assert!((phi.integral() - 1.0).abs() < 1e-9);
    }
}
