//! Closed-form cardinal B-splines on the integer knots `0, 1, ..., d + 1`.

/// `B_d(x)`, the cardinal B-spline of degree `d` supported on `[0, d + 1]`.
///
/// Degree zero is the indicator of `[0, 1)`.
pub fn cardinal(degree: u32, x: f64) -> f64 {
    let d = degree as usize;
    if !(0.0..(d as f64 + 1.0)).contains(&x) {
        return 0.0;
    }
    // v[i] holds B_k(x - i) while k climbs to d.
    let mut v = vec![0.0; d + 1];
    let cell = x.floor() as usize;
    v[cell.min(d)] = if cell <= d { 1.0 } else { 0.0 };
    for k in 1..=d {
        let kf = k as f64;
        for i in 0..=(d - k) {
            let y = x - i as f64;
            v[i] = (y * v[i] + (kf + 1.0 - y) * v[i + 1]) / kf;
        }
    }
    v[0]
}

/// Derivative of [`cardinal`]; zero for degree 0 away from the jumps.
pub fn cardinal_derivative(degree: u32, x: f64) -> f64 {
    if degree == 0 {
        return 0.0;
    }
    cardinal(degree - 1, x) - cardinal(degree - 1, x - 1.0)
}

/// `∫_{-∞}^{x} B_d`, using `∫ B_d = Σ_{i ≥ 0} B_{d+1}(· - i)`.
pub fn cardinal_antiderivative(degree: u32, x: f64) -> f64 {
    let top = degree as f64 + 1.0;
    if x <= 0.0 {
        return 0.0;
    }
    if x >= top {
        return 1.0;
    }
    let mut acc = 0.0;
    let mut i = 0.0;
    while i < x {
        acc += cardinal(degree + 1, x - i);
        i += 1.0;
    }
    acc
}

/// Refinement mask of `B_d`: `C(d + 1, k) / 2^d`, `k = 0..=d+1`.
pub fn mask_coefficients(degree: u32) -> Vec<f64> {
    let d = degree as i32;
    let mut c = 1.0f64;
    let mut out = Vec::with_capacity(degree as usize + 2);
    for k in 0..=(d + 1) {
        out.push(c / 2f64.powi(d));
        c = c * (d + 1 - k) as f64 / (k + 1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(cardinal(0, 0.3), 1.0);
        assert_eq!(cardinal(0, 1.0), 0.0);
        assert!((cardinal(1, 1.0) - 1.0).abs() < 1e-15);
        assert!((cardinal(2, 1.0) - 0.5).abs() < 1e-15);
        assert!((cardinal(2, 0.5) - 0.125).abs() < 1e-15);
        assert!((cardinal(3, 2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((cardinal(3, 1.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn antiderivative_reaches_one_and_matches_quadrature() {
        for d in 0..6 {
            assert!((cardinal_antiderivative(d, d as f64 + 1.0) - 1.0).abs() < 1e-14);
            let x = 0.37 * (d as f64 + 1.0);
            let q = crate::quadrature::composite(0.0, x, 0.0, 1.0, 8, |t| cardinal(d, t));
            assert!((cardinal_antiderivative(d, x) - q).abs() < 1e-13, "d={d}");
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        for d in 2..6 {
            let x = 1.3;
            let fd = (cardinal(d, x + h) - cardinal(d, x - h)) / (2.0 * h);
            assert!((cardinal_derivative(d, x) - fd).abs() < 1e-8);
        }
    }
}
