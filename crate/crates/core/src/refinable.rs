//! Refinement masks, their symbols, and refinable functions on dyadic grids.
//!
//! A mask `a = {a_k}` with `Σ a_k = 2` defines a refinable function through
//! `φ(x) = Σ_k a_k φ(2x − k)`. The GP family `a^{(n,h)}` contains the cardinal
//! B-splines (`h = n`) and is the primal family used everywhere else in the crate.

use crate::bspline;
use crate::rational::{self, Rational};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

/// Default depth of the cascade grid, `2^-10`.
pub const DEFAULT_CASCADE_LEVEL: u32 = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaskError {
    #[error("GP masks need n >= 2, got n = {0}")]
    OrderTooSmall(u32),
    #[error("GP masks need h > n - 1, got n = {n}, h = {h}")]
    ShapeOutOfRange { n: u32, h: f64 },
    #[error("mask has no coefficients")]
    Empty,
    #[error("mask coefficients sum to {0}, expected 2")]
    BadNormalization(f64),
    #[error("malformed mask record: {0}")]
    Parse(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CascadeError {
    #[error("degenerate mask: {0}")]
    Degenerate(String),
    #[error("cascade does not converge: sup norm grew by {growth:.3e} between levels {from} and {to}")]
    NonConvergent { from: u32, to: u32, growth: f64 },
}

/// Finite refinement mask `a_{offset}, ..., a_{offset + len - 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    coeffs: Vec<f64>,
    exact: Option<Vec<Rational>>,
    offset: i64,
    order_n: Option<u32>,
    shape_h: Option<f64>,
}

impl Mask {
    /// Generic mask from floating-point coefficients.
    pub fn new(coeffs: Vec<f64>, offset: i64) -> Result<Self, MaskError> {
        if coeffs.is_empty() {
            return Err(MaskError::Empty);
        }
        let sum: f64 = coeffs.iter().sum();
        if (sum - 2.0).abs() > 1e-12 {
            return Err(MaskError::BadNormalization(sum));
        }
        Ok(Self {
            coeffs,
            exact: None,
            offset,
            order_n: None,
            shape_h: None,
        })
    }

    /// Mask with exact rational coefficients; the sum must be exactly 2.
    pub fn from_rationals(coeffs: Vec<Rational>, offset: i64) -> Result<Self, MaskError> {
        if coeffs.is_empty() {
            return Err(MaskError::Empty);
        }
        let sum = coeffs.iter().fold(Rational::zero(), |acc, c| acc + c);
        if sum != rational::int(2) {
            return Err(MaskError::BadNormalization(rational::to_f64(&sum)));
        }
        Ok(Self {
            coeffs: coeffs.iter().map(rational::to_f64).collect(),
            exact: Some(coeffs),
            offset,
            order_n: None,
            shape_h: None,
        })
    }

    /// The Haar mask `{1, 1}`.
    pub fn haar() -> Self {
        Self::from_rationals(vec![Rational::one(), Rational::one()], 0).expect("valid")
    }

    /// GP mask `a_k = 2^{-h} [C(n+1, k) + 4 (2^{h-n} − 1) C(n−1, k−1)]`, `k = 0..=n+1`.
    ///
    /// Coefficients are exact rationals whenever `h` is an integer.
    pub fn gp(n: u32, h: f64) -> Result<Self, MaskError> {
        if n < 2 {
            return Err(MaskError::OrderTooSmall(n));
        }
        if !(h.is_finite() && h > n as f64 - 1.0) {
            return Err(MaskError::ShapeOutOfRange { n, h });
        }
        let ni = n as i64;
        let mut mask = if h.fract() == 0.0 && h.abs() < 1e4 {
            let hi = h as i64;
            let factor = rational::int(4) * (rational::pow2(hi - ni) - Rational::one());
            let scale = rational::pow2(-hi);
            let exact: Vec<Rational> = (0..=ni + 1)
                .map(|k| {
                    &scale
                        * (rational::binomial(ni + 1, k) + &factor * rational::binomial(ni - 1, k - 1))
                })
                .collect();
            Self::from_rationals(exact, 0)?
        } else {
            let factor = 4.0 * (2f64.powf(h - n as f64) - 1.0);
            let scale = 2f64.powf(-h);
            let coeffs: Vec<f64> = (0..=ni + 1)
                .map(|k| {
                    scale
                        * (rational::to_f64(&rational::binomial(ni + 1, k))
                            + factor * rational::to_f64(&rational::binomial(ni - 1, k - 1)))
                })
                .collect();
            let sum: f64 = coeffs.iter().sum();
            if (sum - 2.0).abs() > 1e-12 {
                return Err(MaskError::BadNormalization(sum));
            }
            Self {
                coeffs,
                exact: None,
                offset: 0,
                order_n: None,
                shape_h: None,
            }
        };
        mask.order_n = Some(n);
        mask.shape_h = Some(h);
        Ok(mask)
    }

    /// Tags a mask with the GP parameters it was derived from.
    pub fn with_parameters(mut self, n: Option<u32>, h: Option<f64>) -> Self {
        self.order_n = n;
        self.shape_h = h;
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_deref()
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order_n(&self) -> Option<u32> {
        self.order_n
    }

    pub fn shape_h(&self) -> Option<f64> {
        self.shape_h
    }

    /// Integer support `[offset, offset + len − 1]` of the refinable function.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.coeffs.len() as i64 - 1)
    }

    /// `a_k`, zero outside the mask.
    pub fn coefficient(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i as usize >= self.coeffs.len() {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }

    /// `m(ξ) = ½ Σ_k a_k e^{−i k ξ}`.
    pub fn symbol(&self, xi: f64) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| Complex64::from_polar(a, -((i as i64 + self.offset) as f64) * xi))
            .sum::<Complex64>()
            * 0.5
    }

    /// Degree `d` when the mask is the cardinal B-spline mask `C(d+1, k) / 2^d`.
    pub fn bspline_degree(&self) -> Option<u32> {
        if self.coeffs.len() < 2 {
            return None;
        }
        let d = (self.coeffs.len() - 2) as u32;
        let reference = bspline::mask_coefficients(d);
        let matches = match &self.exact {
            Some(exact) => exact
                .iter()
                .zip(&reference)
                .all(|(e, r)| rational::from_f64(*r) == *e),
            None => self
                .coeffs
                .iter()
                .zip(&reference)
                .all(|(c, r)| (c - r).abs() <= 1e-15),
        };
        matches.then_some(d)
    }

    /// True when `a_{k}` reads the same from both ends.
    pub fn is_palindromic(&self) -> bool {
        match &self.exact {
            Some(e) => e.iter().eq(e.iter().rev()),
            None => {
                let n = self.coeffs.len();
                (0..n).all(|i| (self.coeffs[i] - self.coeffs[n - 1 - i]).abs() < 1e-14)
            }
        }
    }

    /// Text record `n h offset c0 c1 ...`; absent parameters are written as `-`.
    pub fn to_record(&self) -> String {
        let mut s = String::new();
        match self.order_n {
            Some(n) => write!(s, "{n}").unwrap(),
            None => s.push('-'),
        }
        match self.shape_h {
            Some(h) => write!(s, " {h}").unwrap(),
            None => s.push_str(" -"),
        }
        write!(s, " {}", self.offset).unwrap();
        match &self.exact {
            Some(exact) => {
                for c in exact {
                    write!(s, " {c}").unwrap();
                }
            }
            None => {
                for c in &self.coeffs {
                    write!(s, " {c}").unwrap();
                }
            }
        }
        s
    }

    pub fn from_record(record: &str) -> Result<Self, MaskError> {
        let mut fields = record.split_whitespace();
        let mut next = |what: &str| {
            fields
                .next()
                .map(str::to_owned)
                .ok_or_else(|| MaskError::Parse(format!("missing {what}")))
        };
        let n_field = next("n")?;
        let h_field = next("h")?;
        let offset_field = next("offset")?;
        let n = match n_field.as_str() {
            "-" => None,
            v => Some(
                v.parse::<u32>()
                    .map_err(|e| MaskError::Parse(format!("n `{v}`: {e}")))?,
            ),
        };
        let h = match h_field.as_str() {
            "-" => None,
            v => Some(parse_number(v)?),
        };
        let offset = offset_field
            .parse::<i64>()
            .map_err(|e| MaskError::Parse(format!("offset `{offset_field}`: {e}")))?;
        let rest: Vec<String> = record.split_whitespace().skip(3).map(str::to_owned).collect();
        if rest.is_empty() {
            return Err(MaskError::Empty);
        }
        let mask = if rest.iter().all(|c| c.contains('/') || is_integer_literal(c)) {
            let exact = rest
                .iter()
                .map(|c| {
                    Rational::from_str(c).map_err(|e| MaskError::Parse(format!("`{c}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Self::from_rationals(exact, offset)?
        } else {
            let coeffs = rest
                .iter()
                .map(|c| parse_number(c))
                .collect::<Result<Vec<_>, _>>()?;
            Self::new(coeffs, offset)?
        };
        Ok(mask.with_parameters(n, h))
    }
}

fn is_integer_literal(s: &str) -> bool {
    let t = s.strip_prefix('-').unwrap_or(s);
    !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
}

fn parse_number(s: &str) -> Result<f64, MaskError> {
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|e| MaskError::Parse(format!("`{s}`: {e}")))?;
        return r
            .to_f64()
            .ok_or_else(|| MaskError::Parse(format!("`{s}` out of range")));
    }
    s.parse::<f64>()
        .map_err(|e| MaskError::Parse(format!("`{s}`: {e}")))
}

/// Values of a compactly supported function on the dyadic grid
/// `s0 + i 2^{-L}`, `i = 0..=(s1 − s0) 2^L`, evaluated off-grid by linear
/// interpolation.
#[derive(Debug, Clone)]
pub struct DyadicFunction {
    level: u32,
    support: (i64, i64),
    values: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DyadicFunction {
    pub fn new(level: u32, support: (i64, i64), values: Vec<f64>) -> Self {
        assert!(support.1 > support.0, "empty support");
        let expected = ((support.1 - support.0) as usize) << level;
        assert_eq!(values.len(), expected + 1, "grid size mismatch");
        let h = 0.5 / (1u64 << level) as f64;
        let mut cumulative = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in values.windows(2) {
            acc += h * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Self {
            level,
            support,
            values,
            cumulative,
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn support(&self) -> (i64, i64) {
        self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid spacing `2^{-L}`.
    pub fn spacing(&self) -> f64 {
        1.0 / (1u64 << self.level) as f64
    }

    pub fn grid_point(&self, i: usize) -> f64 {
        self.support.0 as f64 + i as f64 * self.spacing()
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let (s0, s1) = (self.support.0 as f64, self.support.1 as f64);
        if !(s0..=s1).contains(&x) {
            return None;
        }
        let t = (x - s0) * (1u64 << self.level) as f64;
        let last = self.values.len() - 1;
        let i = (t.floor() as usize).min(last - 1);
        Some((i, t - i as f64))
    }

    /// Linear interpolation between adjacent grid values; exactly 0 outside the support.
    pub fn evaluate(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, frac)) => {
                if frac == 0.0 {
                    self.values[i]
                } else {
                    self.values[i] + frac * (self.values[i + 1] - self.values[i])
                }
            }
        }
    }

    /// Slope of the interpolant at `x` (right-sided at grid points).
    pub fn derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => 0.0,
            Some((i, _)) => (self.values[i + 1] - self.values[i]) / self.spacing(),
        }
    }

    /// `∫_{-∞}^{x}` of the interpolant.
    pub fn antiderivative(&self, x: f64) -> f64 {
        if x <= self.support.0 as f64 {
            return 0.0;
        }
        if x >= self.support.1 as f64 {
            return *self.cumulative.last().unwrap();
        }
        let (i, frac) = self.locate(x).expect("inside support");
        let h = self.spacing();
        let v0 = self.values[i];
        let v1 = self.values[i + 1];
        self.cumulative[i] + h * frac * (v0 + 0.5 * frac * (v1 - v0))
    }

    /// Integral over the whole support (trapezoidal rule on the grid).
    pub fn integral(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Samples of the same function on the coarser grid of `level`.
    pub fn restrict(&self, level: u32) -> DyadicFunction {
        assert!(level <= self.level);
        let stride = 1usize << (self.level - level);
        let values = self.values.iter().step_by(stride).copied().collect();
        DyadicFunction::new(level, self.support, values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Evaluates the refinable function of `mask` on the grid of `level`.
///
/// Integer values come from the eigenvector of `(a_{2i−j})` for eigenvalue 1,
/// scaled so they sum to one; dyadic values follow by repeated subdivision.
pub fn cascade(mask: &Mask, level: u32) -> Result<DyadicFunction, CascadeError> {
    let (n1, n2) = mask.support();
    if n2 <= n1 {
        return Err(CascadeError::Degenerate(
            "a single coefficient has no L2 refinable solution".into(),
        ));
    }
    let integer_values = integer_values(mask)?;
    let mut values: Vec<f64> = integer_values;
    values.push(0.0);
    let mut sups = vec![values.iter().fold(0.0f64, |m, v| m.max(v.abs()))];
    let width = (n2 - n1) as usize;
    for l in 1..=level {
        let half = 1i64 << (l - 1);
        let len = (width << l) + 1;
        let base_prev = n1 * half;
        let base = n1 * (half << 1);
        let mut next = vec![0.0; len];
        for (q, slot) in next.iter_mut().enumerate() {
            let p = base + q as i64;
            let mut acc = 0.0;
            for (i, &a) in mask.coeffs().iter().enumerate() {
                let k = mask.offset() + i as i64;
                let r = p - k * half - base_prev;
                if r >= 0 && (r as usize) < values.len() {
                    acc += a * values[r as usize];
                }
            }
            *slot = acc;
        }
        values = next;
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        sups.push(sup);
        if l >= 2 {
            let before = sups[(l - 2) as usize];
            if sup > 10.0 * before {
                return Err(CascadeError::NonConvergent {
                    from: l - 2,
                    to: l,
                    growth: sup / before,
                });
            }
        }
        if !sup.is_finite() {
            return Err(CascadeError::NonConvergent {
                from: l - 1,
                to: l,
                growth: f64::INFINITY,
            });
        }
    }
    Ok(DyadicFunction::new(level, (n1, n2), values))
}

/// Values at the integers `n1, ..., n2 − 1`; the right endpoint is zero for a
/// right-continuous compactly supported solution.
fn integer_values(mask: &Mask) -> Result<Vec<f64>, CascadeError> {
    let (n1, n2) = mask.support();
    let m = (n2 - n1) as usize;
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let k = 2 * (n1 + i as i64) - (n1 + j as i64);
            t[(i, j)] = mask.coefficient(k);
        }
    }
    let scale = t.norm().max(1.0);
    let a = &t - DMatrix::<f64>::identity(m, m);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]));
    let smallest = svd.singular_values[order[0]];
    if smallest > 1e-9 * scale {
        return Err(CascadeError::Degenerate(format!(
            "transfer matrix has no eigenvalue 1 (smallest singular value of T - I is {smallest:.3e})"
        )));
    }
    if m >= 2 {
        let second = svd.singular_values[order[1]];
        if second < 1e-8 * scale {
            return Err(CascadeError::Degenerate(format!(
                "eigenvalue-1 eigenspace is not one-dimensional (second singular value {second:.3e})"
            )));
        }
    }
    let v: Vec<f64> = v_t.row(order[0]).iter().copied().collect();
    let sum: f64 = v.iter().sum();
    if sum.abs() < 1e-12 {
        return Err(CascadeError::Degenerate(
            "eigenvector sums to zero; no unit partition of unity".into(),
        ));
    }
    Ok(v.into_iter().map(|x| x / sum).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::f64::consts::PI;

    #[test]
    fn gp_masks_match_hand_evaluation() {
        let m = Mask::gp(3, 3.0).unwrap();
        assert_eq!(
            m.exact().unwrap(),
            &[rat(1, 8), rat(1, 2), rat(3, 4), rat(1, 2), rat(1, 8)]
        );
        assert_eq!(m.bspline_degree(), Some(3));
        let m = Mask::gp(3, 4.0).unwrap();
        assert_eq!(
            m.exact().unwrap(),
            &[rat(1, 16), rat(1, 2), rat(7, 8), rat(1, 2), rat(1, 16)]
        );
        assert_eq!(m.bspline_degree(), None);
        assert!(m.is_palindromic());
    }

    #[test]
    fn gp_mask_rejects_outside_class() {
        assert_eq!(Mask::gp(1, 3.0), Err(MaskError::OrderTooSmall(1)));
        assert!(matches!(
            Mask::gp(3, 2.0),
            Err(MaskError::ShapeOutOfRange { .. })
        ));
        assert!(Mask::gp(3, 2.0001).is_ok());
    }

    #[test]
    fn fractional_shape_is_floating_point_and_normalized() {
        let m = Mask::gp(5, 4.1).unwrap();
        assert!(m.exact().is_none());
        assert_eq!(m.len(), 7);
        assert!((m.coeffs().iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(m.coeffs().iter().all(|&c| c > 0.0));
    }

    #[test]
    fn symbol_of_gp_3_4_matches_closed_form() {
        let m = Mask::gp(3, 4.0).unwrap();
        assert!((m.symbol(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for i in 0..200 {
            let xi = -PI + 2.0 * PI * i as f64 / 200.0;
            let expected = Complex64::from_polar(1.0, -2.0 * xi)
                * ((xi / 2.0).cos().powi(2) * (3.0 + xi.cos()) / 4.0);
            assert!((m.symbol(xi) - expected).norm() < 1e-12);
        }
        for n in 2..7 {
            let m = Mask::gp(n, n as f64 + 0.7).unwrap();
            assert!(m.symbol(PI).norm() < 1e-13);
        }
    }

    #[test]
    fn haar_cascade_is_unit_indicator() {
        let f = cascade(&Mask::haar(), 4).unwrap();
        assert_eq!(f.support(), (0, 1));
        assert!(f.values()[..16].iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!(f.values()[16], 0.0);
        assert_eq!(f.evaluate(0.3), 1.0);
        assert_eq!(f.evaluate(-0.1), 0.0);
        assert_eq!(f.evaluate(1.5), 0.0);
    }

    #[test]
    fn quadratic_bspline_cascade_matches_closed_form() {
        let f = cascade(&Mask::gp(2, 2.0).unwrap(), 8).unwrap();
        assert!((f.evaluate(1.0) - 0.5).abs() < 1e-14);
        assert!((f.evaluate(0.5) - 0.125).abs() < 1e-14);
        let f10 = cascade(&Mask::gp(2, 2.0).unwrap(), 10).unwrap();
        assert!((f10.evaluate(1.0) - bspline::cardinal(2, 1.0)).abs() < 1e-8);
    }

    #[test]
    fn gp_cascade_is_nonnegative_partition_of_unity() {
        let f = cascade(&Mask::gp(3, 4.0).unwrap(), 8).unwrap();
        assert_eq!(f.support(), (0, 4));
        assert!(f.values().iter().all(|&v| v >= -1e-15));
        let per = 1usize << 8;
        for i in 0..per {
            let s: f64 = (0..4).map(|k| f.values()[i + k * per]).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert!((f.integral() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn refinement_consistency_across_levels() {
        let mask = Mask::gp(4, 4.5).unwrap();
        let fine = cascade(&mask, 9).unwrap();
        let coarse = cascade(&mask, 8).unwrap();
        let restricted = fine.restrict(8);
        for (a, b) in restricted.values().iter().zip(coarse.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_and_divergent_masks_are_reported() {
        // {2} alone: no L2 solution.
        let m = Mask::new(vec![2.0], 0).unwrap();
        assert!(matches!(cascade(&m, 3), Err(CascadeError::Degenerate(_))));
        // {1, 0, 1} is refinable (φ = ½χ[0,2)) even though its translates are not stable.
        let f = cascade(&Mask::new(vec![1.0, 0.0, 1.0], 0).unwrap(), 3).unwrap();
        assert!(f.values()[..16].iter().all(|&v| (v - 0.5).abs() < 1e-15));
        // {1, 0, 0, 1}: eigenvalue 1 of the transfer matrix is not simple.
        let m = Mask::new(vec![1.0, 0.0, 0.0, 1.0], 0).unwrap();
        assert!(matches!(cascade(&m, 3), Err(CascadeError::Degenerate(_))));
        // Strongly non-smooth symmetric mask whose dyadic values blow up.
        let m = Mask::new(vec![-1.0, 1.0, 2.0, 1.0, -1.0], -1).unwrap();
        let err = cascade(&m, 10).unwrap_err();
        assert!(
            matches!(err, CascadeError::NonConvergent { .. } | CascadeError::Degenerate(_)),
            "{err:?}"
        );
    }

    #[test]
    fn antiderivative_of_interpolant() {
        let f = cascade(&Mask::gp(3, 3.0).unwrap(), 10).unwrap();
        assert!((f.antiderivative(2.0) - 0.5).abs() < 1e-6);
        assert!((f.antiderivative(10.0) - f.integral()).abs() < 1e-15);
        let q = crate::quadrature::composite(0.0, 1.3, 0.0, f.spacing(), 2, |x| f.evaluate(x));
        assert!((f.antiderivative(1.3) - q).abs() < 1e-13);
    }

    #[test]
    fn records_round_trip() {
        let m = Mask::gp(3, 4.0).unwrap();
        let rec = m.to_record();
        assert_eq!(rec, "3 4 0 1/16 1/2 7/8 1/2 1/16");
        assert_eq!(Mask::from_record(&rec).unwrap(), m);
        let g = Mask::gp(5, 4.3).unwrap();
        let back = Mask::from_record(&g.to_record()).unwrap();
        assert_eq!(back.coeffs(), g.coeffs());
        assert!(Mask::from_record("3 4").is_err());
        assert!(Mask::from_record("- - 0 1 1").unwrap().exact().is_some());
        assert!(matches!(
            Mask::from_record("- - 0 1 2"),
            Err(MaskError::BadNormalization(_))
        ));
    }
}
