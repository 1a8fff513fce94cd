//! Compactly supported biorthogonal duals for GP masks.
//!
//! The GP symbol factors as `m(ξ) = e^{−i(n+1)ξ/2} cos(ξ/2)^N r(cos ξ)` with
//! `N = n − 1` and `r` linear. A dual of the same shape,
//! `m̃(ξ) = e^{−i(n+1)ξ/2} cos(ξ/2)^Ñ r̃(cos ξ)`, satisfies
//! `m m̃* + m(·+π) m̃*(·+π) = 1` exactly when
//!
//! ```text
//! s(x) = r(x) r̃(x) − Σ_{i<ℓ} C(ℓ−1+i, i) ((1−x)/2)^i,   2ℓ = N + Ñ,
//! ```
//!
//! is divisible by `((1−x)/2)^ℓ` with an odd quotient. Both requirements are
//! linear in the coefficients of `r̃`, so the dual is found by an exact
//! rational solve.

use crate::rational::{self, LinearSolution, Poly, Rational};
use crate::refinable::{cascade, CascadeError, DyadicFunction, Mask, MaskError};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Tolerance for calling a synthesized dual verified.
pub const DEFAULT_BIORTH_TOL: f64 = 1e-6;

/// Number of uniform `ξ` points used for the symbol identity.
pub const SYMBOL_SAMPLES: usize = 1024;

/// Largest accepted relative growth of `‖φ̃‖₁` between cascade levels `L − 2` and `L`.
pub const L1_GROWTH_TOL: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error("GP parameters outside the class: {0}")]
    Mask(#[from] MaskError),
    #[error("N + Ñ = {0} is odd")]
    OddPairing(u32),
    #[error("dual degree m = {m} is below ℓ = {ell}")]
    DegreeTooLow { m: usize, ell: u32 },
    #[error("no dual of degree {m}: the linear system is singular or inconsistent")]
    NoDual { m: usize },
    #[error("over-determined: {conditions} conditions on {unknowns} unknowns are inconsistent")]
    OverDetermined { conditions: usize, unknowns: usize },
    #[error("extra condition has {got} coefficients, expected {expected}")]
    BadExtraCondition { got: usize, expected: usize },
}

/// Parameters of a dual construction: primal `(n, h)`, dual vanishing factor `Ñ`
/// and degree `m` of `r̃`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSpec {
    pub n: u32,
    pub h: f64,
    pub dual_factor: u32,
    pub degree: usize,
}

impl DualSpec {
    pub fn new(n: u32, h: f64, dual_factor: u32, degree: usize) -> Result<Self, DualError> {
        Mask::gp(n, h)?;
        let big_n = n - 1;
        if (big_n + dual_factor) % 2 == 1 {
            return Err(DualError::OddPairing(big_n + dual_factor));
        }
        let spec = Self {
            n,
            h,
            dual_factor,
            degree,
        };
        if spec.ell() < 1 || degree < spec.ell() as usize {
            return Err(DualError::DegreeTooLow {
                m: degree,
                ell: spec.ell(),
            });
        }
        Ok(spec)
    }

    /// Smallest admissible `Ñ` (2 for even `N`, 1 for odd) and `m = ℓ`.
    pub fn default_for(n: u32, h: f64) -> Result<Self, DualError> {
        let big_n = n.saturating_sub(1);
        let dual_factor = if big_n.is_multiple_of(2) { 2 } else { 1 };
        let ell = (big_n + dual_factor) / 2;
        Self::new(n, h, dual_factor, ell as usize)
    }

    /// `ℓ = (N + Ñ) / 2`.
    pub fn ell(&self) -> u32 {
        (self.n - 1 + self.dual_factor) / 2
    }

    /// Number of linear conditions the divisibility and odd-quotient requirements impose.
    pub fn condition_count(&self) -> usize {
        let ell = self.ell() as usize;
        ell + (self.degree + 1 - ell) / 2 + 1
    }
}

/// `m^{(n,h)}(ξ) = e^{−i(n+1)ξ/2} cos(ξ/2)^N r(cos ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFactorization {
    pub n: u32,
    pub h: f64,
    /// `N = n − 1`.
    pub cos_power: u32,
    /// `r(x) = (2^{h−n+1} − 1 + x) / 2^{h−n+1}`.
    pub r: Poly,
    /// False when `h` is fractional and `r` carries the binary value of a float.
    pub exact: bool,
}

impl SymbolFactorization {
    pub fn evaluate(&self, xi: f64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, -(self.n as f64 + 1.0) * xi / 2.0);
        phase * (xi / 2.0).cos().powi(self.cos_power as i32) * self.r.eval_f64(xi.cos())
    }
}

/// Factorization of the GP symbol. The closed form is applied for `n = 2` as well.
pub fn gp_symbol_factorization(n: u32, h: f64) -> Result<SymbolFactorization, DualError> {
    Mask::gp(n, h)?;
    let exact = h.fract() == 0.0 && h.abs() < 1e4;
    let c = if exact {
        rational::pow2(h as i64 - n as i64 + 1)
    } else {
        rational::from_f64(2f64.powf(h - n as f64 + 1.0))
    };
    let r = Poly::new(vec![
        (&c - Rational::one()) / &c,
        Rational::one() / &c,
    ]);
    Ok(SymbolFactorization {
        n,
        h,
        cos_power: n - 1,
        r,
        exact,
    })
}

/// Additional linear condition `Σ coeffs[i] a_i = rhs` on the coefficients of `r̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtraCondition {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

/// The assembled linear conditions on `(a_0, ..., a_m)`.
#[derive(Debug, Clone)]
pub struct DualSystem {
    pub matrix: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    /// Rows `0..ℓ` come from the remainder, the rest from the odd quotient.
    pub remainder_rows: usize,
}

/// Result of [`solve_dual_mask`].
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub spec: DualSpec,
    /// `r̃(x) = a_0 + a_1 x + ... + a_m x^m`.
    pub r_tilde: Poly,
    pub mask: Mask,
    pub system: DualSystem,
    /// True when the minimum-norm rule picked one of several solutions.
    pub minimum_norm: bool,
}

/// `Σ_{i<ℓ} C(ℓ−1+i, i) ((1−x)/2)^i`.
fn truncated_binomial_series(ell: u32) -> Poly {
    let base = half_one_minus_x();
    (0..ell as i64).fold(Poly::zero(), |acc, i| {
        &acc + &base
            .pow(i as u32)
            .scale(&rational::binomial(ell as i64 - 1 + i, i))
    })
}

fn half_one_minus_x() -> Poly {
    Poly::new(vec![rational::rat(1, 2), rational::rat(-1, 2)])
}

/// Builds the divisibility and odd-quotient conditions for `spec`.
pub fn dual_system(spec: &DualSpec) -> Result<DualSystem, DualError> {
    let fact = gp_symbol_factorization(spec.n, spec.h)?;
    let ell = spec.ell();
    let divisor = half_one_minus_x().pow(ell);
    let series = truncated_binomial_series(ell);
    let (q_t, rem_t) = series.div_rem(&divisor);
    let columns: Vec<(Poly, Poly)> = (0..=spec.degree)
        .map(|i| (&fact.r * &Poly::monomial(i)).div_rem(&divisor))
        .collect();

    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for c in 0..ell as usize {
        matrix.push(columns.iter().map(|(_, rem)| rem.coeff(c)).collect());
        rhs.push(rem_t.coeff(c));
    }
    let quotient_degree = spec.degree + 1 - ell as usize;
    for e in (0..=quotient_degree).step_by(2) {
        matrix.push(columns.iter().map(|(q, _)| q.coeff(e)).collect());
        rhs.push(q_t.coeff(e));
    }
    Ok(DualSystem {
        matrix,
        rhs,
        remainder_rows: ell as usize,
    })
}

/// Solves for the dual mask of `spec`.
///
/// With fewer conditions than unknowns and no `extra` conditions, the solution
/// of minimal ℓ² mask norm is returned.
pub fn solve_dual_mask(
    spec: &DualSpec,
    extra: &[ExtraCondition],
) -> Result<DualSolution, DualError> {
    let unknowns = spec.degree + 1;
    let mut system = dual_system(spec)?;
    for cond in extra {
        if cond.coeffs.len() != unknowns {
            return Err(DualError::BadExtraCondition {
                got: cond.coeffs.len(),
                expected: unknowns,
            });
        }
        system.matrix.push(cond.coeffs.clone());
        system.rhs.push(cond.rhs.clone());
    }
    let conditions = system.matrix.len();
    let (coeffs, minimum_norm) = match rational::solve(&system.matrix, &system.rhs) {
        LinearSolution::Unique(a) => (a, false),
        LinearSolution::Inconsistent if conditions > unknowns || !extra.is_empty() => {
            return Err(DualError::OverDetermined {
                conditions,
                unknowns,
            })
        }
        LinearSolution::Inconsistent => return Err(DualError::NoDual { m: spec.degree }),
        LinearSolution::Underdetermined { rank, .. } => {
            if rank < conditions.min(unknowns) || !extra.is_empty() {
                return Err(DualError::NoDual { m: spec.degree });
            }
            (minimum_norm_solution(spec, &system)?, true)
        }
    };
    let r_tilde = Poly::new(coeffs);
    let mask = dual_mask_from_polynomial(spec, &r_tilde)?;
    Ok(DualSolution {
        spec: spec.clone(),
        r_tilde,
        mask,
        system,
        minimum_norm,
    })
}

/// Laurent coefficients (offset, values) of the mask `ã` defined by `r̃`.
fn dual_mask_laurent(spec: &DualSpec, r_tilde: &Poly) -> (i64, Vec<Rational>) {
    let m = spec.degree;
    // Σ_i a_i ((z + 1/z)/2)^i = z^{-m} Σ_i a_i z^{m-i} ((1 + z²)/2)^i
    let half_one_plus_z2 = Poly::new(vec![
        rational::rat(1, 2),
        Rational::zero(),
        rational::rat(1, 2),
    ]);
    let mut acc = Poly::zero();
    for i in 0..=m {
        let a = r_tilde.coeff(i);
        if a.is_zero() {
            continue;
        }
        let term = &Poly::monomial(m - i) * &half_one_plus_z2.pow(i as u32);
        acc = &acc + &term.scale(&a);
    }
    let half_one_plus_z = Poly::new(vec![rational::rat(1, 2), rational::rat(1, 2)]);
    let acc = &acc * &half_one_plus_z.pow(spec.dual_factor);
    let offset = -(m as i64) + (spec.n as i64 + 1 - spec.dual_factor as i64) / 2;
    // ã_k = 2 × coefficient of z^k in m̃.
    let mut values: Vec<Rational> = acc.coeffs().iter().map(|c| c * rational::int(2)).collect();
    let mut offset = offset;
    while values.len() > 1 && values[0].is_zero() {
        values.remove(0);
        offset += 1;
    }
    while values.len() > 1 && values.last().is_some_and(Zero::is_zero) {
        values.pop();
    }
    (offset, values)
}

fn dual_mask_from_polynomial(spec: &DualSpec, r_tilde: &Poly) -> Result<Mask, DualError> {
    let (offset, values) = dual_mask_laurent(spec, r_tilde);
    let exact_primal = spec.h.fract() == 0.0;
    let mask = if exact_primal {
        Mask::from_rationals(values, offset)?
    } else {
        Mask::new(values.iter().map(rational::to_f64).collect(), offset)?
    };
    Ok(mask.with_parameters(Some(spec.n), Some(spec.h)))
}

/// Minimizes `‖ã‖²` subject to the conditions, through the exact KKT system.
fn minimum_norm_solution(spec: &DualSpec, system: &DualSystem) -> Result<Vec<Rational>, DualError> {
    let unknowns = spec.degree + 1;
    // Mask coefficients are linear in a: column i is the mask of r̃ = x^i.
    let columns: Vec<Vec<Rational>> = (0..unknowns)
        .map(|i| dual_mask_laurent(spec, &Poly::monomial(i)))
        .map(|(off, vals)| {
            let lo = -(spec.degree as i64) - 2;
            let mut full = vec![Rational::zero(); 4 * unknowns + spec.n as usize + 8];
            for (j, v) in vals.into_iter().enumerate() {
                full[(off - lo) as usize + j] = v;
            }
            full
        })
        .collect();
    let rows = system.matrix.len();
    let size = unknowns + rows;
    let mut kkt = vec![vec![Rational::zero(); size]; size];
    let mut rhs = vec![Rational::zero(); size];
    for i in 0..unknowns {
        for j in 0..unknowns {
            kkt[i][j] = columns[i]
                .iter()
                .zip(&columns[j])
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
        }
    }
    for (r, row) in system.matrix.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            kkt[unknowns + r][i] = v.clone();
            kkt[i][unknowns + r] = v.clone();
        }
        rhs[unknowns + r] = system.rhs[r].clone();
    }
    match rational::solve(&kkt, &rhs) {
        LinearSolution::Unique(x) | LinearSolution::Underdetermined { particular: x, .. } => {
            Ok(x[..unknowns].to_vec())
        }
        LinearSolution::Inconsistent => Err(DualError::NoDual { m: spec.degree }),
    }
}

/// Numerical biorthogonality check of a primal/dual mask pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiorthReport {
    /// `sup_ξ |m m̃* (ξ) + m m̃* (ξ + π) − 1|`.
    pub max_symbol_residual: f64,
    /// `max_k |∫ φ φ̃(· − k) − δ_{k0}|` by the trapezoidal rule at level `L`.
    pub max_time_residual: f64,
    /// The same residual after Aitken extrapolation of the sums at `L − 2, L − 1, L`.
    pub extrapolated_time_residual: f64,
    /// Symbol and extrapolated time residuals are both within tolerance.
    pub converged: bool,
    /// `‖φ̃‖₁` of the cascade at levels `L − 2` and `L`.
    pub dual_l1_norms: [f64; 2],
    /// The `L¹` norms settle (growth below [`L1_GROWTH_TOL`]). A growing norm means the
    /// cascade does not converge to a function, even when the inner products do.
    pub dual_stable: bool,
    /// `(k, ∫ φ φ̃(· − k))` for every overlapping shift, trapezoidal at level `L`.
    pub inner_products: Vec<(i64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl BiorthReport {
    /// Biorthogonal and with a stable dual cascade, so the dual can be tabulated.
    pub fn usable(&self) -> bool {
        self.converged && self.dual_stable
    }
}

/// Supremum of the duality-identity residual over `samples` uniform points in `[0, 2π)`.
pub fn symbol_identity_residual(primal: &Mask, dual: &Mask, samples: usize) -> f64 {
    (0..samples)
        .map(|i| {
            let xi = 2.0 * PI * i as f64 / samples as f64;
            let v = primal.symbol(xi) * dual.symbol(xi).conj()
                + primal.symbol(xi + PI) * dual.symbol(xi + PI).conj();
            (v - Complex64::new(1.0, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// `∫ φ(x) ψ(x − k) dx` by the trapezoidal rule on the common dyadic grid.
pub fn shifted_inner_product(phi: &DyadicFunction, psi: &DyadicFunction, k: i64) -> f64 {
    assert_eq!(phi.level(), psi.level(), "grids must share a level");
    let per = 1i64 << phi.level();
    let (p0, p1) = phi.support();
    let (q0, q1) = psi.support();
    let lo = p0.max(q0 + k);
    let hi = p1.min(q1 + k);
    if hi <= lo {
        return 0.0;
    }
    let h = 1.0 / per as f64;
    let mut acc = 0.0;
    for g in (lo * per)..=(hi * per) {
        let a = phi.values()[(g - p0 * per) as usize];
        let b = psi.values()[(g - (q0 + k) * per) as usize];
        let w = if g == lo * per || g == hi * per { 0.5 } else { 1.0 };
        acc += w * a * b;
    }
    acc * h
}

/// Checks the symbol identity on [`SYMBOL_SAMPLES`] points and the shifted inner
/// products of the cascaded functions at `level`.
pub fn verify_biorthogonality(primal: &Mask, dual: &Mask, level: u32, tol: f64) -> BiorthReport {
    let max_symbol_residual = symbol_identity_residual(primal, dual, SYMBOL_SAMPLES);
    let cascades: Result<(DyadicFunction, DyadicFunction), CascadeError> =
        cascade(primal, level).and_then(|p| Ok((p, cascade(dual, level)?)));
    let (phi, psi) = match cascades {
        Ok(pair) => pair,
        Err(e) => {
            return BiorthReport {
                max_symbol_residual,
                max_time_residual: f64::INFINITY,
                extrapolated_time_residual: f64::INFINITY,
                converged: false,
                dual_l1_norms: [f64::INFINITY; 2],
                dual_stable: false,
                inner_products: vec![],
                diagnostic: Some(e.to_string()),
            }
        }
    };
    let (p0, p1) = phi.support();
    let (q0, q1) = psi.support();
    let inner_products: Vec<(i64, f64)> = ((p0 - q1 + 1)..=(p1 - q0 - 1))
        .map(|k| (k, shifted_inner_product(&phi, &psi, k)))
        .collect();
    let delta = |k: i64| if k == 0 { 1.0 } else { 0.0 };
    let max_time_residual = inner_products
        .iter()
        .map(|&(k, v)| (v - delta(k)).abs())
        .fold(0.0, f64::max);
    let extrapolated_time_residual = if level >= 2 {
        let coarse = [level - 2, level - 1].map(|l| (phi.restrict(l), psi.restrict(l)));
        inner_products
            .iter()
            .map(|&(k, fine)| {
                let t0 = shifted_inner_product(&coarse[0].0, &coarse[0].1, k);
                let t1 = shifted_inner_product(&coarse[1].0, &coarse[1].1, k);
                (aitken(t0, t1, fine) - delta(k)).abs()
            })
            .fold(0.0, f64::max)
    } else {
        max_time_residual
    };
    let converged = max_symbol_residual <= tol && extrapolated_time_residual <= tol;
    let l1 = |f: &DyadicFunction| f.values().iter().map(|v| v.abs()).sum::<f64>() * f.spacing();
    let dual_l1_norms = [l1(&psi.restrict(level.saturating_sub(2))), l1(&psi)];
    let dual_stable = dual_l1_norms[1] <= dual_l1_norms[0] * (1.0 + L1_GROWTH_TOL);
    BiorthReport {
        max_symbol_residual,
        max_time_residual,
        extrapolated_time_residual,
        converged,
        dual_l1_norms,
        dual_stable,
        inner_products,
        diagnostic: (!converged).then(|| {
            format!(
                "residuals above tolerance {tol:e}: symbol {max_symbol_residual:.3e}, \
                 time {max_time_residual:.3e} (extrapolated {extrapolated_time_residual:.3e})"
            )
        }),
    }
}

/// Aitken's Δ² limit of three successive estimates; the last one when the
/// differences do not shrink geometrically.
fn aitken(t0: f64, t1: f64, t2: f64) -> f64 {
    let d0 = t1 - t0;
    let d1 = t2 - t1;
    let denom = d1 - d0;
    if denom == 0.0 || d0 == 0.0 || !(0.0..1.0).contains(&(d1 / d0)) {
        return t2;
    }
    t2 - d1 * d1 / denom
}
