//! Boundary-restricted level-`j` bases on intervals and rectangles.
//!
//! Element `k` of an axis is `φ_{j,k}(x) = 2^{j/2} P(2^j (x − α) − k)` restricted to
//! `[α, β]`, for every integer shift whose support meets the open interval.
//! With this normalization `2^{−dj/2} Σ_k φ_{j,k} ≡ 1` on `Ω`.

use crate::bspline;
use crate::domain::{BoxDomain, Point};
use crate::quadrature;
use crate::refinable::{cascade, CascadeError, DyadicFunction, Mask, DEFAULT_CASCADE_LEVEL};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use std::ops::RangeInclusive;
use std::sync::Arc;
use thiserror::Error;

/// Gauss–Legendre order used on unit knot cells of spline profiles.
pub const SPLINE_GAUSS_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error(transparent)]
    Cascade(#[from] CascadeError),
    #[error("interval length {length} is not a multiple of 2^-{level}")]
    IncompatibleDomain { length: f64, level: u32 },
    #[error("bases differ in {0}")]
    Mismatch(&'static str),
    #[error("quadrature refinement changed entry ({row}, {col}) by {change:.3e}")]
    Quadrature { row: usize, col: usize, change: f64 },
    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },
    #[error("symmetric eigen-solver residual {residual:.3e} exceeds the tolerance")]
    EigenSolver { residual: f64 },
}

/// The univariate mother function of a basis.
#[derive(Debug, Clone)]
pub enum Profile {
    /// Cardinal B-spline of `degree` on `[offset, offset + degree + 1]`, evaluated in closed form.
    BSpline { degree: u32, offset: i64 },
    /// Refinable function tabulated by the cascade algorithm.
    Cascade(Arc<DyadicFunction>),
}

impl Profile {
    /// B-spline masks map to the closed form, everything else is cascaded to `level`.
    pub fn from_mask(mask: &Mask, level: u32) -> Result<Self, CascadeError> {
        match mask.bspline_degree() {
            Some(degree) => Ok(Profile::BSpline {
                degree,
                offset: mask.offset(),
            }),
            None => Ok(Profile::Cascade(Arc::new(cascade(mask, level)?))),
        }
    }

    pub fn bspline(degree: u32) -> Self {
        Profile::BSpline { degree, offset: 0 }
    }

    pub fn support(&self) -> (i64, i64) {
        match self {
            Profile::BSpline { degree, offset } => (*offset, offset + *degree as i64 + 1),
            Profile::Cascade(f) => f.support(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::BSpline { degree, offset } => bspline::cardinal(*degree, t - *offset as f64),
            Profile::Cascade(f) => f.evaluate(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Profile::BSpline { degree, offset } => {
                bspline::cardinal_derivative(*degree, t - *offset as f64)
            }
            Profile::Cascade(f) => f.derivative(t),
        }
    }

    /// `∫_{-∞}^{t} P`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        match self {
            Profile::BSpline { degree, offset } => {
                bspline::cardinal_antiderivative(*degree, t - *offset as f64)
            }
            Profile::Cascade(f) => f.antiderivative(t),
        }
    }

    /// Length of the pieces on which the profile is a polynomial.
    pub fn piece_step(&self) -> f64 {
        match self {
            Profile::BSpline { .. } => 1.0,
            Profile::Cascade(f) => f.spacing(),
        }
    }

    /// Polynomial degree on each piece.
    pub fn piece_degree(&self) -> u32 {
        match self {
            Profile::BSpline { degree, .. } => *degree,
            Profile::Cascade(_) => 1,
        }
    }

    pub fn is_spline(&self) -> bool {
        matches!(self, Profile::BSpline { .. })
    }
}

/// Gauss order that integrates a product of the two profiles exactly on every common piece.
fn product_order(p: &Profile, q: &Profile) -> usize {
    let exact = (p.piece_degree() + q.piece_degree()) as usize / 2 + 1;
    if p.is_spline() && q.is_spline() {
        exact.max(SPLINE_GAUSS_ORDER)
    } else {
        exact
    }
    .min(32)
}

/// `∫_c^{c+1} P(t) Q(t − lag) dt`.
fn cell_product(p: &Profile, q: &Profile, lag: i64, cell: i64, order: usize) -> f64 {
    let step = p.piece_step().min(q.piece_step());
    let c = cell as f64;
    let lag = lag as f64;
    quadrature::composite(c, c + 1.0, 0.0, step, order, |t| p.eval(t) * q.eval(t - lag))
}

/// Table of unit-cell products for all lags and cells where both profiles overlap.
struct ProductTable {
    lag_min: i64,
    cell_min: i64,
    cells: usize,
    values: Vec<f64>,
}

impl ProductTable {
    fn build(p: &Profile, q: &Profile, order: usize, parallel: bool) -> Self {
        let (p0, p1) = p.support();
        let (q0, q1) = q.support();
        let lag_min = p0 - q1 + 1;
        let lag_max = p1 - q0 - 1;
        let cells = (p1 - p0) as usize;
        let entries: Vec<(i64, i64)> = (lag_min..=lag_max)
            .flat_map(|lag| (p0..p1).map(move |cell| (lag, cell)))
            .collect();
        let eval = |&(lag, cell): &(i64, i64)| {
            // Q(· − lag) lives on [q0 + lag, q1 + lag].
            if cell < q0 + lag || cell >= q1 + lag {
                0.0
            } else {
                cell_product(p, q, lag, cell, order)
            }
        };
        let values = if parallel {
            entries.par_iter().map(eval).collect()
        } else {
            entries.iter().map(eval).collect()
        };
        Self {
            lag_min,
            cell_min: p0,
            cells,
            values,
        }
    }

    fn get(&self, lag: i64, cell: i64) -> f64 {
        let li = lag - self.lag_min;
        let ci = cell - self.cell_min;
        if li < 0 || ci < 0 || ci as usize >= self.cells {
            return 0.0;
        }
        self.values
            .get(li as usize * self.cells + ci as usize)
            .copied()
            .unwrap_or(0.0)
    }
}

/// One axis of a basis: the restricted translates of a profile at level `j`.
#[derive(Debug, Clone)]
pub struct AxisBasis {
    profile: Arc<Profile>,
    level: u32,
    interval: (f64, f64),
    cells: i64,
    shift_min: i64,
    count: usize,
}

impl AxisBasis {
    /// All translates whose support meets the open interval.
    pub fn new(profile: Arc<Profile>, level: u32, interval: (f64, f64)) -> Result<Self, BasisError> {
        let cells = dyadic_cells(interval, level)?;
        let (s0, s1) = profile.support();
        let shift_min = 1 - s1;
        let shift_max = cells - s0 - 1;
        Ok(Self {
            profile,
            level,
            interval,
            cells,
            shift_min,
            count: (shift_max - shift_min + 1) as usize,
        })
    }

    /// Translates of `profile` for the given shift range, e.g. dual elements indexed like a primal axis.
    pub fn with_shifts(
        profile: Arc<Profile>,
        level: u32,
        interval: (f64, f64),
        shift_min: i64,
        count: usize,
    ) -> Result<Self, BasisError> {
        let cells = dyadic_cells(interval, level)?;
        Ok(Self {
            profile,
            level,
            interval,
            cells,
            shift_min,
            count,
        })
    }

    pub fn profile(&self) -> &Arc<Profile> {
        &self.profile
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Number of unit cells `2^j (β − α)` in reference coordinates.
    pub fn cells(&self) -> i64 {
        self.cells
    }

    pub fn shift_min(&self) -> i64 {
        self.shift_min
    }

    pub fn shift(&self, i: usize) -> i64 {
        self.shift_min + i as i64
    }

    /// `2^j`.
    pub fn scale(&self) -> f64 {
        (1u64 << self.level) as f64
    }

    /// `2^j (x − α)`.
    pub fn to_reference(&self, x: f64) -> f64 {
        (x - self.interval.0) * self.scale()
    }

    fn inside(&self, x: f64) -> bool {
        x >= self.interval.0 && x <= self.interval.1
    }

    pub fn eval(&self, i: usize, x: f64) -> f64 {
        if !self.inside(x) {
            return 0.0;
        }
        self.scale().sqrt() * self.profile.eval(self.to_reference(x) - self.shift(i) as f64)
    }

    pub fn derivative(&self, i: usize, x: f64) -> f64 {
        if !self.inside(x) {
            return 0.0;
        }
        let s = self.scale();
        s.sqrt() * s * self.profile.derivative(self.to_reference(x) - self.shift(i) as f64)
    }

    /// Indices of elements that may be nonzero at `x`.
    pub fn active(&self, x: f64) -> RangeInclusive<usize> {
        let t = self.to_reference(x);
        let (s0, s1) = self.profile.support();
        let lo = ((t - s1 as f64).floor() as i64 + 1 - self.shift_min).max(0);
        let hi = ((t - s0 as f64).ceil() as i64 - 1 - self.shift_min).min(self.count as i64 - 1);
        if hi < lo || !self.inside(x) {
            return RangeInclusive::new(1, 0);
        }
        lo as usize..=hi as usize
    }

    /// Support of element `i` intersected with the interval.
    pub fn support(&self, i: usize) -> (f64, f64) {
        let (s0, s1) = self.profile.support();
        let k = self.shift(i);
        let h = 1.0 / self.scale();
        let a = self.interval.0 + (k + s0) as f64 * h;
        let b = self.interval.0 + (k + s1) as f64 * h;
        (a.max(self.interval.0), b.min(self.interval.1))
    }

    /// `∫_a^b φ_{j,i}` over `[a, b] ∩ [α, β]`.
    pub fn integral(&self, i: usize, a: f64, b: f64) -> f64 {
        let a = a.max(self.interval.0);
        let b = b.min(self.interval.1);
        if b <= a {
            return 0.0;
        }
        let k = self.shift(i) as f64;
        let hi = self.profile.antiderivative(self.to_reference(b) - k);
        let lo = self.profile.antiderivative(self.to_reference(a) - k);
        (hi - lo) / self.scale().sqrt()
    }

    /// Pieces of `[a, b]` on which every element is a polynomial, with a Gauss order
    /// exact for products with polynomials of degree `extra_degree`.
    pub fn quadrature_pieces(&self, a: f64, b: f64, extra_degree: u32) -> (Vec<f64>, usize) {
        let step = self.profile.piece_step().max(1.0 / 64.0) / self.scale();
        let order = ((self.profile.piece_degree() + extra_degree) as usize / 2 + 1)
            .max(if self.profile.is_spline() { 4 } else { 6 })
            .min(32);
        (
            quadrature::dyadic_breakpoints(a, b, self.interval.0, step),
            order,
        )
    }

    fn compatible(&self, other: &AxisBasis) -> Result<(), BasisError> {
        if self.level != other.level {
            return Err(BasisError::Mismatch("level"));
        }
        if self.interval != other.interval {
            return Err(BasisError::Mismatch("interval"));
        }
        Ok(())
    }

    /// `(∫_α^β φ_h ψ_k)_{h,k}` for two families on the same axis and level.
    pub fn cross_gramian(&self, other: &AxisBasis) -> Result<DMatrix<f64>, BasisError> {
        self.cross_gramian_with(other, true)
    }

    fn cross_gramian_with(&self, other: &AxisBasis, parallel: bool) -> Result<DMatrix<f64>, BasisError> {
        self.compatible(other)?;
        let order = product_order(&self.profile, &other.profile);
        let table = ProductTable::build(&self.profile, &other.profile, order, parallel);
        let verify = (self.profile.is_spline() && other.profile.is_spline())
            .then(|| ProductTable::build(&self.profile, &other.profile, order + 2, parallel));
        let mut g = DMatrix::zeros(self.count, other.count);
        for h in 0..self.count {
            let kh = self.shift(h);
            for k in 0..other.count {
                let lag = other.shift(k) - kh;
                let mut acc = 0.0;
                let mut acc_check = 0.0;
                for c in 0..self.cells {
                    acc += table.get(lag, c - kh);
                    if let Some(t) = &verify {
                        acc_check += t.get(lag, c - kh);
                    }
                }
                if verify.is_some() && (acc - acc_check).abs() > 1e-10 {
                    return Err(BasisError::Quadrature {
                        row: h,
                        col: k,
                        change: (acc - acc_check).abs(),
                    });
                }
                g[(h, k)] = acc;
            }
        }
        Ok(g)
    }
}

fn dyadic_cells(interval: (f64, f64), level: u32) -> Result<i64, BasisError> {
    let length = interval.1 - interval.0;
    let scaled = length * (1u64 << level) as f64;
    let cells = scaled.round();
    if cells < 1.0 || (scaled - cells).abs() > 1e-9 * scaled.max(1.0) {
        return Err(BasisError::IncompatibleDomain { length, level });
    }
    Ok(cells as i64)
}

/// Tensor-product basis on a box: one [`AxisBasis`] per dimension.
///
/// Multi-indices are flattened row-major, `k = k₁ · N₂ + k₂`.
#[derive(Debug, Clone)]
pub struct Basis {
    domain: BoxDomain,
    axes: Vec<AxisBasis>,
}

impl Basis {
    /// Level-`j` basis of `mask` on a one- or two-dimensional box.
    pub fn build(mask: &Mask, level: u32, domain: &BoxDomain) -> Result<Self, BasisError> {
        let profile = Arc::new(Profile::from_mask(mask, DEFAULT_CASCADE_LEVEL)?);
        Self::from_profile(profile, level, domain)
    }

    /// Same profile on every axis.
    pub fn from_profile(profile: Arc<Profile>, level: u32, domain: &BoxDomain) -> Result<Self, BasisError> {
        let axes = domain
            .axes()
            .iter()
            .map(|&iv| AxisBasis::new(profile.clone(), level, iv))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            domain: domain.clone(),
            axes,
        })
    }

    pub fn from_axes(axes: Vec<AxisBasis>) -> Result<Self, BasisError> {
        let domain = BoxDomain::new(axes.iter().map(AxisBasis::interval).collect())
            .map_err(|_| BasisError::Mismatch("dimension"))?;
        if axes.windows(2).any(|w| w[0].level != w[1].level) {
            return Err(BasisError::Mismatch("level"));
        }
        Ok(Self { domain, axes })
    }

    /// `φ_{(k₁,k₂)}(x, y) = φ_{k₁}(x) φ_{k₂}(y)`.
    pub fn tensor(bx: &Basis, by: &Basis) -> Result<Self, BasisError> {
        if bx.dim() != 1 || by.dim() != 1 {
            return Err(BasisError::Mismatch("dimension"));
        }
        Self::from_axes(vec![bx.axes[0].clone(), by.axes[0].clone()])
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn level(&self) -> u32 {
        self.axes[0].level
    }

    pub fn axes(&self) -> &[AxisBasis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &AxisBasis {
        &self.axes[i]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(AxisBasis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `2^{dj/2}`, the factor removed by the partition-of-unity identity.
    pub fn normalization(&self) -> f64 {
        self.axes.iter().map(|a| a.scale().sqrt()).product()
    }

    pub fn multi_index(&self, k: usize) -> [usize; 2] {
        match self.axes.len() {
            1 => [k, 0],
            _ => [k / self.axes[1].len(), k % self.axes[1].len()],
        }
    }

    pub fn flat_index(&self, mi: [usize; 2]) -> usize {
        match self.axes.len() {
            1 => mi[0],
            _ => mi[0] * self.axes[1].len() + mi[1],
        }
    }

    pub fn eval(&self, k: usize, p: &Point) -> f64 {
        let mi = self.multi_index(k);
        self.axes
            .iter()
            .enumerate()
            .map(|(d, ax)| ax.eval(mi[d], p[d]))
            .product()
    }

    pub fn gradient(&self, k: usize, p: &Point) -> [f64; 2] {
        let mi = self.multi_index(k);
        match self.axes.as_slice() {
            [ax] => [ax.derivative(mi[0], p[0]), 0.0],
            [ax, ay] => [
                ax.derivative(mi[0], p[0]) * ay.eval(mi[1], p[1]),
                ax.eval(mi[0], p[0]) * ay.derivative(mi[1], p[1]),
            ],
            _ => unreachable!(),
        }
    }

    /// Calls `visit(k, φ_k(p))` for every element that may be nonzero at `p`.
    pub fn for_each_active<F: FnMut(usize, f64)>(&self, p: &Point, mut visit: F) {
        match self.axes.as_slice() {
            [ax] => {
                for i in ax.active(p[0]) {
                    visit(i, ax.eval(i, p[0]));
                }
            }
            [ax, ay] => {
                let ys: Vec<(usize, f64)> = ay.active(p[1]).map(|i| (i, ay.eval(i, p[1]))).collect();
                for i in ax.active(p[0]) {
                    let vx = ax.eval(i, p[0]);
                    for &(i2, vy) in &ys {
                        visit(i * ay.len() + i2, vx * vy);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// `Σ_k c_k φ_k(p)`.
    pub fn expansion(&self, coeffs: &[f64], p: &Point) -> f64 {
        let mut acc = 0.0;
        self.for_each_active(p, |k, v| acc += coeffs[k] * v);
        acc
    }

    /// Support box of element `k`, clipped to the domain.
    pub fn support(&self, k: usize) -> [(f64, f64); 2] {
        let mi = self.multi_index(k);
        let mut out = [(0.0, 0.0); 2];
        for (d, ax) in self.axes.iter().enumerate() {
            out[d] = ax.support(mi[d]);
        }
        out
    }

    /// `ω_k = ∫_Ω φ_k`.
    pub fn integral(&self, k: usize) -> f64 {
        let mi = self.multi_index(k);
        self.axes
            .iter()
            .enumerate()
            .map(|(d, ax)| {
                let (a, b) = ax.interval();
                ax.integral(mi[d], a, b)
            })
            .product()
    }

    /// `(⟨φ_h, ψ_k⟩_Ω)_{h,k}` for two families on the same axes.
    pub fn cross_gramian(&self, other: &Basis) -> Result<DMatrix<f64>, BasisError> {
        self.cross_gramian_with(other, true)
    }

    fn cross_gramian_with(&self, other: &Basis, parallel: bool) -> Result<DMatrix<f64>, BasisError> {
        if self.dim() != other.dim() {
            return Err(BasisError::Mismatch("dimension"));
        }
        let mut factors = self
            .axes
            .iter()
            .zip(&other.axes)
            .map(|(a, b)| a.cross_gramian_with(b, parallel));
        let first = factors.next().expect("at least one axis")?;
        factors.try_fold(first, |acc, g| Ok(acc.kronecker(&g?)))
    }
}

/// Gramian `G_{hk} = ⟨φ_h, φ_k⟩_Ω` with its quadrature description.
#[derive(Debug, Clone)]
pub struct GramianMatrix {
    pub matrix: DMatrix<f64>,
    /// Gauss order per piece and piece length in reference coordinates, per axis.
    pub quadrature: Vec<(usize, f64)>,
}

impl GramianMatrix {
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
            quadrature: vec![],
        }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Gramian assembled in parallel; identical bit for bit to [`gramian_sequential`].
pub fn gramian(basis: &Basis) -> Result<GramianMatrix, BasisError> {
    gramian_impl(basis, true)
}

pub fn gramian_sequential(basis: &Basis) -> Result<GramianMatrix, BasisError> {
    gramian_impl(basis, false)
}

fn gramian_impl(basis: &Basis, parallel: bool) -> Result<GramianMatrix, BasisError> {
    let mut matrix = basis.cross_gramian_with(basis, parallel)?;
    // Mirror the upper triangle so the result is exactly symmetric.
    for i in 0..matrix.nrows() {
        for j in 0..i {
            matrix[(i, j)] = matrix[(j, i)];
        }
    }
    let quadrature = basis
        .axes()
        .iter()
        .map(|ax| {
            let p = ax.profile();
            (product_order(p, p), p.piece_step())
        })
        .collect();
    Ok(GramianMatrix { matrix, quadrature })
}

/// `G⁻¹` via Cholesky; dual element `k` is `Σ_h (G⁻¹)_{kh} φ_h`.
pub fn canonical_dual_coeffs(g: &GramianMatrix) -> Result<DMatrix<f64>, BasisError> {
    let singular = || BasisError::Singular {
        condition: condition_number(g).unwrap_or(f64::INFINITY),
    };
    let chol = g.matrix.clone().cholesky().ok_or_else(singular)?;
    let inv = chol.inverse();
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    let cond = condition_number(g)?;
    if cond > 1e14 {
        return Err(BasisError::Singular { condition: cond });
    }
    Ok(inv)
}

fn checked_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>, BasisError> {
    let eig = SymmetricEigen::new(m.clone());
    let norm = m.norm().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        worst = worst.max((m * v - v * lambda).norm());
    }
    if worst > 1e-10 * norm {
        return Err(BasisError::EigenSolver { residual: worst });
    }
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// `κ₂ = λ_max / λ_min` with a residual check on every eigenpair.
pub fn condition_number(g: &GramianMatrix) -> Result<f64, BasisError> {
    let ev = checked_eigenvalues(&g.matrix)?;
    let max = ev.iter().copied().fold(f64::MIN, f64::max);
    let min = ev.iter().copied().fold(f64::MAX, f64::min);
    if min <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(max / min)
}

/// `κ₂` of `D^{-1/2} G D^{-1/2}`, the Gramian of the L²-normalized elements.
pub fn normalized_condition_number(g: &GramianMatrix) -> Result<f64, BasisError> {
    let d: Vec<f64> = g.matrix.diagonal().iter().map(|v| 1.0 / v.sqrt()).collect();
    let n = g.size();
    let scaled = DMatrix::from_fn(n, n, |i, j| g.matrix[(i, j)] * d[i] * d[j]);
    condition_number(&GramianMatrix {
        matrix: scaled,
        quadrature: g.quadrature.clone(),
    })
}

/// Smallest eigenvalue of the Gramian.
pub fn smallest_eigenvalue(g: &GramianMatrix) -> Result<f64, BasisError> {
    Ok(checked_eigenvalues(&g.matrix)?
        .into_iter()
        .fold(f64::MAX, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic(domain: &BoxDomain, j: u32) -> Basis {
        Basis::build(&Mask::gp(3, 3.0).unwrap(), j, domain).unwrap()
    }

    #[test]
    fn element_counts() {
        let b = cubic(&BoxDomain::interval(0.0, 4.0).unwrap(), 0);
        assert_eq!(b.len(), 7);
        assert_eq!(b.axis(0).shift(0), -3);
        let q = Basis::build(&Mask::gp(2, 2.0).unwrap(), 0, &BoxDomain::square(0.0, 3.0).unwrap()).unwrap();
        assert_eq!(q.len(), 25);
        let g = Basis::build(&Mask::gp(5, 4.1).unwrap(), 5, &BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(g.len(), 37);
        assert!(matches!(
            Basis::build(&Mask::gp(3, 3.0).unwrap(), 1, &BoxDomain::interval(0.0, 0.3).unwrap()),
            Err(BasisError::IncompatibleDomain { .. })
        ));
    }

    #[test]
    fn active_range_covers_every_nonzero() {
        let b = cubic(&BoxDomain::interval(-1.0, 1.5).unwrap(), 2);
        let ax = b.axis(0);
        for i in 0..=250 {
            let x = -1.0 + 2.5 * i as f64 / 250.0;
            let act = ax.active(x);
            for k in 0..ax.len() {
                if ax.eval(k, x) != 0.0 {
                    assert!(act.contains(&k), "x={x} k={k}");
                }
            }
        }
    }

    #[test]
    fn haar_gramian_is_identity() {
        let b = Basis::build(&Mask::haar(), 0, &BoxDomain::interval(0.0, 4.0).unwrap()).unwrap();
        assert_eq!(b.len(), 4);
        let g = gramian(&b).unwrap();
        assert!((g.matrix.clone() - DMatrix::identity(4, 4)).amax() < 1e-15);
        assert_eq!(condition_number(&g).unwrap(), 1.0);
    }

    #[test]
    fn parallel_and_sequential_gramians_agree_bitwise() {
        let b = Basis::build(&Mask::gp(3, 4.0).unwrap(), 2, &BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(gramian(&b).unwrap().matrix, gramian_sequential(&b).unwrap().matrix);
    }

    #[test]
    fn canonical_dual_of_identity() {
        let inv = canonical_dual_coeffs(&GramianMatrix::identity(5)).unwrap();
        assert_eq!(inv, DMatrix::identity(5, 5));
        let singular = GramianMatrix {
            matrix: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]),
            quadrature: vec![],
        };
        assert!(matches!(canonical_dual_coeffs(&singular), Err(BasisError::Singular { .. })));
    }
}
