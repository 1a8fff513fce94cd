//! The operators `PQ_s`, `PQ_c` and the iterative reconstruction.
//!
//! With `M = M_{ψφ̃}` the coefficient map, one step is
//! `c ← c + M(f₀ˢ − fˢ)`, `fˢ = Φˢc`, `fᶜ = Φᶜc`.

use crate::basis::Basis;
use crate::domain::Point;
use crate::linalg::CsrMatrix;
use crate::projector::{projector_matrix, DualBasis, ProjectorError, ProjectorMatrix};
use crate::sampling::{PartitionOfUnity, PsiFamily};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Window and growth factor of the divergence test.
pub const DIVERGENCE_WINDOW: usize = 50;
pub const DIVERGENCE_FACTOR: f64 = 10.0;
/// Minimum history length for [`contraction_estimate`].
pub const MIN_HISTORY: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconstructionError {
    #[error(transparent)]
    Projector(#[from] ProjectorError),
    #[error("{samples} samples for {nodes} nodes")]
    LengthMismatch { nodes: usize, samples: usize },
    #[error("sampling set too sparse (η ≥ 1): {cause}")]
    Diverged { cause: DivergenceCause },
    #[error("history has {len} entries, at least {MIN_HISTORY} are needed")]
    ShortHistory { len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DivergenceCause {
    /// Residual or increment grew by more than [`DIVERGENCE_FACTOR`] over [`DIVERGENCE_WINDOW`] steps.
    Growth { iteration: usize, residual: f64 },
    /// Some nonzero element of `V` vanishes at every node, so `‖I − PQ‖ ≥ 1` on `V`.
    RankDeficient { rank: usize, dim: usize },
}

impl fmt::Display for DivergenceCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceCause::Growth { iteration, residual } => {
                write!(f, "residual {residual:e} at iteration {iteration}")
            }
            DivergenceCause::RankDeficient { rank, dim } => {
                write!(f, "samples determine only {rank} of {dim} coefficients")
            }
        }
    }
}

/// Relative singular-value threshold for the rank of `Φˢ`.
pub const RANK_TOL: f64 = 1e-10;

/// `Φˢ`, `Φᶜ` and `M_{ψφ̃}` for one basis, dual and node set.
#[derive(Debug, Clone)]
pub struct OperatorPack {
    pub basis: Basis,
    pub nodes: Vec<Point>,
    pub grid: Vec<Point>,
    pub tau: f64,
    pub psi: PsiFamily,
    /// `φ_k(x_ℓ)`, rows `ℓ`.
    pub phi_s: CsrMatrix,
    /// `φ_k(τ i)`, rows grid points.
    pub phi_c: CsrMatrix,
    pub projector: ProjectorMatrix,
    /// Numerical rank of `Φˢ`.
    pub sampling_rank: usize,
}

impl OperatorPack {
    pub fn bandwidths(&self) -> [usize; 3] {
        [self.phi_s.bandwidth(), self.phi_c.bandwidth(), self.projector.bandwidth]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `PQ_s g`.
    pub fn pq_s(&self, g: &[f64]) -> Vec<f64> {
        self.phi_s.apply(&self.projector.matrix.apply(g))
    }

    /// `PQ_c g`.
    pub fn pq_c(&self, g: &[f64]) -> Vec<f64> {
        self.phi_c.apply(&self.projector.matrix.apply(g))
    }
}

/// Default output spacing: `2⁻⁷` of the longest side.
pub fn default_tau(basis: &Basis) -> f64 {
    let longest = basis
        .domain()
        .axes()
        .iter()
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max);
    longest / 128.0
}

fn evaluation_matrix(basis: &Basis, points: &[Point]) -> CsrMatrix {
    let rows = points
        .iter()
        .map(|p| {
            let mut row = Vec::new();
            basis.for_each_active(p, |k, v| {
                if v != 0.0 {
                    row.push((k, v))
                }
            });
            row
        })
        .collect();
    CsrMatrix::from_rows(basis.len(), rows)
}

pub fn assemble_pack(
    basis: &Basis,
    dual: &DualBasis,
    psi: &PartitionOfUnity,
    tau: f64,
) -> Result<OperatorPack, ReconstructionError> {
    let projector = projector_matrix(basis, dual, psi)?;
    let nodes = psi.set().nodes().to_vec();
    let grid = basis.domain().grid(tau);
    let phi_s = evaluation_matrix(basis, &nodes);
    let sv = phi_s.to_dense().singular_values();
    let largest = sv.max();
    let sampling_rank = sv.iter().filter(|&&s| s > RANK_TOL * largest).count();
    Ok(OperatorPack {
        basis: basis.clone(),
        phi_s,
        sampling_rank,
        phi_c: evaluation_matrix(basis, &grid),
        nodes,
        grid,
        tau,
        psi: psi.family(),
        projector,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// `‖f₀ˢ − fˢ‖∞ ≤ tol`.
    Residual,
    /// The geometric bound on the remaining increments is `≤ tol`: the iterate has reached
    /// its fixed point, also when `f ∉ V` and the residual stalls.
    Increment,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct RestoreState {
    pub iterations: usize,
    pub coeffs: Vec<f64>,
    pub f_s: Vec<f64>,
    pub f_c: Vec<f64>,
    /// `‖f₀ˢ − fˢ‖∞` before each step and after the last one.
    pub residuals: Vec<f64>,
    /// `‖PQ_s(f₀ˢ − fˢ)‖∞` of each step taken.
    pub increments: Vec<f64>,
    pub flops: u64,
    pub stop: StopReason,
}

impl RestoreState {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("at least one residual")
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn check_growth(history: &[f64]) -> bool {
    let n = history.len();
    let last = history[n - 1];
    if !last.is_finite() {
        return true;
    }
    n > DIVERGENCE_WINDOW && last > DIVERGENCE_FACTOR * history[n - 1 - DIVERGENCE_WINDOW]
}

/// Bound `d ρ / (1 − ρ)` on the change still to come, with `ρ` the mean ratio of the last
/// increments; infinite while the increments do not decrease.
pub(crate) fn remaining_change(increments: &[f64]) -> f64 {
    let n = increments.len();
    if n == 0 {
        return f64::INFINITY;
    }
    let last = increments[n - 1];
    if last == 0.0 {
        return 0.0;
    }
    if n < 2 {
        return f64::INFINITY;
    }
    let k = (n - 1).min(10);
    let rho = (last / increments[n - 1 - k]).powf(1.0 / k as f64);
    if rho < 1.0 {
        last * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    }
}

/// Runs the iteration from `c = M f₀ˢ` and returns the grid values `fᶜ`.
pub fn restore(
    pack: &OperatorPack,
    f0_s: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<(Vec<f64>, RestoreState), ReconstructionError> {
    restore_with(pack, f0_s, n_max, tol, |_, _| {})
}

/// [`restore`] calling `observe(n, state)` after the initialization and after every step.
pub fn restore_with<F: FnMut(usize, &RestoreState)>(
    pack: &OperatorPack,
    f0_s: &[f64],
    n_max: usize,
    tol: f64,
    mut observe: F,
) -> Result<(Vec<f64>, RestoreState), ReconstructionError> {
    if f0_s.len() != pack.node_count() {
        return Err(ReconstructionError::LengthMismatch {
            nodes: pack.node_count(),
            samples: f0_s.len(),
        });
    }
    let n = pack.basis.len();
    if pack.sampling_rank < n {
        return Err(ReconstructionError::Diverged {
            cause: DivergenceCause::RankDeficient {
                rank: pack.sampling_rank,
                dim: n,
            },
        });
    }
    let m = &pack.projector.matrix;
    let mut flops = 0;
    let mut coeffs = vec![0.0; n];
    flops += m.mul_vec(f0_s, &mut coeffs);
    let mut f_s = vec![0.0; pack.node_count()];
    let mut f_c = vec![0.0; pack.grid.len()];
    flops += pack.phi_s.mul_vec(&coeffs, &mut f_s);
    flops += pack.phi_c.mul_vec(&coeffs, &mut f_c);
    let mut state = RestoreState {
        iterations: 0,
        coeffs,
        f_s,
        f_c,
        residuals: Vec::new(),
        increments: Vec::new(),
        flops,
        stop: StopReason::MaxIterations,
    };
    let mut r = vec![0.0; pack.node_count()];
    let mut dc = vec![0.0; n];
    let mut ds = vec![0.0; pack.node_count()];
    let mut dg = vec![0.0; pack.grid.len()];
    observe(0, &state);
    loop {
        for ((ri, a), b) in r.iter_mut().zip(f0_s).zip(&state.f_s) {
            *ri = a - b;
        }
        state.residuals.push(sup(&r));
        if state.final_residual() <= tol {
            state.stop = StopReason::Residual;
            break;
        }
        if check_growth(&state.residuals) {
            return Err(ReconstructionError::Diverged {
                cause: DivergenceCause::Growth {
                    iteration: state.iterations,
                    residual: state.final_residual(),
                },
            });
        }
        if state.iterations >= n_max || remaining_change(&state.increments) <= tol {
            if state.iterations < n_max {
                state.stop = StopReason::Increment;
            }
            break;
        }
        state.flops += m.mul_vec(&r, &mut dc);
        state.flops += pack.phi_s.mul_vec(&dc, &mut ds);
        state.flops += pack.phi_c.mul_vec(&dc, &mut dg);
        state.increments.push(sup(&ds));
        if check_growth(&state.increments) {
            return Err(ReconstructionError::Diverged {
                cause: DivergenceCause::Growth {
                    iteration: state.iterations,
                    residual: state.final_residual(),
                },
            });
        }
        for (c, d) in state.coeffs.iter_mut().zip(&dc) {
            *c += d;
        }
        for (f, d) in state.f_s.iter_mut().zip(&ds) {
            *f += d;
        }
        for (f, d) in state.f_c.iter_mut().zip(&dg) {
            *f += d;
        }
        state.iterations += 1;
        observe(state.iterations, &state);
    }
    Ok((state.f_c.clone(), state))
}

/// Geometric-mean ratio over the tail half of the increment history.
///
/// Increments decay like `ηⁿ` whether or not `f ∈ V`, while residuals stall at the
/// approximation error when `f ∉ V`.
pub fn contraction_estimate(state: &RestoreState) -> Result<f64, ReconstructionError> {
    if state.final_residual() == 0.0 {
        return Ok(0.0);
    }
    let h = &state.increments;
    if h.len() < MIN_HISTORY {
        return Err(ReconstructionError::ShortHistory { len: h.len() });
    }
    let start = h.len() / 2;
    let (first, last) = (h[start], h[h.len() - 1]);
    if last == 0.0 {
        return Ok(0.0);
    }
    Ok((last / first).powf(1.0 / (h.len() - 1 - start) as f64))
}

/// `‖PQ_s(f₀ˢ − f∞ˢ)‖∞`.
pub fn fixed_point_residual(pack: &OperatorPack, f_inf_s: &[f64], f0_s: &[f64]) -> f64 {
    let r: Vec<f64> = f0_s.iter().zip(f_inf_s).map(|(a, b)| a - b).collect();
    sup(&pack.pq_s(&r))
}

/// Least-squares line through `(xs, ys)`: `(slope, intercept, R²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
