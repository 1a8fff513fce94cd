//! Dual bases on a box and the projector matrix `M_{ψφ̃} = (⟨ψ_ℓ, φ̃_k⟩)_{k,ℓ}`.
//!
//! The canonical dual is `G⁻¹Φ` and is globally supported. The compact dual restricts
//! the translates of a biorthogonal dual refinable function to the box, with the
//! primal shift range, and corrects them with `C = H⁻ᵀ` where
//! `H_{hk} = ⟨φ_h, φ̃_k⟩_Ω`. Away from the boundary `H` is the identity, so the
//! correction only mixes elements near the two ends of each axis.

use crate::basis::{canonical_dual_coeffs, gramian, AxisBasis, Basis, BasisError, Profile};
use crate::dual::{solve_dual_mask, verify_biorthogonality, BiorthReport, DualError, DualSpec, DEFAULT_BIORTH_TOL};
use crate::domain::Point;
use crate::linalg::CsrMatrix;
use crate::refinable::{Mask, DEFAULT_CASCADE_LEVEL};
use crate::sampling::{PartitionOfUnity, SamplingError};
use crate::voronoi::VoronoiCells;
use log::info;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

/// Cascade depth used to tabulate compact dual functions.
pub const DUAL_CASCADE_LEVEL: u32 = 14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectorError {
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error("boundary correction block is singular")]
    SingularCorrection,
    #[error("cells cover measure {covered} of a domain of measure {expected}")]
    CellsDoNotCover { covered: f64, expected: f64 },
    #[error("unknown dual mode '{0}': expected canonical or synthesized")]
    UnknownMode(String),
}

/// Which dual the projector uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DualMode {
    Canonical,
    /// Compact dual from a verified dual mask, falling back to the canonical dual.
    #[default]
    Synthesized,
}

impl fmt::Display for DualMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DualMode::Canonical => "canonical",
            DualMode::Synthesized => "synthesized",
        })
    }
}

impl FromStr for DualMode {
    type Err = ProjectorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "canonical" => Ok(DualMode::Canonical),
            "synthesized" | "compact" => Ok(DualMode::Synthesized),
            other => Err(ProjectorError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub enum DualBasis {
    /// `φ̃_k = Σ_h (G⁻¹)_{kh} φ_h`.
    Canonical { inverse_gramian: DMatrix<f64> },
    /// `φ̃_k = Σ_m C_{km} φ̃⁰_m` with `φ̃⁰` the restricted dual translates.
    Compact {
        family: Basis,
        correction: DMatrix<f64>,
        mask: Mask,
    },
}

impl DualBasis {
    pub fn canonical(basis: &Basis) -> Result<Self, ProjectorError> {
        let g = gramian(basis)?;
        Ok(DualBasis::Canonical {
            inverse_gramian: canonical_dual_coeffs(&g)?,
        })
    }

    /// Compact dual from the refinable function of `dual_mask`.
    pub fn compact(basis: &Basis, dual_mask: &Mask, level: u32) -> Result<Self, ProjectorError> {
        let profile = Arc::new(Profile::from_mask(dual_mask, level).map_err(BasisError::from)?);
        let mut axes = Vec::new();
        let mut correction: Option<DMatrix<f64>> = None;
        for primal in basis.axes() {
            let dual = AxisBasis::with_shifts(
                profile.clone(),
                primal.level(),
                primal.interval(),
                primal.shift_min(),
                primal.len(),
            )?;
            let c = boundary_correction(primal, &dual)?;
            correction = Some(match correction {
                None => c,
                Some(prev) => prev.kronecker(&c),
            });
            axes.push(dual);
        }
        Ok(DualBasis::Compact {
            family: Basis::from_axes(axes)?,
            correction: correction.expect("at least one axis"),
            mask: dual_mask.clone(),
        })
    }

    /// Compact dual when the default dual mask of `(n, h)` verifies, canonical otherwise.
    ///
    /// Returns the dual and the verification report, if a dual mask was solved.
    pub fn synthesize(basis: &Basis, n: u32, h: f64) -> Result<(Self, Option<BiorthReport>), ProjectorError> {
        let primal = Mask::gp(n, h).map_err(DualError::from)?;
        let attempt = DualSpec::default_for(n, h).and_then(|spec| solve_dual_mask(&spec, &[]));
        let solution = match attempt {
            Ok(s) => s,
            Err(e) => {
                info!("no dual mask for ({n}, {h}): {e}; using the canonical dual");
                return Ok((Self::canonical(basis)?, None));
            }
        };
        let report = verify_biorthogonality(&primal, &solution.mask, DEFAULT_CASCADE_LEVEL, DEFAULT_BIORTH_TOL);
        if !report.usable() {
            info!(
                "dual mask for ({n}, {h}) not usable (biorthogonal {}, L1 norms {:?}); using the canonical dual",
                report.converged, report.dual_l1_norms
            );
            return Ok((Self::canonical(basis)?, Some(report)));
        }
        match Self::compact(basis, &solution.mask, DUAL_CASCADE_LEVEL) {
            Ok(d) => Ok((d, Some(report))),
            Err(e) => {
                info!("compact dual unavailable ({e}); using the canonical dual");
                Ok((Self::canonical(basis)?, Some(report)))
            }
        }
    }

    pub fn for_mode(basis: &Basis, mode: DualMode, mask: &Mask) -> Result<Self, ProjectorError> {
        match (mode, mask.order_n(), mask.shape_h()) {
            (DualMode::Synthesized, Some(n), Some(h)) => Ok(Self::synthesize(basis, n, h)?.0),
            _ => Self::canonical(basis),
        }
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, DualBasis::Canonical { .. })
    }

    /// `φ̃_k(p)`.
    pub fn eval(&self, primal: &Basis, k: usize, p: &Point) -> f64 {
        match self {
            DualBasis::Canonical { inverse_gramian } => {
                let mut acc = 0.0;
                primal.for_each_active(p, |h, v| acc += inverse_gramian[(k, h)] * v);
                acc
            }
            DualBasis::Compact {
                family, correction, ..
            } => {
                let mut acc = 0.0;
                family.for_each_active(p, |m, v| acc += correction[(k, m)] * v);
                acc
            }
        }
    }
}

fn is_cut(ax: &AxisBasis, i: usize) -> bool {
    let (s0, s1) = ax.profile().support();
    let k = ax.shift(i);
    k + s0 < 0 || k + s1 > ax.cells()
}

/// `C = H⁻ᵀ` with `H` the identity except where both the primal and the dual element are cut.
fn boundary_correction(primal: &AxisBasis, dual: &AxisBasis) -> Result<DMatrix<f64>, ProjectorError> {
    let mut h = primal.cross_gramian(dual)?;
    let n = h.nrows();
    for r in 0..n {
        for c in 0..n {
            if !(is_cut(primal, r) && is_cut(dual, c)) {
                h[(r, c)] = if r == c { 1.0 } else { 0.0 };
            }
        }
    }
    let inv = h.try_inverse().ok_or(ProjectorError::SingularCorrection)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(ProjectorError::SingularCorrection);
    }
    Ok(inv.transpose())
}

/// `M_{ψφ̃}` with rows indexed by basis elements and columns by nodes.
#[derive(Debug, Clone)]
pub struct ProjectorMatrix {
    pub matrix: CsrMatrix,
    /// Set when the canonical dual is used.
    pub dense: bool,
    pub bandwidth: usize,
}

pub fn projector_matrix(
    basis: &Basis,
    dual: &DualBasis,
    psi: &PartitionOfUnity,
) -> Result<ProjectorMatrix, ProjectorError> {
    if let Some(cells) = psi.cells() {
        let covered: f64 = (0..cells.len()).map(|i| cells.measure(i)).sum();
        let expected = basis.domain().measure();
        let polygons = matches!(cells, VoronoiCells::Polygons(_));
        let tol = if polygons { 1e-9 } else { 1e-10 } * expected.max(1.0);
        if (covered - expected).abs() > tol {
            return Err(ProjectorError::CellsDoNotCover { covered, expected });
        }
    }
    let dense = match dual {
        DualBasis::Canonical { inverse_gramian } => inverse_gramian * psi.element_integrals(basis)?,
        DualBasis::Compact {
            family, correction, ..
        } => correction * psi.element_integrals(family)?,
    };
    let matrix = CsrMatrix::from_dense(&dense);
    let bandwidth = if dual.is_dense() {
        matrix.cols()
    } else {
        matrix.bandwidth()
    };
    Ok(ProjectorMatrix {
        matrix,
        dense: dual.is_dense(),
        bandwidth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::sampling::{PsiFamily, SamplingSet};

    #[test]
    fn mode_names() {
        assert_eq!("canonical".parse::<DualMode>().unwrap(), DualMode::Canonical);
        assert_eq!(DualMode::default().to_string(), "synthesized");
        assert!("dense".parse::<DualMode>().is_err());
    }

    #[test]
    fn compact_dual_is_biorthogonal_on_the_interval() {
        let domain = BoxDomain::interval(0.0, 8.0).unwrap();
        let mask = Mask::gp(3, 5.0).unwrap();
        let basis = Basis::build(&mask, 0, &domain).unwrap();
        let (dual, report) = DualBasis::synthesize(&basis, 3, 5.0).unwrap();
        assert!(report.unwrap().usable());
        let DualBasis::Compact { family, correction, .. } = &dual else {
            panic!("expected the compact dual");
        };
        let h = basis.cross_gramian(family).unwrap();
        let check = &h * correction.transpose();
        let off = (check - DMatrix::identity(basis.len(), basis.len())).amax();
        // Interior entries carry the cascade error of the dual (about 1e-6 at depth 14).
        assert!(off < 1e-5, "{off:e}");
        // The correction is block diagonal: interior rows are untouched.
        let mid = basis.len() / 2;
        assert_eq!(correction[(mid, mid)], 1.0);
        assert_eq!(correction.row(mid).iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn unstable_dual_cascade_falls_back_to_canonical() {
        let domain = BoxDomain::interval(0.0, 4.0).unwrap();
        let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 0, &domain).unwrap();
        let (dual, report) = DualBasis::synthesize(&basis, 3, 3.0).unwrap();
        let report = report.unwrap();
        assert!(report.converged && !report.dual_stable);
        assert!(dual.is_dense());
    }

    #[test]
    fn single_node_projector_holds_dual_integrals() {
        let domain = BoxDomain::interval(0.0, 4.0).unwrap();
        let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 0, &domain).unwrap();
        let dual = DualBasis::canonical(&basis).unwrap();
        let set = SamplingSet::new(&domain, vec![[1.3, 0.0]]).unwrap();
        let psi = PartitionOfUnity::new(PsiFamily::Voronoi, &set).unwrap();
        let m = projector_matrix(&basis, &dual, &psi).unwrap();
        assert!(m.dense);
        let DualBasis::Canonical { inverse_gramian } = &dual else { unreachable!() };
        for k in 0..basis.len() {
            let expected: f64 = (0..basis.len()).map(|h| inverse_gramian[(k, h)] * basis.integral(h)).sum();
            assert!((m.matrix.get(k, 0) - expected).abs() < 1e-12);
        }
    }
}
