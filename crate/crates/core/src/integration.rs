//! Iterative quadrature from samples: `I ← I + ωᵀM(fˢ − f⁽ⁿ⁾ˢ)` alongside the
//! reconstruction, so that `Iₙ = ∫ f⁽ⁿ⁾`.

use crate::basis::Basis;
use crate::reconstruction::{
    remaining_change, DivergenceCause, OperatorPack, ReconstructionError, DIVERGENCE_FACTOR, DIVERGENCE_WINDOW,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `ω_k = ∫_Ω φ_{j,k}` under the `2^{dj/2}` normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub normalization: f64,
}

impl WeightVector {
    /// `2^{−dj/2} ω`, summing to `|Ω|`.
    pub fn normalized(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.normalization).collect()
    }

    pub fn integrate_expansion(&self, coeffs: &[f64]) -> f64 {
        self.weights.iter().zip(coeffs).map(|(w, c)| w * c).sum()
    }
}

/// Closed-form antiderivatives for B-splines, the cascade antiderivative otherwise.
pub fn basis_weights(basis: &Basis) -> WeightVector {
    WeightVector {
        weights: (0..basis.len()).map(|k| basis.integral(k)).collect(),
        normalization: basis.normalization(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationTrace {
    /// `I₀, I₁, …`; one more entry than iterations run.
    pub estimates: Vec<f64>,
    pub value: f64,
    pub reference: Option<f64>,
    pub errors: Option<Vec<f64>>,
}

impl IntegrationTrace {
    pub fn iterations(&self) -> usize {
        self.estimates.len() - 1
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        self.errors = Some(self.estimates.iter().map(|e| (e - reference).abs()).collect());
        self.reference = Some(reference);
        self
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs the integration iteration until the geometric bound
/// `‖ω‖₁ ‖M r‖∞ ρ/(1 − ρ)` on the remaining change is below `tol·(1 + |I|)`.
pub fn integrate(
    pack: &OperatorPack,
    weights: &WeightVector,
    f_s: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<(f64, IntegrationTrace), ReconstructionError> {
    let n = pack.basis.len();
    if f_s.len() != pack.node_count() {
        return Err(ReconstructionError::LengthMismatch {
            nodes: pack.node_count(),
            samples: f_s.len(),
        });
    }
    if pack.sampling_rank < n {
        return Err(ReconstructionError::Diverged {
            cause: DivergenceCause::RankDeficient {
                rank: pack.sampling_rank,
                dim: n,
            },
        });
    }
    let m = &pack.projector.matrix;
    let omega1: f64 = weights.weights.iter().map(|w| w.abs()).sum();
    let mut dc = m.apply(f_s);
    let mut value = weights.integrate_expansion(&dc);
    let mut current = pack.phi_s.apply(&dc);
    let mut estimates = vec![value];
    let mut coefficient_steps = vec![sup(&dc)];
    let mut r = vec![0.0; f_s.len()];
    let mut ds = vec![0.0; f_s.len()];
    for it in 0..n_max {
        for ((ri, a), b) in r.iter_mut().zip(f_s).zip(&current) {
            *ri = a - b;
        }
        m.mul_vec(&r, &mut dc);
        let step = sup(&dc);
        coefficient_steps.push(step);
        let grown = coefficient_steps.len() > DIVERGENCE_WINDOW
            && step > DIVERGENCE_FACTOR * coefficient_steps[coefficient_steps.len() - 1 - DIVERGENCE_WINDOW];
        if !step.is_finite() || grown {
            return Err(ReconstructionError::Diverged {
                cause: DivergenceCause::Growth {
                    iteration: it,
                    residual: sup(&r),
                },
            });
        }
        if step == 0.0 {
            break;
        }
        value += weights.integrate_expansion(&dc);
        pack.phi_s.mul_vec(&dc, &mut ds);
        for (c, d) in current.iter_mut().zip(&ds) {
            *c += d;
        }
        estimates.push(value);
        if omega1 * remaining_change(&coefficient_steps[1..]) <= tol * (1.0 + value.abs()) {
            break;
        }
    }
    Ok((
        value,
        IntegrationTrace {
            estimates,
            value,
            reference: None,
            errors: None,
        },
    ))
}

/// Largest `|I_n(λf + μg) − λI_n(f) − μI_n(g)|` over `pairs` seeded random sample vectors
/// and every iteration `n ≤ iterations`.
pub fn linearity_audit(
    pack: &OperatorPack,
    weights: &WeightVector,
    pairs: usize,
    iterations: usize,
    seed: u64,
) -> Result<f64, ReconstructionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let mut draw = || -> Vec<f64> { (0..pack.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect() };
        let (f, g) = (draw(), draw());
        let (l, m): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let combo: Vec<f64> = f.iter().zip(&g).map(|(a, b)| l * a + m * b).collect();
        let run = |v: &[f64]| integrate(pack, weights, v, iterations, 0.0).map(|t| t.1.estimates);
        let (tf, tg, tc) = (run(&f)?, run(&g)?, run(&combo)?);
        for ((a, b), c) in tf.iter().zip(&tg).zip(&tc) {
            worst = worst.max((c - l * a - m * b).abs());
        }
    }
    Ok(worst)
}

/// One monomial moment `∫ x^a y^b` against its iterative estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub exponents: [u32; 2],
    pub exact: f64,
    pub estimate: f64,
    pub error: f64,
    pub iterations: usize,
}

/// Integrates every monomial of total degree `≤ degree` from its samples at the pack nodes.
pub fn polynomial_exactness_check(
    pack: &OperatorPack,
    weights: &WeightVector,
    degree: u32,
    n_max: usize,
    tol: f64,
) -> Result<Vec<MomentCheck>, ReconstructionError> {
    let domain = pack.basis.domain();
    let dim = domain.dim();
    let moment = |axis: usize, a: u32| {
        let (lo, hi) = domain.axis(axis);
        let e = a as i32 + 1;
        (hi.powi(e) - lo.powi(e)) / e as f64
    };
    let mut out = Vec::new();
    for total in 0..=degree {
        for a in (0..=total).rev() {
            let b = total - a;
            if dim == 1 && b > 0 {
                continue;
            }
            let samples: Vec<f64> = pack
                .nodes
                .iter()
                .map(|p| p[0].powi(a as i32) * if dim == 2 { p[1].powi(b as i32) } else { 1.0 })
                .collect();
            let exact = moment(0, a) * if dim == 2 { moment(1, b) } else { 1.0 };
            let (estimate, trace) = integrate(pack, weights, &samples, n_max, tol)?;
            out.push(MomentCheck {
                exponents: [a, b],
                exact,
                estimate,
                error: (estimate - exact).abs(),
                iterations: trace.iterations(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoxDomain;
    use crate::projector::DualBasis;
    use crate::reconstruction::assemble_pack;
    use crate::refinable::Mask;
    use crate::sampling::{PartitionOfUnity, PsiFamily, SamplingSet};

    #[test]
    fn haar_weights_are_one() {
        let domain = BoxDomain::interval(0.0, 4.0).unwrap();
        let basis = Basis::build(&Mask::haar(), 0, &domain).unwrap();
        assert_eq!(basis_weights(&basis).weights, vec![1.0; 4]);
    }

    #[test]
    fn constant_is_integrated_at_iteration_zero() {
        let domain = BoxDomain::interval(0.0, 2.0).unwrap();
        let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 1, &domain).unwrap();
        let set = SamplingSet::new(&domain, (0..9).map(|i| [0.05 + 0.21 * i as f64, 0.0]).collect()).unwrap();
        let psi = PartitionOfUnity::new(PsiFamily::Voronoi, &set).unwrap();
        let pack = assemble_pack(&basis, &DualBasis::canonical(&basis).unwrap(), &psi, 0.1).unwrap();
        let w = basis_weights(&basis);
        let (v, trace) = integrate(&pack, &w, &[3.0; 9], 100, 1e-12).unwrap();
        assert!((trace.estimates[0] - 6.0).abs() < 1e-12, "{}", trace.estimates[0]);
        assert!((v - 6.0).abs() < 1e-12);
    }
}
