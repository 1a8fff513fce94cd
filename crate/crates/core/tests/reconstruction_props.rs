use bounded_sampling::basis::{gramian, normalized_condition_number, Basis};
use bounded_sampling::domain::{BoxDomain, Point};
use bounded_sampling::dual::{solve_dual_mask, verify_biorthogonality, DualSpec, DEFAULT_BIORTH_TOL};
use bounded_sampling::harness::nodes::jittered_nodes;
use bounded_sampling::integration::{basis_weights, integrate};
use bounded_sampling::projector::DualBasis;
use bounded_sampling::reconstruction::{assemble_pack, restore, OperatorPack, ReconstructionError};
use bounded_sampling::refinable::Mask;
use bounded_sampling::sampling::{PartitionOfUnity, PsiFamily, SamplingSet};
use proptest::prelude::*;

fn pack(basis: &Basis, nodes: Vec<Point>, family: PsiFamily) -> OperatorPack {
    let set = SamplingSet::new(basis.domain(), nodes).unwrap();
    let psi = PartitionOfUnity::new(family, &set).unwrap();
    assemble_pack(basis, &DualBasis::canonical(basis).unwrap(), &psi, 1.0 / 64.0).unwrap()
}

#[test]
fn quadratic_gramian_interior_matches_bspline_autocorrelation() {
    // ∫ B₂(x) B₂(x − k) dx = B₅(3 + k): 66/120, 26/120, 1/120.
    let basis = Basis::build(&Mask::gp(2, 2.0).unwrap(), 4, &BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
    let g = gramian(&basis).unwrap().matrix;
    let mid = basis.len() / 2;
    for (k, v) in [(0, 66.0), (1, 26.0), (2, 1.0), (3, 0.0)] {
        assert!((g[(mid, mid + k)] - v / 120.0).abs() < 1e-12, "lag {k}: {}", g[(mid, mid + k)]);
    }
    assert!(normalized_condition_number(&gramian(&basis).unwrap()).unwrap() >= 1.0);
}

#[test]
fn bspline_dual_of_order_two_is_biorthogonal() {
    let sol = solve_dual_mask(&DualSpec::default_for(2, 4.0).unwrap(), &[]).unwrap();
    let report = verify_biorthogonality(&Mask::gp(2, 4.0).unwrap(), &sol.mask, 10, DEFAULT_BIORTH_TOL);
    assert!(report.usable(), "{report:?}");
    let sum: f64 = sol.mask.coeffs().iter().sum();
    assert!((sum - 2.0).abs() < 1e-14);
}

#[test]
fn too_few_nodes_is_reported_as_divergence() {
    let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 1, &BoxDomain::interval(0.0, 1.0).unwrap()).unwrap();
    let p = pack(&basis, vec![[0.2, 0.0], [0.8, 0.0]], PsiFamily::Voronoi);
    assert!(matches!(
        restore(&p, &[1.0, 2.0], 100, 1e-10),
        Err(ReconstructionError::Diverged { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dual_masks_satisfy_the_symbol_identity(n in 2u32..6, dh in 0.0f64..4.0) {
        let h = n as f64 + dh;
        let spec = DualSpec::default_for(n, h).unwrap();
        let sol = solve_dual_mask(&spec, &[]).unwrap();
        let report = verify_biorthogonality(&Mask::gp(n, h).unwrap(), &sol.mask, 8, DEFAULT_BIORTH_TOL);
        prop_assert!(report.max_symbol_residual < 1e-12, "{}", report.max_symbol_residual);
    }

    #[test]
    fn elements_of_v_are_recovered(
        coeffs in prop::collection::vec(-1.0f64..1.0, 11),
        seed in 0u64..500,
        hat in any::<bool>(),
    ) {
        let unit = BoxDomain::interval(0.0, 1.0).unwrap();
        let basis = Basis::build(&Mask::gp(3, 3.0).unwrap(), 3, &unit).unwrap();
        prop_assume!(basis.len() == coeffs.len());
        let nodes = jittered_nodes(&unit, 24, seed);
        let family = if hat { PsiFamily::Hat } else { PsiFamily::Voronoi };
        let p = pack(&basis, nodes.clone(), family);
        let f0: Vec<f64> = nodes.iter().map(|x| basis.expansion(&coeffs, x)).collect();
        let (fc, state) = restore(&p, &f0, 100_000, 1e-12).unwrap();
        // The grid output is Φᶜ applied to the returned coefficients.
        let again = p.phi_c.apply(&state.coeffs);
        for (a, b) in fc.iter().zip(&again) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for (x, v) in p.grid.iter().zip(&fc) {
            prop_assert!((basis.expansion(&coeffs, x) - v).abs() < 1e-8);
        }
        let w = basis_weights(&basis);
        let (value, _) = integrate(&p, &w, &f0, 100_000, 1e-13).unwrap();
        prop_assert!((value - w.integrate_expansion(&coeffs)).abs() < 1e-9);
    }

    #[test]
    fn fixed_iteration_count_is_linear_in_the_samples(
        f in prop::collection::vec(-1.0f64..1.0, 20),
        g in prop::collection::vec(-1.0f64..1.0, 20),
        a in -3.0f64..3.0,
        iterations in 1usize..60,
    ) {
        let unit = BoxDomain::interval(0.0, 1.0).unwrap();
        let basis = Basis::build(&Mask::gp(2, 2.5).unwrap(), 3, &unit).unwrap();
        let p = pack(&basis, jittered_nodes(&unit, 20, 9), PsiFamily::Voronoi);
        let combo: Vec<f64> = f.iter().zip(&g).map(|(u, v)| a * u + v).collect();
        let run = |s: &[f64]| restore(&p, s, iterations, 0.0).unwrap().1.coeffs;
        let (cf, cg, cc) = (run(&f), run(&g), run(&combo));
        for ((x, y), z) in cf.iter().zip(&cg).zip(&cc) {
            prop_assert!((z - a * x - y).abs() < 1e-10);
        }
    }
}
